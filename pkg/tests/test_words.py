import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky.errors import NotReduced, ParseError
from schottky.psl import ProjMap
from schottky.words import ReducedWord, enumerate_reduced_words, word_count

from conftest import random_complex
from oracles import brute_force_reduced_words


class TestReducedWord:
    def test_reduction_enforced(self):
        with pytest.raises(NotReduced):
            ReducedWord([(1, 1), (1, -1)])
        with pytest.raises(NotReduced):
            ReducedWord([(2, -1), (2, 1)])
        ReducedWord([(1, 1), (1, 1), (2, -1)])

    def test_bad_letters(self):
        for bad in ([(0, 1)], [(1, 2)], [(1,)]):
            with pytest.raises(ParseError):
                ReducedWord(bad)

    def test_leading_and_inverse(self):
        w = ReducedWord([(2, -1), (1, 1)])
        assert w.leading == (2, -1)
        assert w.inverse() == ReducedWord([(1, -1), (2, 1)])
        with pytest.raises(ValueError):
            ReducedWord().leading

    def test_lift_is_left_to_right_product(self, rng):
        gens = [ProjMap(random_complex(rng, 3, 3)) for _ in range(2)]
        w = ReducedWord([(1, 1), (2, -1), (1, 1)])
        expected = gens[0].lift @ np.linalg.inv(gens[1].lift) @ gens[0].lift
        assert np.allclose(w.lift(gens), expected)
        assert np.allclose(w.lift(gens) @ w.inverse().lift(gens), np.eye(3))

    def test_json_round_trip(self):
        w = ReducedWord([(1, 1), (2, -1)])
        assert ReducedWord.from_json(w.to_json()) == w
        with pytest.raises(ParseError):
            ReducedWord.from_json("g1")


class TestEnumeration:
    @pytest.mark.parametrize("g,max_len,count", [(2, 1, 5), (2, 2, 17), (3, 3, 187)])
    def test_examples(self, g, max_len, count):
        assert len(list(enumerate_reduced_words(g, max_len))) == count == word_count(g, max_len)

    @pytest.mark.parametrize("g", [1, 2, 3])
    def test_matches_brute_force(self, g):
        for max_len in range(0, 7 if g < 3 else 6):
            words = [w.letters for w in enumerate_reduced_words(g, max_len)]
            assert len(words) == len(set(words))
            assert set(words) == brute_force_reduced_words(g, max_len)
            assert len(words) == word_count(g, max_len)

    def test_g3_len6_count(self):
        assert len(list(enumerate_reduced_words(3, 6))) == word_count(3, 6) == 1 + sum(6 * 5 ** (l - 1) for l in range(1, 7))

    def test_shortlex_order(self):
        words = list(enumerate_reduced_words(2, 3))
        order = {(1, 1): 0, (1, -1): 1, (2, 1): 2, (2, -1): 3}
        keys = [(len(w), [order[a] for a in w]) for w in words]
        assert keys == sorted(keys)

    def test_errors(self):
        with pytest.raises(ValueError):
            list(enumerate_reduced_words(0, 2))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 3), st.sampled_from([1, -1])), max_size=8))
    def test_free_reduction_accepts_exactly_reduced(self, letters):
        reduced = all(letters[i] != (letters[i + 1][0], -letters[i + 1][1]) for i in range(len(letters) - 1))
        if reduced:
            assert ReducedWord(letters).letters == tuple(letters)
        else:
            with pytest.raises(NotReduced):
                ReducedWord(letters)
