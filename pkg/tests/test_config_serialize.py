import json
import os
import threading
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from schottky.config import TOLERANCES, default_tolerances, merge_tolerances, ordered_map, thread_count
from schottky.errors import ParseError
from schottky.serialize import (complex_from_json, complex_to_json, csv_text, matrix_from_json, matrix_to_json,
                                read_json, vector_from_json, vector_to_json, write_csv, write_json)

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestTolerances:
    def test_defaults(self):
        tol = default_tolerances()
        assert set(tol) == set(TOLERANCES)
        assert tol["boundary"] == 1e-10 and tol["cluster_gap"] == 1e-6 and tol["decay"] == 1e-8

    def test_merge(self):
        tol = merge_tolerances({"boundary": "1e-8"})
        assert tol["boundary"] == 1e-8 and tol["decay"] == 1e-8

    @pytest.mark.parametrize("bad", [{"nope": 1}, {"boundary": "x"}, {"boundary": 0}, {"boundary": -1e-3}])
    def test_rejects(self, bad):
        with pytest.raises(ParseError):
            merge_tolerances(bad)


class TestOrderedMap:
    def test_inline_default(self, monkeypatch):
        monkeypatch.delenv("SCHOTTKY_THREADS", raising=False)
        assert thread_count() == 1
        monkeypatch.setenv("SCHOTTKY_THREADS", "junk")
        assert thread_count() == 1

    def test_order_kept_under_threads(self, monkeypatch):
        monkeypatch.setenv("SCHOTTKY_THREADS", "4")
        seen = set()

        def slow(i):
            seen.add(threading.get_ident())
            time.sleep(0.01 * (5 - i % 5))
            return i * i

        assert ordered_map(slow, range(10)) == [i * i for i in range(10)]


class TestJson:
    @given(finite, finite)
    def test_complex_round_trip(self, re, im):
        z = complex(re, im)
        assert complex_from_json(json.loads(json.dumps(complex_to_json(z)))) == z

    @pytest.mark.parametrize("bad", [[1.0], [1, "2"], "1+2j", [True, 0.0], None])
    def test_complex_rejects(self, bad):
        with pytest.raises(ParseError):
            complex_from_json(bad)

    def test_matrix_round_trip(self, rng):
        m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        assert np.array_equal(matrix_from_json(json.loads(json.dumps(matrix_to_json(m)))), m)
        v = m[0]
        assert np.array_equal(vector_from_json(vector_to_json(v)), v)

    @pytest.mark.parametrize("bad", [[], [[]], [[[1, 0]], [[1, 0], [0, 0]]], "m"])
    def test_matrix_rejects(self, bad):
        with pytest.raises(ParseError):
            matrix_from_json(bad)

    def test_file_round_trip(self, tmp_path):
        obj = {"a": [1, 2.5], "b": {"c": complex_to_json(1 - 2j)}}
        path = tmp_path / "x.json"
        write_json(path, obj)
        assert read_json(path) == obj
        assert [p.name for p in tmp_path.iterdir()] == ["x.json"]  # no temp files left behind

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ParseError):
            read_json(path)

    def test_atomic_failure_keeps_old_file(self, tmp_path):
        path = tmp_path / "x.json"
        write_json(path, {"old": 1})
        with pytest.raises(ValueError):
            write_json(path, {"bad": float("nan")})
        assert read_json(path) == {"old": 1}
        assert sorted(os.listdir(tmp_path)) == ["x.json"]


class TestCsv:
    def test_float_repr_round_trip(self, tmp_path):
        vals = [0.1, 1 / 3, 1e-300, np.float64(2.5)]
        path = tmp_path / "t.csv"
        write_csv(path, ["i", "x"], enumerate(vals))
        lines = path.read_text().splitlines()
        assert lines[0] == "i,x"
        assert [float(l.split(",")[1]) for l in lines[1:]] == [float(v) for v in vals]
        assert path.read_text() == csv_text(["i", "x"], enumerate(vals))
