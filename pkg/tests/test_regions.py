import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky.errors import DimensionMismatch, ParseError
from schottky.group import phi_above, phi_below, phi_forms
from schottky.projective import ProjPoint, fs_distance, random_unit_vectors, span
from schottky.psl import ProjMap, apply
from schottky.regions import (Certificate, CounterexamplePoint, QuadricRegion, Unknown, ball_region,
                              region_disjoint, region_image)

from conftest import random_complex


def coordinate_phi_forms():
    e = np.eye(4)
    return phi_forms(span([e[:, 0], e[:, 1]]), span([e[:, 2], e[:, 3]]))


def phi_direct(xs):
    """Oracle: share of |x|^2 on the first two coordinates."""
    xs = np.atleast_2d(xs)
    return np.sum(np.abs(xs[:, :2]) ** 2, axis=1) / np.sum(np.abs(xs) ** 2, axis=1)


class TestQuadricRegion:
    def test_membership_matches_phi(self, rng):
        forms = coordinate_phi_forms()
        r = phi_below(forms, 0.3)
        xs = random_unit_vectors(rng, 4, 2000)
        assert np.array_equal(r.contains_rows(xs), phi_direct(xs) < 0.3)

    def test_classify(self):
        r = phi_below(coordinate_phi_forms(), 0.5)
        assert r.classify(ProjPoint([0, 0, 1, 0])) == "inside"
        assert r.classify(ProjPoint([1, 0, 1, 0])) == "boundary"
        assert r.classify(ProjPoint([1, 0, 0, 0])) == "outside"

    def test_regularity(self):
        assert phi_below(coordinate_phi_forms(), 0.3).regular
        # {x*x < 2 x*x} is all of P^n: a - b negative definite
        assert not QuadricRegion(np.eye(3), 2 * np.eye(3)).regular

    def test_validation(self):
        with pytest.raises(ValueError):
            QuadricRegion(np.array([[0, 1], [0, 0]]), np.eye(2))
        with pytest.raises(ValueError):
            QuadricRegion(np.eye(2), -np.eye(2))
        with pytest.raises(DimensionMismatch):
            QuadricRegion(np.eye(2), np.eye(3))

    def test_complement(self, rng):
        r = ball_region([1, 0, 0], 0.4)
        c = r.complement()
        xs = random_unit_vectors(rng, 3, 1000)
        assert not np.any(r.contains_rows(xs) & c.contains_rows(xs))
        assert np.all(r.contains_rows(xs) | c.contains_rows(xs) | (np.abs(r.levels(xs)) < 1e-12))

    def test_ball_region(self, rng):
        c = random_complex(rng, 3)
        r = ball_region(c, 0.5)
        for x in random_unit_vectors(rng, 3, 300):
            assert r.contains(x) == (fs_distance(ProjPoint(x), ProjPoint(c)) < 0.5)

    def test_json_round_trip(self):
        r = phi_above(coordinate_phi_forms(), 0.8)
        assert QuadricRegion.from_json(r.to_json()) == r
        with pytest.raises(ParseError):
            QuadricRegion.from_json({"a": r.to_json()["a"]})


class TestRegionImage:
    def test_identity(self):
        r = ball_region([1, 0, 0], 0.3)
        img = region_image(r, ProjMap.identity(2))
        assert np.allclose(img.a, r.a) and np.allclose(img.b, r.b)

    def test_membership_equivariance(self, rng):
        r = ball_region(random_complex(rng, 4), 0.6)
        g = ProjMap(random_complex(rng, 4, 4))
        img = region_image(r, g)
        xs = random_unit_vectors(rng, 4, 2000)
        ys = xs @ g.lift.T
        lv = r.levels(xs)
        clear = np.abs(lv) > 1e-8
        assert np.array_equal(img.contains_rows(ys)[clear], r.contains_rows(xs)[clear])

    def test_phi_transfer_closed_form(self, rng):
        """phi(gamma x) = |lam|^2 phi / (|lam|^2 phi + 1 - phi) for the block scaling by lam."""
        lam = 4.0 * np.exp(0.7j)
        g = ProjMap(np.diag([lam, lam, 1, 1]))
        xs = random_unit_vectors(rng, 4, 10**4)
        ys = xs @ g.lift.T
        p = phi_direct(xs)
        l2 = abs(lam) ** 2
        assert np.allclose(phi_direct(ys), l2 * p / (l2 * p + 1 - p), atol=1e-10)

    def test_unitary_keeps_phi_levels(self, rng):
        q, _ = np.linalg.qr(random_complex(rng, 3, 3))
        r = ball_region([1, 0, 0], 0.5)
        img = region_image(r, ProjMap(q))
        xs = random_unit_vectors(rng, 3, 100)
        assert np.allclose(img.levels(xs @ ProjMap(q).lift.T), r.levels(xs), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            region_image(ball_region([1, 0, 0], 0.3), ProjMap.identity(3))


class TestRegionDisjoint:
    def test_certificate(self):
        forms = coordinate_phi_forms()
        res = region_disjoint(phi_below(forms, 0.2), phi_above(forms, 0.8))
        assert isinstance(res, Certificate)
        assert res.mu == pytest.approx(0.5, abs=0.02)
        # oracle: the certified combination is positive definite
        h1 = phi_below(forms, 0.2).form
        h2 = phi_above(forms, 0.8).form
        combo = res.mu * h1 / np.linalg.norm(h1, 2) + (1 - res.mu) * h2 / np.linalg.norm(h2, 2)
        assert np.linalg.eigvalsh(combo)[0] == pytest.approx(res.margin, abs=1e-12)
        assert res.margin > 0

    def test_shared_boundary(self):
        forms = coordinate_phi_forms()
        res = region_disjoint(phi_below(forms, 0.4), phi_above(forms, 0.4))
        assert isinstance(res, CounterexamplePoint)
        assert phi_direct(res.point.coords)[0] == pytest.approx(0.4, abs=1e-8)

    def test_region_with_itself(self):
        r = ball_region([0, 1, 0], 0.3)
        res = region_disjoint(r, r)
        assert isinstance(res, CounterexamplePoint)
        assert max(res.levels) <= 1e-10

    def test_overlapping_balls(self):
        res = region_disjoint(ball_region([1, 0, 0], 0.5), ball_region([1, 0.3, 0], 0.5))
        assert isinstance(res, CounterexamplePoint)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.05, 0.7), st.floats(0.05, 0.7), st.floats(0.1, 1.5))
    def test_balls_against_distance_oracle(self, r1, r2, d):
        """Closed balls are disjoint iff the centre distance exceeds the radius sum."""
        if abs(d - (r1 + r2)) < 1e-3 or d >= np.pi / 2:
            return
        c1 = np.array([1.0, 0, 0])
        c2 = np.array([np.cos(d), np.sin(d), 0])
        res = region_disjoint(ball_region(c1, r1), ball_region(c2, r2))
        if d > r1 + r2:
            assert isinstance(res, Certificate)
        else:
            assert isinstance(res, CounterexamplePoint)

    def test_result_json(self):
        forms = coordinate_phi_forms()
        assert region_disjoint(phi_below(forms, 0.2), phi_above(forms, 0.8)).to_json()["status"] == "disjoint"
        assert Unknown(0.5, -1e-3, 10).to_json()["status"] == "unknown"
