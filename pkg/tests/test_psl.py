import numpy as np
import pytest

from schottky.errors import DimensionMismatch, FiniteOrder, Singular
from schottky.projective import ProjPoint, ProjSubspace, fs_distance
from schottky.psl import (ProjMap, apply, eigenvector_span, finite_order, level_set, limit_set,
                          limit_set_distance, modulus_decomposition)

from conftest import random_complex
from oracles import class_windows, cluster_points, eigen_orbit, random_gapped_map


def e(i, n1):
    v = np.zeros(n1, dtype=complex)
    v[i] = 1
    return v


def jordan(lam, size):
    return lam * np.eye(size, dtype=complex) + np.eye(size, k=1)


class TestProjMap:
    def test_determinant_normalized(self, rng):
        g = ProjMap(random_complex(rng, 4, 4))
        assert np.linalg.det(g.lift) == pytest.approx(1.0, abs=1e-10)

    def test_singular(self):
        with pytest.raises(Singular):
            ProjMap(np.diag([1.0, 1.0, 0.0]))

    def test_json_round_trip(self, rng):
        g = ProjMap(random_complex(rng, 3, 3))
        assert ProjMap.from_json(g.to_json()) == g

    def test_projective_equality(self, rng):
        m = random_complex(rng, 3, 3)
        assert ProjMap(m).projectively_equal(ProjMap(2j * m))


class TestApply:
    def test_identity(self, rng):
        p = ProjPoint(random_complex(rng, 3))
        assert apply(ProjMap.identity(2), p) == p

    def test_eigenvector_fixed(self):
        assert fs_distance(apply(ProjMap(np.diag([5.0, 1, 1])), ProjPoint(e(0, 3))), ProjPoint(e(0, 3))) < 1e-15

    def test_dominant_iteration(self):
        g = ProjMap(np.diag([2.0, 1.0, 0.5]))
        p = ProjPoint([1, 1, 1])
        for _ in range(30):
            p = apply(g, p)
        # oracle: after 30 steps the off-axis coordinates are 2^-30 and 4^-30 of the first
        assert fs_distance(p, ProjPoint(e(0, 3))) < 1e-6
        assert fs_distance(p, ProjPoint([1, 2.0**-30, 4.0**-30])) < 1e-12

    def test_inverse_round_trip(self, rng):
        for _ in range(50):
            g = ProjMap(random_complex(rng, 4, 4))
            p = ProjPoint(random_complex(rng, 4))
            assert fs_distance(apply(g, apply(g.inverse(), p)), p) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            apply(ProjMap.identity(2), ProjPoint([1, 0]))


class TestModulusDecomposition:
    def test_diagonal(self):
        dec = modulus_decomposition(ProjMap(np.diag([2.0, 2.0, 0.25])))
        assert dec.k == 2
        assert dec.moduli == pytest.approx([0.25, 2.0])
        assert dec.dims == [1, 2]

    def test_single_jordan_block(self):
        dec = modulus_decomposition(ProjMap(jordan(1.0, 3)))
        assert dec.k == 1 and dec.dims == [3]
        part = dec.parts[0]
        assert np.allclose(part.basis @ (part.r * part.gamma) @ part.basis.conj().T, jordan(1.0, 3), atol=1e-12)

    def test_nori_generator_classes(self):
        # block scaling by lambda = 4 on a 2-plane: two classes of dimension 2, ratio 4
        dec = modulus_decomposition(ProjMap(np.diag([4.0, 4.0, 1.0, 1.0])))
        assert dec.k == 2 and dec.dims == [2, 2]
        assert dec.moduli[1] / dec.moduli[0] == pytest.approx(4.0)

    def test_reassembly_and_unit_spectra(self, rng):
        for _ in range(50):
            dec = modulus_decomposition(ProjMap(random_gapped_map(rng, 5)))
            assert dec.reassembly_error() < 1e-8
            assert dec.moduli == sorted(dec.moduli)
            for part in dec.parts:
                assert np.allclose(np.abs(np.linalg.eigvals(part.gamma)), 1.0, atol=1e-8)

    def test_decomposition_json(self):
        dec = modulus_decomposition(ProjMap(np.diag([3.0, 1.0, 1.0])))
        data = dec.to_json()
        assert data["dims"] == [2, 1] and len(data["parts"]) == 2


class TestEigenvectorSpan:
    def test_diagonal_full(self):
        assert eigenvector_span(np.diag([1.0, 2.0, 3.0])).shape[1] == 3

    def test_jordan_block(self):
        basis = eigenvector_span(jordan(2.0, 4))
        assert basis.shape[1] == 1
        assert ProjSubspace(basis).contains(e(0, 4))

    def test_mixed_blocks(self):
        t = np.zeros((3, 3), dtype=complex)
        t[:2, :2] = jordan(1.0, 2)
        t[2, 2] = 3.0
        basis = eigenvector_span(t)
        assert basis.shape[1] == 2
        s = ProjSubspace(basis)
        assert s.contains(e(0, 3)) and s.contains(e(2, 3)) and not s.contains(e(1, 3), 1e-3)

    def test_singular(self):
        with pytest.raises(Singular):
            eigenvector_span(np.zeros((2, 2)))


class TestLevelAndLimitSets:
    def test_level_sets_of_diagonal(self):
        g = ProjMap(np.diag([2.0, 1.0, 0.5]))
        top = level_set(g, 2.0)
        assert top.proj_dim == 0 and top.contains(e(0, 3))
        assert level_set(g, 3.0) is None

    def test_level_set_jordan_class(self):
        t = np.zeros((3, 3), dtype=complex)
        t[:2, :2] = jordan(1.0, 2)
        t[2, 2] = 5.0
        g = ProjMap(t)
        low = level_set(g, modulus_decomposition(g).moduli[0])
        assert low.proj_dim == 0 and low.contains(e(0, 3))

    def test_limit_set_diagonal(self):
        parts = limit_set(ProjMap(np.diag([4.0, 2.0, 1.0])))
        assert [p.proj_dim for p in parts] == [0, 0, 0]
        assert parts[0].contains(e(2, 3)) and parts[1].contains(e(1, 3)) and parts[2].contains(e(0, 3))

    def test_limit_set_jordan(self):
        parts = limit_set(ProjMap(jordan(1.0, 3)))
        assert len(parts) == 1 and parts[0].proj_dim == 0 and parts[0].contains(e(0, 3))

    def test_limit_set_nori_axes(self):
        parts = limit_set(ProjMap(np.diag([4.0, 4.0, 1.0, 1.0])))
        assert [p.proj_dim for p in parts] == [1, 1]
        from schottky.projective import intersect
        assert intersect(parts[0], parts[1]) is None

    def test_finite_order(self):
        g = ProjMap(np.diag([1.0, 1j, -1.0]))
        assert finite_order(g) == 4
        with pytest.raises(FiniteOrder):
            limit_set(g)

    def test_level_sets_match_classes(self, rng):
        for _ in range(20):
            g = ProjMap(random_gapped_map(rng, 4))
            dec = modulus_decomposition(g)
            for r in dec.moduli:
                assert level_set(g, r, dec) is not None
            for r in np.sqrt(np.array(dec.moduli[:-1]) * np.array(dec.moduli[1:])):
                assert level_set(g, float(r), dec) is None

    def test_conjugation_equivariance(self, rng):
        for _ in range(20):
            g = ProjMap(random_gapped_map(rng, 4))
            h = ProjMap(random_complex(rng, 4, 4))
            conj = ProjMap(h.lift @ g.lift @ np.linalg.inv(h.lift))
            for a, b in zip(limit_set(conj), limit_set(g)):
                assert a.same_as(b.transform(h.lift), 1e-8)

    def test_orbit_oracle(self, rng):
        """Cluster points of eigen-coordinate orbits lie on the limit set; each class is reached."""
        for _ in range(10):
            lift = random_gapped_map(rng, 4)
            limit = limit_set(ProjMap(lift))
            _, vecs = class_windows(lift)
            hit = set()
            for lo in range(4):
                for hi in range(lo, 4):
                    x = vecs[:, lo:hi + 1] @ random_complex(rng, hi - lo + 1)
                    for back in (False, True):
                        for q in cluster_points(eigen_orbit(lift, x, 500, back)):
                            d = limit_set_distance(q[None, :], limit)[0]
                            assert d < 1e-4
                            hit.add(int(np.argmin([L.distance(q) for L in limit])))
            assert hit == {0, 1, 2, 3}
