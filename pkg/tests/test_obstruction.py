import numpy as np
import pytest

from schottky.errors import DimensionMismatch, FiniteOrder
from schottky.group import PASS, SchottkyData, phi_above, phi_below, phi_forms, nori_build
from schottky.obstruction import (build_bridge, contradiction_harness, diagonal_candidate, orbit_witness,
                                  pivot_index, random_candidate, subspace_exclusion_check)
from schottky.projective import ProjPoint, ProjSubspace, fs_distance, intersect
from schottky.psl import ProjMap, modulus_decomposition
from schottky.regions import ball_region

from conftest import random_complex
from oracles import random_gapped_map

E3 = np.eye(3)


def dec_of(diag):
    return modulus_decomposition(ProjMap(np.diag(np.asarray(diag, dtype=complex))))


class TestPivot:
    @pytest.mark.parametrize("diag, n, dims, expected", [
        ((4, 2, 1), 1, [1, 1, 1], 2),
        ((1, np.exp(1j), np.exp(2j)), 1, [3], 1),
        ((1, 1j, 2, 2j, 4), 2, [2, 2, 1], 2),
        ((2, 1, 1), 1, [2, 1], 1),
        ((2, 2, 1), 1, [1, 2], 2),
    ])
    def test_examples(self, diag, n, dims, expected):
        d = dec_of(diag)
        assert d.dims == dims
        assert pivot_index(d, n) == expected
        assert pivot_index(d, n) == int(np.argmax(np.cumsum(dims) >= n + 1)) + 1

    def test_wrong_size(self):
        with pytest.raises(DimensionMismatch):
            pivot_index(dec_of((4, 2, 1, 1)), 1)


class TestBridge:
    def test_diag_421(self):
        b = build_bridge(ProjMap(np.diag([4.0, 2.0, 1.0])))
        assert b.j0 == 2 and b.case == "Obs2"
        e2 = ProjPoint(E3[:, 1])
        for key in ("w0", "v"):
            assert fs_distance(b.connectors[key].point, e2) < 1e-12
        assert b.component("C+").subspace.same_as(ProjSubspace(E3[:, [0, 1]]), 1e-10)
        assert b.component("C-").subspace.same_as(ProjSubspace(E3[:, [1, 2]]), 1e-10)
        assert b.component("L_pivot").subspace.same_as(ProjSubspace(E3[:, [1]]), 1e-10)
        assert b.connectivity_defect() < 1e-12

    def test_obs3(self):
        b = build_bridge(ProjMap(np.diag([2.0, 2.0, 1.0])))
        assert b.case == "Obs3" and b.j0 == 2
        assert sorted(c.name for c in b.components) == ["C-", "L_pivot"]
        assert "v" in b.connectors and "w0" not in b.connectors

    def test_obs1(self):
        b = build_bridge(ProjMap(np.diag([2.0, 1.0, 1.0])))
        assert b.case == "Obs1" and b.j0 == 1
        assert sorted(c.name for c in b.components) == ["C+", "L_pivot"]

    def test_errors_and_degenerate(self):
        with pytest.raises(DimensionMismatch):
            build_bridge(ProjMap(np.diag([4.0, 2.0, 0.5, 0.25])))
        with pytest.raises(FiniteOrder):
            build_bridge(ProjMap(np.diag([1.0, -1.0, 1j])))
        b = build_bridge(ProjMap(np.diag([1.0, np.exp(1j), np.exp(1j * np.sqrt(2))])))
        assert b.degenerate and len(b.limit_set) == 1

    def test_jordan_connector(self):
        # moduli 0.5, 1, 2 (Jordan block), 4: cumulative dims 1, 2, 4 put the pivot on the block
        lift = np.array([[4, 0, 0, 0, 0], [0, 2, 1, 0, 0], [0, 0, 2, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 0.5]],
                        dtype=complex)
        b = build_bridge(ProjMap(lift))
        assert b.j0 == 3 and b.case == "Obs2"
        eig = ProjSubspace(np.eye(5)[:, [1]])
        for c in b.connectors.values():
            assert c.k == 1
            assert eig.distance(c.point) < 1e-3  # k-index limit converges like 1/m

    @pytest.mark.parametrize("n1", [3, 5])
    def test_random_maps(self, n1):
        rng = np.random.default_rng(100 + n1)
        reached = total = 0
        for _ in range(50):
            b = build_bridge(ProjMap(random_gapped_map(rng, n1)))
            assert b.connectivity_defect() < 1e-9
            assert b.limit_set_defect(rng) < 1e-8
            for name, x in b.sample_points(rng, 6):
                w = orbit_witness(b, x, name)
                total += 1
                reached += bool(w is not None and w.reached())
        assert reached >= 0.9 * total


class TestExclusion:
    def test_lines_in_p2_meet(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            a = ProjSubspace(random_complex(rng, 3, 2))
            b = ProjSubspace(random_complex(rng, 3, 2))
            assert a.proj_dim + b.proj_dim - 2 >= 0  # dimension count
            meet = intersect(a, b)
            assert meet is not None and meet.proj_dim >= 0
            p = meet.point()
            assert a.distance(p) < 1e-10 and b.distance(p) < 1e-10

    @staticmethod
    def transplanted(alpha=0.2):
        # point/line pairs on P^2 with the same phi-region layout as the odd-dimensional construction
        rng = np.random.default_rng(3)
        h, _ = np.linalg.qr(random_complex(rng, 3, 3))
        frames = [np.eye(3, dtype=complex), h]
        lam = 1 / alpha - 1
        gens, regions = [], []
        for f in frames:
            attr, rep = ProjSubspace(f[:, [0]]), ProjSubspace(f[:, [1, 2]])
            forms = phi_forms(attr, rep)
            gens.append(ProjMap(f @ np.diag([lam, 1, 1]) @ np.linalg.inv(f)))
            regions.append((phi_below(forms, alpha), phi_above(forms, 1 - alpha)))
        return SchottkyData(n=2, generators=gens, regions=regions)

    def test_transplant_contradiction(self):
        verdict = subspace_exclusion_check(self.transplanted())
        assert verdict.status == "Contradiction"
        wit = verdict.witnesses()[0]
        assert wit["forced"] and wit["dim_V"] + wit["dim_image"] >= 2
        assert wit["distance_to_V"] < 1e-10 and wit["distance_to_image"] < 1e-10

    def test_low_dimensional_candidates(self):
        s = diagonal_candidate()
        cands = [(1, "S", ProjSubspace(E3[:, [0]])), (2, "R", ProjSubspace(s.generators[1].lift[:, [2]]))]
        verdict = subspace_exclusion_check(s, cands)
        assert verdict.status == "NoForcedIntersection"

    def test_soundness(self):
        rng = np.random.default_rng(9)
        s = random_candidate(1, n=4)
        for _ in range(40):
            d = int(rng.integers(1, 5))
            sub = ProjSubspace(random_complex(rng, 5, d))
            entries = subspace_exclusion_check(s, [(1, "S", sub)]).entries
            for e in entries:
                assert e["forced"] == (e["dim_V"] + e["dim_image"] >= 4)
                if e["forced"]:
                    assert e["outcome"] != "no forced intersection" and "point" in e
            verdict = subspace_exclusion_check(s, [(1, "S", sub)])
            if 2 * (d - 1) >= 4:
                assert verdict.status != "NoForcedIntersection"

    def test_odd_dimension(self):
        assert subspace_exclusion_check(nori_build(3, 2, 0.2)).status == "NotApplicable"


class TestHarness:
    def test_diagonal_candidate(self):
        rep = contradiction_harness(diagonal_candidate(), samples=2000)
        assert rep.applicable and rep.has_witness
        assert rep.verdict.startswith("contradiction")
        kinds = {w["kind"] for w in rep.witnesses}
        assert "bridge meets both chains" in kinds
        g1 = rep.generators[0]
        assert g1.both_chains and g1.in_S["S_chain_depth"] == 8 and g1.in_R["R_chain_depth"] == 8

    def test_disjointness_short_circuit(self):
        base = diagonal_candidate()
        close = ball_region(E3[:, 2] + 0.05 * E3[:, 1], 0.3)  # overlaps R_1 around e_3
        s = SchottkyData(2, base.generators, [(base.regions[0][0], close), base.regions[1]])
        rep = contradiction_harness(s, samples=500)
        assert rep.verdict == "axiom failure: disjointness"
        assert rep.generators == [] and rep.witnesses[0]["axiom"] == "disjointness"

    def test_odd_dimension(self):
        rep = contradiction_harness(nori_build(3, 2, 0.2), samples=2000)
        assert not rep.applicable and rep.verdict == "not applicable: odd dimension"
        assert all(a["status"] == PASS for a in rep.verification["axioms"].values())

    @pytest.mark.parametrize("seed", range(12))
    def test_random_candidates(self, seed):
        rep = contradiction_harness(random_candidate(seed), samples=1000, seed=seed)
        assert rep.has_witness

    def test_threads_do_not_change_report(self, monkeypatch):
        import json
        s = diagonal_candidate()
        base = json.dumps(contradiction_harness(s, samples=500).to_json(), sort_keys=True)
        monkeypatch.setenv("SCHOTTKY_THREADS", "4")
        assert json.dumps(contradiction_harness(s, samples=500).to_json(), sort_keys=True) == base
