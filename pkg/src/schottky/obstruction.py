"""Why Schottky data cannot exist on P^{2n}, made concrete.

Two mechanisms are implemented:

* **Bridge sets.**  For a map ``gamma`` of infinite order on P^{2n} with
  modulus decomposition ``V_1 (+) ... (+) V_k`` (increasing moduli), let
  ``j0`` be the first index where ``dim V_1 + ... + dim V_j >= n + 1``.
  The union of ``C+ = <w0, V_{>j0}>``, ``C- = <v, V_{<j0}>`` and the
  eigen-plane ``L_{r_j0}`` (with connectors ``w0, v`` in ``L_{r_j0}``)
  is connected, contains the whole limit set, and each of its points is
  approached by orbits of points off it.  A Schottky generator would
  have to split this connected set between its attracting side
  ``S(gamma)`` and repelling side ``R(gamma)``; the harness locates the
  points where that fails.
* **Subspace exclusion.**  A projective n-plane inside one region is
  mapped by another generator into a region disjoint from it, yet an
  n-plane and its image always meet in P^{2n}; the meeting point is an
  explicit witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .asymptotics import binom, k_value
from .config import DEFAULT_SAMPLES, ordered_map
from .errors import DimensionMismatch, FiniteOrder
from .group import FAIL, SchottkyData, nested_region, verify_schottky
from .projective import ProjPoint, ProjSubspace, distance_rows_to_subspace, fs_distance, intersect, span
from .psl import (
    ModulusDecomposition,
    ProjMap,
    eigenvector_span,
    finite_order,
    limit_set_distance,
    modulus_decomposition,
)
from .regions import QuadricRegion, ball_region

CONNECTOR_M = 10**4
CHAIN_DEPTH = 8
ORBIT_M_MAX = 500
ORBIT_REACH = 1e-4
PATH_POINTS = 401


def pivot_index(d: ModulusDecomposition, n: int) -> int:
    """First (1-based) class index whose cumulative dimension reaches ``n + 1``.

    Raises:
        DimensionMismatch: the lift is not of size ``2n + 1``.
    """
    size = d.lift.shape[0]
    if size != 2 * n + 1:
        raise DimensionMismatch(f"lift of size {size} does not act on P^{2 * n}")
    cum = np.cumsum(d.dims)
    return int(np.argmax(cum >= n + 1)) + 1


def _generic_block_vector(dim: int) -> np.ndarray:
    """Deterministic vector with no zero coordinates in a class basis."""
    j = np.arange(1, dim + 1)
    v = np.exp(0.7j * j) / j
    return v / np.linalg.norm(v)


@dataclass
class Connector:
    """Limit direction ``[w0]`` (forward) or ``[v]`` (backward) inside ``L_{r_j0}``."""

    point: ProjPoint
    k: int
    m: int
    residual: float  # relative distance of the normalized iterate to the eigenvector span
    direction: str

    def to_json(self):
        return {"point": self.point.to_json(), "k": self.k, "m": self.m, "residual": self.residual,
                "direction": self.direction}


def connector(dec: ModulusDecomposition, j0: int, backward: bool = False, m: int = CONNECTOR_M) -> Connector:
    """Normalized iterate ``binom(m, k)^-1 gamma_j0^{+-m} w`` projected onto ``Eve(gamma_j0)``."""
    part = dec.parts[j0 - 1]
    gam = np.linalg.inv(part.gamma) if backward else part.gamma
    w = _generic_block_vector(part.dim)
    k, _ = k_value(w, gam)
    u = np.linalg.matrix_power(gam, m) @ w / binom(m, k)
    eve = eigenvector_span(gam)
    proj = eve @ (eve.conj().T @ u)
    residual = float(np.linalg.norm(u - proj) / np.linalg.norm(u))
    return Connector(ProjPoint(part.basis @ proj), k, m, residual, "backward" if backward else "forward")


@dataclass
class BridgeComponent:
    name: str  # "C+", "C-" or "L_pivot"
    subspace: ProjSubspace
    anchors: List[np.ndarray] = field(default_factory=list)  # spanning vectors used for sampling

    def to_json(self):
        return {"name": self.name, "proj_dim": self.subspace.proj_dim, "basis": self.subspace.to_json()}


@dataclass
class BridgeSet:
    """Connected set containing the limit set of ``gamma``."""

    map: ProjMap
    decomposition: ModulusDecomposition
    j0: int
    case: str  # "Obs1" (j0 = 1), "Obs2", "Obs3" (j0 = k) or "degenerate" (single class)
    components: List[BridgeComponent]
    attachments: List[dict]  # {"point": ProjPoint, "between": (name, name)}
    connectors: dict  # "w0"/"v" -> Connector
    limit_set: List[ProjSubspace]

    @property
    def degenerate(self) -> bool:
        return self.case == "degenerate"

    def component(self, name: str) -> BridgeComponent:
        for c in self.components:
            if c.name == name:
                return c
        raise KeyError(name)

    def distance(self, xs: np.ndarray) -> np.ndarray:
        """Fubini-Study distance of each row to the union of the components."""
        xs = np.atleast_2d(xs)
        return np.min([distance_rows_to_subspace(xs, c.subspace.basis) for c in self.components], axis=0)

    def connectivity_defect(self) -> float:
        """Largest distance of an attachment point to either component it joins."""
        worst = 0.0
        for att in self.attachments:
            for name in att["between"]:
                worst = max(worst, self.component(name).subspace.distance(att["point"]))
        return worst

    def limit_set_defect(self, rng: np.random.Generator, per_plane: int = 8) -> float:
        """Largest distance from sampled points of ``L(gamma)`` to the bridge."""
        worst = 0.0
        for plane in self.limit_set:
            c = rng.standard_normal((per_plane, plane.basis.shape[1])) + 1j * rng.standard_normal(
                (per_plane, plane.basis.shape[1]))
            worst = max(worst, float(self.distance(c @ plane.basis.T).max()))
        return worst

    def sample_points(self, rng: np.random.Generator, count: int) -> List[tuple]:
        """``count`` random points of the spans ``C+``/``C-`` as ``(name, vector)`` pairs."""
        spans = [c for c in self.components if c.name != "L_pivot"]
        if not spans:
            return []
        out = []
        for i in range(count):
            c = spans[i % len(spans)]
            a = np.column_stack(c.anchors)
            coef = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
            x = a @ coef
            out.append((c.name, x / np.linalg.norm(x)))
        return out

    def to_json(self):
        return {
            "j0": self.j0,
            "k": self.decomposition.k,
            "case": self.case,
            "dims": self.decomposition.dims,
            "moduli": [float(r) for r in self.decomposition.moduli],
            "components": [c.to_json() for c in self.components],
            "attachments": [{"point": a["point"].to_json(), "between": list(a["between"])}
                            for a in self.attachments],
            "connectors": {k: v.to_json() for k, v in self.connectors.items()},
            "connectivity_defect": self.connectivity_defect(),
        }


def _eve_plane(dec: ModulusDecomposition, i: int) -> ProjSubspace:
    part = dec.parts[i - 1]
    return ProjSubspace(part.basis @ eigenvector_span(part.gamma))


def build_bridge(g: ProjMap, m: int = CONNECTOR_M) -> BridgeSet:
    """Connected bridge set containing ``L(g)`` for ``g`` acting on P^{2n}.

    A map with a single modulus class yields a ``"degenerate"`` bridge
    equal to its limit set.

    Raises:
        DimensionMismatch: the lift has even size (odd-dimensional ambient space).
        FiniteOrder: ``g`` is periodic.
    """
    size = g.lift.shape[0]
    if size % 2 == 0:
        raise DimensionMismatch(f"bridge sets live on even-dimensional P^(2n); lift has size {size}")
    order = finite_order(g)
    if order is not None:
        raise FiniteOrder(order)
    n = (size - 1) // 2
    dec = modulus_decomposition(g)
    kk = dec.k
    limit = [_eve_plane(dec, i) for i in range(1, kk + 1)]
    if kk == 1:
        comp = BridgeComponent("L_pivot", limit[0], [limit[0].basis[:, i] for i in range(limit[0].basis.shape[1])])
        return BridgeSet(g, dec, 1, "degenerate", [comp], [], {}, limit)
    j0 = pivot_index(dec, n)
    pivot = limit[j0 - 1]
    comps = [BridgeComponent("L_pivot", pivot, [pivot.basis[:, i] for i in range(pivot.basis.shape[1])])]
    attachments, connectors = [], {}
    if j0 < kk:
        w0 = connector(dec, j0, backward=False, m=m)
        upper = np.hstack([p.basis for p in dec.parts[j0:]])
        anchors = [w0.point.coords] + [upper[:, i] for i in range(upper.shape[1])]
        comps.append(BridgeComponent("C+", span(anchors), anchors))
        attachments.append({"point": w0.point, "between": ("C+", "L_pivot")})
        connectors["w0"] = w0
    if j0 > 1:
        v = connector(dec, j0, backward=True, m=m)
        lower = np.hstack([p.basis for p in dec.parts[:j0 - 1]])
        anchors = [v.point.coords] + [lower[:, i] for i in range(lower.shape[1])]
        comps.append(BridgeComponent("C-", span(anchors), anchors))
        attachments.append({"point": v.point, "between": ("C-", "L_pivot")})
        connectors["v"] = v
    case = "Obs1" if j0 == 1 else ("Obs3" if j0 == kk else "Obs2")
    return BridgeSet(g, dec, j0, case, comps, attachments, connectors, limit)


# --------------------------------------------------------------------------
# orbit witnesses


@dataclass
class OrbitWitness:
    """``gamma^{+-m}(x)`` lands within ``distance`` of a bridge point ``target``."""

    target: ProjPoint
    start: ProjPoint
    m: int
    direction: int  # +1 forward iterates, -1 backward
    distance: float  # verified by plain matrix iteration in standard coordinates
    start_off_bridge: float  # distance of the start point to the bridge components

    def reached(self, tol: float = ORBIT_REACH) -> bool:
        return self.distance <= tol and self.start_off_bridge > 0.0

    def to_json(self):
        return {"target": self.target.to_json(), "start": self.start.to_json(), "m": self.m,
                "direction": self.direction, "distance": self.distance,
                "start_off_bridge": self.start_off_bridge}


def orbit_witness(bridge: BridgeSet, target: np.ndarray, side: str, m_max: int = ORBIT_M_MAX,
                  reach: float = ORBIT_REACH) -> Optional[OrbitWitness]:
    """Start point off the bridge whose orbit reaches ``target`` (a point of ``C+`` or ``C-``).

    For ``C+`` the start is built in class coordinates as
    ``x = f * w_far + gamma_j0^{-m} q_j0 + sum_{j>j0} (r_j0/r_j)^m gamma_j^{-m} q_j``
    with ``w_far`` a fixed generic vector of the classes below ``j0``, so
    that ``gamma^m(x)/r_j0^m`` differs from ``q`` only by the decaying
    ``f (r_j/r_j0)^m gamma_j^m w_far``; ``C-`` is the mirror image under
    ``gamma^-1``.  Without classes on the far side, ``w_far`` is a
    direction of ``V_j0`` transverse to ``q_j0``.  The pair ``(m, f)``
    keeps the predicted landing error below ``reach / 10`` while making
    the smallest transverse part of ``x`` as large as possible, so the
    start stays resolvably off the bridge in double precision.  The
    landing distance is re-measured by iterating the class blocks.
    """
    dec = bridge.decomposition
    parts = dec.parts
    j0 = bridge.j0 - 1
    sign = 1 if side == "C+" else -1
    qn = np.asarray(target, dtype=complex) / np.linalg.norm(target)
    comps = dec.components(qn)
    basis = dec.basis_matrix()
    r0 = parts[j0].r
    far = [i for i in range(len(parts)) if (i < j0 if sign == 1 else i > j0)]
    near = [i for i in range(len(parts)) if (i > j0 if sign == 1 else i < j0)]
    zero = [np.zeros(p.dim, dtype=complex) for p in parts]
    for i in far:
        comps[i] = zero[i].copy()  # the target has no far-side part; drop rounding residue
    w_far = [z.copy() for z in zero]
    for i in far:
        w_far[i] = _generic_block_vector(parts[i].dim)
    if not far:
        q0 = comps[j0]
        u = _generic_block_vector(parts[j0].dim)
        u = u - np.vdot(q0, u) / max(np.vdot(q0, q0).real, 1e-300) * q0
        if np.linalg.norm(u) <= 1e-12:
            return None
        w_far[j0] = u / np.linalg.norm(u)
    q_near = sum(np.linalg.norm(comps[i]) ** 2 for i in near) ** 0.5
    target_budget = reach / 10

    log_ratio = [sign * np.log(p.r / r0) for p in parts]  # per-step log growth relative to j0
    powers = [np.eye(p.dim, dtype=complex) for p in parts]
    steps = [p.gamma if sign == 1 else np.linalg.inv(p.gamma) for p in parts]
    best = None
    for m in range(1, m_max + 1):
        powers = [st @ pw for st, pw in zip(steps, powers)]
        err = np.linalg.norm(np.concatenate(
            [np.exp(m * log_ratio[i]) * (powers[i] @ w_far[i]) if np.any(w_far[i]) else zero[i]
             for i in range(len(parts))]))
        f = min(1.0, 0.5 * target_budget / max(err, 1e-300))
        # size of the target's near-side part once pulled back m steps
        near_part = max([np.linalg.norm(np.linalg.solve(powers[i], comps[i])) * np.exp(-m * log_ratio[i])
                         for i in near] or [1.0])
        score = min(f, near_part) if near and q_near > 0 else f
        if best is None or score > best[0]:
            best = (score, m, f, [pw.copy() for pw in powers])
        if (near and near_part < best[0]) or (not near and f >= 1.0):
            break  # the score can only fall from here on
    _, m, f, powers = best
    start = [f * w_far[i] + (np.linalg.solve(powers[i], comps[i]) * np.exp(-m * log_ratio[i]) if i not in far else 0)
             for i in range(len(parts))]
    x = basis @ np.concatenate(start)
    # iterate blockwise in class coordinates: plain iteration of an
    # ill-conditioned lift smears rounding error into the tiny near part
    y_cls = [np.exp(m * log_ratio[i]) * (powers[i] @ start[i]) for i in range(len(parts))]
    y = basis @ np.concatenate(y_cls)
    dist = fs_distance(ProjPoint(y), ProjPoint(qn))
    off = float(bridge.distance(x)[0])
    return OrbitWitness(ProjPoint(qn), ProjPoint(x), m, sign, dist, off)


# --------------------------------------------------------------------------
# subspace exclusion


@dataclass
class ExclusionVerdict:
    status: str  # "Contradiction", "NoForcedIntersection", "NoCandidate" or "NotApplicable"
    entries: List[dict]

    def witnesses(self) -> List[dict]:
        return [e for e in self.entries if e.get("outcome") in ("regions overlap", "mapping violated")]

    def to_json(self):
        return {"status": self.status, "entries": self.entries}


def negative_subspace(region: QuadricRegion) -> Optional[ProjSubspace]:
    """Span of the negative eigenvectors of the region's difference form.

    The form is negative definite on this span, so the whole projective
    subspace lies in the region.
    """
    w, v = np.linalg.eigh(region.form)
    neg = v[:, w < 0]
    return ProjSubspace(neg) if neg.shape[1] else None


def subspace_exclusion_check(s: SchottkyData, candidates: Optional[Sequence[tuple]] = None,
                             tol: float = 0.0) -> ExclusionVerdict:
    """Intersect a subspace inside a region with its image under another generator.

    ``candidates`` is a list of ``(j, side, ProjSubspace)`` with the
    subspace inside region ``side_j``; by default the negative-eigenvector
    span of every region is used.  For ``V`` in ``S_a`` and ``sigma =
    gamma_b`` (``b != a``), ``sigma^-1(V)`` would lie in ``R_b``; for ``V``
    in ``R_a`` the image ``sigma(V)`` would lie in ``S_b``.  Whenever
    ``dim V + dim image >= 2n`` the two meet, and the meeting point either
    lies in two regions at once or exposes a failure of
    ``sigma(R_b) = P - closure(S_b)``.
    """
    if s.n % 2 == 1:
        return ExclusionVerdict("NotApplicable", [{"reason": "odd dimension"}])
    if candidates is None:
        candidates = []
        for j in range(1, s.g + 1):
            for side in ("S", "R"):
                sub = negative_subspace(s.region(j, side))
                if sub is not None:
                    candidates.append((j, side, sub))
    entries = []
    for a, side, sub in candidates:
        for b in range(1, s.g + 1):
            if b == a:
                continue
            sigma = s.generators[b - 1]
            move = sigma.inverse() if side == "S" else sigma
            partner_side = "R" if side == "S" else "S"
            image = sub.transform(move.lift)
            entry = {"region": f"{side}_{a}", "sigma": b, "dim_V": sub.proj_dim, "dim_image": image.proj_dim,
                     "forced": sub.proj_dim + image.proj_dim >= s.n}
            if not entry["forced"]:
                entry["outcome"] = "no forced intersection"
                entries.append(entry)
                continue
            meet = intersect(sub, image)
            y = meet.point()
            home = s.region(a, side)
            partner = s.region(b, partner_side)
            # y = move(z) with z in V; z = move^-1(y)
            z = ProjPoint(np.linalg.inv(move.lift) @ y.coords)
            entry.update({
                "point": y.to_json(),
                "preimage_in_V": z.to_json(),
                "level_in_" + f"{side}_{a}": home.level(y),
                "level_in_" + f"{partner_side}_{b}": partner.level(y),
                "distance_to_V": sub.distance(y),
                "distance_to_image": image.distance(y),
            })
            in_home = home.level(y) < -tol
            in_partner = partner.level(y) < -tol
            if in_home and in_partner:
                entry["outcome"] = "regions overlap"
            elif in_home:
                entry["outcome"] = "mapping violated"
            else:
                entry["outcome"] = "subspace not inside region"
            entries.append(entry)
    if not entries:
        return ExclusionVerdict("NoCandidate", entries)
    if any(e.get("outcome") in ("regions overlap", "mapping violated") for e in entries):
        return ExclusionVerdict("Contradiction", entries)
    if all(not e["forced"] for e in entries):
        return ExclusionVerdict("NoForcedIntersection", entries)
    return ExclusionVerdict("NoCandidate", entries)


# --------------------------------------------------------------------------
# harness


@dataclass
class GeneratorAnalysis:
    generator: int
    bridge: Optional[BridgeSet]
    in_S: Optional[dict] = None
    in_R: Optional[dict] = None
    gap: Optional[dict] = None
    orbit: Optional[OrbitWitness] = None
    error: Optional[str] = None

    @property
    def both_chains(self) -> bool:
        return self.in_S is not None and self.in_R is not None

    def to_json(self):
        return {
            "generator": self.generator,
            "bridge": None if self.bridge is None else self.bridge.to_json(),
            "in_S_chain": self.in_S,
            "in_R_chain": self.in_R,
            "gap_point": self.gap,
            "gap_orbit_witness": None if self.orbit is None else self.orbit.to_json(),
            "error": self.error,
        }


@dataclass
class ObstructionReport:
    applicable: bool
    verdict: str
    verification: dict
    generators: List[GeneratorAnalysis]
    exclusion: Optional[ExclusionVerdict]
    witnesses: List[dict]
    notes: List[str]

    @property
    def has_witness(self) -> bool:
        return bool(self.witnesses)

    def to_json(self):
        return {
            "applicable": self.applicable,
            "verdict": self.verdict,
            "verification": self.verification,
            "generators": [g.to_json() for g in self.generators],
            "subspace_exclusion": None if self.exclusion is None else self.exclusion.to_json(),
            "witnesses": self.witnesses,
            "notes": self.notes,
        }


def _bridge_path(bridge: BridgeSet) -> List[tuple]:
    """Anchor points from the attracting class to the repelling class through the pivot.

    Consecutive anchors share a component, so straight segments between
    them stay inside the bridge.
    """
    top = bridge.limit_set[-1].point()
    bottom = bridge.limit_set[0].point()
    anchors = []
    if "C+" in [c.name for c in bridge.components]:
        anchors += [("L_top", top), ("w0", bridge.connectors["w0"].point)]
    if "C-" in [c.name for c in bridge.components]:
        anchors += [("v", bridge.connectors["v"].point), ("L_bottom", bottom)]
    return anchors


def _segment(a: np.ndarray, b: np.ndarray, count: int) -> np.ndarray:
    ip = np.vdot(a, b)
    if abs(ip) > 1e-15:
        b = b * np.conj(ip) / abs(ip)  # align phases so the chord avoids cancellation
    t = np.linspace(0.0, 1.0, count)[:, None]
    return (1 - t) * a[None, :] + t * b[None, :]


def _point_record(x: np.ndarray, s_depth: int, r_depth: int, extra=None) -> dict:
    rec = {"point": ProjPoint(x).to_json(), "S_chain_depth": int(s_depth), "R_chain_depth": int(r_depth)}
    if extra:
        rec.update(extra)
    return rec


def analyze_generator(s: SchottkyData, j: int, depth: int = CHAIN_DEPTH) -> GeneratorAnalysis:
    """Bridge of ``gamma_j`` walked from attractor to repeller against the depth-``depth`` chains."""
    gam = s.generators[j - 1]
    try:
        bridge = build_bridge(gam)
    except (FiniteOrder, DimensionMismatch, ArithmeticError) as exc:
        return GeneratorAnalysis(j, None, error=f"{type(exc).__name__}: {exc}")
    out = GeneratorAnalysis(j, bridge)
    if bridge.degenerate:
        out.error = "single modulus class: bridge is the limit set itself"
        return out
    s_chain = nested_region(s, j, "S", depth)
    r_chain = nested_region(s, j, "R", depth)
    anchors = _bridge_path(bridge)
    pts, labels = [], []
    for (na, a), (nb, b) in zip(anchors, anchors[1:]):
        seg = _segment(a.coords, b.coords, PATH_POINTS)
        pts.append(seg)
        comp = "L_pivot" if {na, nb} == {"w0", "v"} else ("C+" if "w0" in (na, nb) else "C-")
        labels += [comp] * len(seg)
    pts = np.vstack(pts)
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    sd = s_chain.depth_of(pts)
    rd = r_chain.depth_of(pts)
    in_s = np.nonzero(sd == depth)[0]
    in_r = np.nonzero(rd == depth)[0]
    if len(in_s):
        out.in_S = _point_record(pts[in_s[0]], sd[in_s[0]], rd[in_s[0]], {"component": labels[in_s[0]]})
    if len(in_r):
        i = in_r[-1]
        out.in_R = _point_record(pts[i], sd[i], rd[i], {"component": labels[i]})
    if len(in_s) and len(in_r):
        lo, hi = sorted((in_s[0], in_r[-1]))
        between = [i for i in range(lo, hi + 1) if sd[i] < depth and rd[i] < depth]
        if between:
            # prefer a gap point on one of the spans and far from L(gamma): there an orbit
            # witness starting off the bridge can be built
            spans = [i for i in between if labels[i] != "L_pivot"] or between
            dist = limit_set_distance(pts[spans], bridge.limit_set)
            i = spans[int(np.argmax(dist))]
            out.gap = _point_record(pts[i], sd[i], rd[i], {"component": labels[i],
                                                           "distance_to_limit_set": float(dist.max())})
            if labels[i] != "L_pivot":
                out.orbit = orbit_witness(bridge, pts[i], labels[i])
    return out


def contradiction_harness(s: SchottkyData, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                          depth: int = CHAIN_DEPTH) -> ObstructionReport:
    """Run verification, bridge analysis and subspace exclusion on candidate data."""
    report = verify_schottky(s, samples=samples, seed=seed)
    if s.n % 2 == 1:
        return ObstructionReport(False, "not applicable: odd dimension", report.to_dict(), [], None, [],
                                 [f"P^{s.n} is odd-dimensional; verification status {report.status}"])
    notes = ["bridge sets are built without separately verifying that the complement of the "
             "discontinuity region contains no projective subspace of dimension >= n"]
    if report.axioms["disjointness"].status == FAIL:
        wit = {"kind": "axiom failure", **report.first_witness()}
        return ObstructionReport(True, "axiom failure: disjointness", report.to_dict(), [], None, [wit], notes)
    analyses = ordered_map(lambda j: analyze_generator(s, j, depth), range(1, s.g + 1))
    exclusion = subspace_exclusion_check(s)
    witnesses = []
    for a in analyses:
        if a.both_chains:
            witnesses.append({"kind": "bridge meets both chains", "generator": a.generator,
                              "in_S_chain": a.in_S, "in_R_chain": a.in_R, "gap_point": a.gap})
    for e in exclusion.witnesses():
        witnesses.append({"kind": "subspace exclusion", **e})
    failed = [name for name, ax in report.axioms.items() if ax.status == FAIL]
    for name in failed:
        witnesses.append({"kind": "axiom failure", **report.first_witness()} if name == failed[0] else
                         {"kind": "axiom failure", "axiom": name, **(report.axioms[name].witness or {})})
    if any(a.both_chains for a in analyses):
        verdict = "contradiction: a connected bridge set meets both depth-%d chains" % depth
    elif failed:
        verdict = "axiom failure: " + ", ".join(failed)
    elif exclusion.status == "Contradiction":
        verdict = "contradiction: subspace exclusion"
    else:
        verdict = "no witness found"
    return ObstructionReport(True, verdict, report.to_dict(), analyses, exclusion, witnesses, notes)


# --------------------------------------------------------------------------
# candidates


def diagonal_candidate(eigenvalues: Sequence[complex] = (4.0, 2.0, 1.0), radius: float = 0.3,
                       conjugator: Optional[np.ndarray] = None) -> SchottkyData:
    """Two-generator candidate: a diagonal map and a unitary conjugate of it.

    Each generator gets a ball of Fubini-Study ``radius`` around its
    repelling eigenvector as ``R`` and around its attracting eigenvector
    as ``S``.
    """
    lam = np.asarray(eigenvalues, dtype=complex)
    n1 = lam.size
    order = np.argsort(np.abs(lam))
    e = np.eye(n1)
    g1 = np.diag(lam)
    h = np.asarray(conjugator, dtype=complex) if conjugator is not None else _default_conjugator(n1)
    gens, regions = [], []
    for u in (np.eye(n1), h):
        gens.append(ProjMap(u @ g1 @ np.linalg.inv(u)))
        regions.append((ball_region(u @ e[:, order[0]], radius), ball_region(u @ e[:, order[-1]], radius)))
    return SchottkyData(n=n1 - 1, generators=gens, regions=regions)


def _default_conjugator(n1: int) -> np.ndarray:
    # discrete Fourier matrix: moves every coordinate axis to a direction equidistant from all axes
    j = np.arange(n1)
    return np.exp(2j * np.pi * np.outer(j, j) / n1) / np.sqrt(n1)


def random_candidate(seed: int, n: int = 2, g: int = 2) -> SchottkyData:
    """Seeded candidate on P^n: random loxodromic-type generators with ball regions at their
    extreme eigenvectors."""
    rng = np.random.default_rng(seed)
    n1 = n + 1
    gens, regions = [], []
    for _ in range(g):
        mods = np.sort(np.exp(rng.uniform(-1.5, 1.5, n1)))
        # enforce gaps above 1.2 between consecutive moduli
        for i in range(1, n1):
            mods[i] = max(mods[i], 1.3 * mods[i - 1])
        lam = mods * np.exp(1j * rng.uniform(0, 2 * np.pi, n1))
        z = rng.standard_normal((n1, n1)) + 1j * rng.standard_normal((n1, n1))
        h, _ = np.linalg.qr(z)
        h = h @ (np.eye(n1) + 0.2 * np.triu(rng.standard_normal((n1, n1)), 1))
        gm = ProjMap(h @ np.diag(lam) @ np.linalg.inv(h))
        radius = rng.uniform(0.1, 0.35)
        regions.append((ball_region(h[:, 0], radius), ball_region(h[:, -1], radius)))
        gens.append(gm)
    return SchottkyData(n=n, generators=gens, regions=regions)
