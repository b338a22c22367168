"""Schottky data on P^n: construction, axiom verification and word dynamics.

Schottky data consist of ``g`` projective maps ``gamma_j`` together with
``2g`` open quadric regions ``R_j, S_j`` such that

1. each region is the interior of its closure,
2. the closures of the ``2g`` regions are pairwise disjoint, and
3. ``gamma_j(R_j)`` is the complement of the closure of ``S_j``.

Under these axioms a reduced word whose leading letter is ``gamma_j^{+1}``
(resp. ``gamma_j^{-1}``) maps the interior of the fundamental domain
``F = P^n - U (R_j u S_j)`` into ``S_j`` (resp. ``R_j``) -- the ping-pong
mechanism that makes the group free.

The builder :func:`nori_build` realizes such data on P^{2k+1}: each
generator scales an adapted basis ``[L_{g+j} | L_j]`` by ``diag(lam, 1)``
with ``lam = 1/alpha - 1``, ``R_j = {phi_j < alpha}`` is a neighbourhood
of the repelling k-plane ``L_j`` and ``S_j = {phi_j > 1 - alpha}`` one of
the attracting k-plane ``L_{g+j}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .config import DEFAULT_SAMPLES, ordered_map
from .errors import (
    AlphaOutOfRange,
    BadDimension,
    DimensionMismatch,
    ParseError,
    PointNotInDomain,
    SubspacesNotDisjoint,
)
from .projective import ProjPoint, ProjSubspace, canonical_rows, fs_distance_rows, intersect, random_unit_vectors
from .psl import ProjMap
from .regions import (
    BOUNDARY_TOL,
    Certificate,
    CounterexamplePoint,
    QuadricRegion,
    region_disjoint,
    region_image,
)
from .words import ReducedWord, enumerate_reduced_words

SIDES = ("R", "S")


# --------------------------------------------------------------------------
# data


@dataclass
class SchottkyData:
    """Generators and their paired regions ``regions[j] = (R_j, S_j)``.

    ``construction`` optionally records how the data were built (for
    instance the Nori parameters); it is informational only.
    """

    n: int
    generators: List[ProjMap]
    regions: List[tuple]
    construction: Optional[dict] = None

    def __post_init__(self):
        if len(self.generators) != len(self.regions):
            raise DimensionMismatch("need exactly one region pair per generator")
        for gen in self.generators:
            if gen.ambient_dim != self.n:
                raise DimensionMismatch(f"generator acts on P^{gen.ambient_dim}, data live on P^{self.n}")
        for pair in self.regions:
            for r in pair:
                if r.ambient_dim != self.n:
                    raise DimensionMismatch(f"region in P^{r.ambient_dim}, data live on P^{self.n}")

    @property
    def g(self) -> int:
        return len(self.generators)

    def region(self, j: int, side: str) -> QuadricRegion:
        """Region ``R_j`` or ``S_j`` for a 1-based generator index ``j``."""
        return self.regions[j - 1][SIDES.index(side)]

    def labelled_regions(self):
        """``[((j, side), region), ...]`` in the order R_1, S_1, R_2, S_2, ..."""
        return [((j + 1, side), pair[k]) for j, pair in enumerate(self.regions) for k, side in enumerate(SIDES)]

    def to_json(self):
        out = {
            "n": self.n,
            "generators": [g.to_json() for g in self.generators],
            "regions": [{"R": r.to_json(), "S": s.to_json()} for r, s in self.regions],
        }
        if self.construction is not None:
            out["construction"] = self.construction
        return out

    @classmethod
    def from_json(cls, data) -> "SchottkyData":
        if not isinstance(data, dict) or not {"n", "generators", "regions"} <= set(data):
            raise ParseError("Schottky data need keys 'n', 'generators' and 'regions'")
        n = data["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParseError(f"'n' must be a positive integer, got {n!r}")
        if not isinstance(data["generators"], list) or not isinstance(data["regions"], list):
            raise ParseError("'generators' and 'regions' must be lists")
        gens = [ProjMap.from_json(g) for g in data["generators"]]
        regions = []
        for item in data["regions"]:
            if not isinstance(item, dict) or set(item) != {"R", "S"}:
                raise ParseError("each region entry needs keys 'R' and 'S'")
            regions.append((QuadricRegion.from_json(item["R"]), QuadricRegion.from_json(item["S"])))
        try:
            return cls(n=n, generators=gens, regions=regions, construction=data.get("construction"))
        except DimensionMismatch as exc:
            raise ParseError(str(exc)) from exc

    def __eq__(self, other):
        if not isinstance(other, SchottkyData):
            return NotImplemented
        return (self.n == other.n and self.generators == other.generators
                and all(a == c and b == d for (a, b), (c, d) in zip(self.regions, other.regions))
                and len(self.regions) == len(other.regions) and self.construction == other.construction)


# --------------------------------------------------------------------------
# Nori construction


def _cp1_point(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def _default_cp1_points(g: int) -> List[np.ndarray]:
    """``2g`` well-separated points of CP^1, listed as L_1..L_g then L_{g+1}..L_{2g}."""
    if g == 1:
        # repeller = last block of coordinates, attractor = first block
        return [np.array([0.0, 1.0]), np.array([1.0, 0.0])]
    if g == 2:
        # vertices of a regular tetrahedron on the Riemann sphere
        th = np.arccos(-1.0 / 3.0)
        return [np.array([1.0, 0.0])] + [_cp1_point(th, 2 * np.pi * i / 3) for i in range(3)]
    if g == 3:
        # octahedron: antipodal (orthogonal) pairs j <-> g + j
        axes = [(0.0, 0.0), (np.pi / 2, 0.0), (np.pi / 2, np.pi / 2)]
        first = [_cp1_point(t, p) for t, p in axes]
        second = [_cp1_point(np.pi - t, p + np.pi) for t, p in axes]
        return first + second
    # golden-spiral points on the sphere
    m = 2 * g
    idx = np.arange(m) + 0.5
    thetas = np.arccos(1 - 2 * idx / m)
    phis = np.pi * (1 + 5**0.5) * idx
    return [_cp1_point(t, p) for t, p in zip(thetas, phis)]


def default_nori_subspaces(n: int, g: int) -> List[ProjSubspace]:
    """Default pairwise-disjoint k-planes ``L_1..L_2g`` in P^{2k+1}.

    Each is ``l_i (x) C^{k+1}`` for a point ``l_i`` of CP^1, so two of them
    meet only if the CP^1 points coincide.  For ``g = 2`` the points form
    a regular tetrahedron, making every pair of planes isoclinic at the
    largest possible angle; ``g = 1`` uses the two coordinate blocks.
    """
    k = (n - 1) // 2
    return [ProjSubspace(np.kron(l.reshape(2, 1), np.eye(k + 1))) for l in _default_cp1_points(g)]


def phi_forms(attracting: ProjSubspace, repelling: ProjSubspace):
    """Hermitian pair ``(A, B)`` with ``phi(x) = x*Ax / x*Bx``.

    ``phi`` is the share of ``x`` on ``attracting`` in coordinates adapted
    to ``C^{n+1} = attracting (+) repelling``: 1 on the attracting plane,
    0 on the repelling one.
    """
    p = np.hstack([attracting.basis, repelling.basis])
    pinv = np.linalg.inv(p)
    top = attracting.basis.shape[1]
    q = np.zeros(p.shape)
    q[:top, :top] = np.eye(top)
    a = pinv.conj().T @ q @ pinv
    b = pinv.conj().T @ pinv
    return 0.5 * (a + a.conj().T), 0.5 * (b + b.conj().T)


def phi_values(forms, xs: np.ndarray) -> np.ndarray:
    a, b = forms
    xs = np.atleast_2d(np.asarray(xs, dtype=complex))
    num = np.einsum("ij,jk,ik->i", xs.conj(), a, xs).real
    den = np.einsum("ij,jk,ik->i", xs.conj(), b, xs).real
    return num / den


def phi_below(forms, t: float) -> QuadricRegion:
    """``{phi < t}``."""
    a, b = forms
    return QuadricRegion(a, t * b)


def phi_above(forms, t: float) -> QuadricRegion:
    """``{phi > t}``, i.e. ``{t B - A < 0}`` with denominator ``B``."""
    a, b = forms
    return QuadricRegion((1 + t) * b - a, b)


def phi_transfer(t, lam_abs: float):
    """Threshold map ``t -> |lam|^2 t / (|lam|^2 t + 1 - t)`` of a Nori generator on ``phi``."""
    l2 = lam_abs**2
    return l2 * t / (l2 * t + 1 - t)


def nori_build(n: int, g: int, alpha: float, subspace_config=None) -> SchottkyData:
    """Nori's Schottky data on P^n, ``n = 2k + 1``.

    Args:
        n: odd ambient dimension.
        g: number of generators (``g = 1`` is allowed; the verifier flags it).
        alpha: region width in ``(0, 1/2)``; ``|lam| = 1/alpha - 1``.
        subspace_config: ``None`` / ``"coordinate-default"`` for
            :func:`default_nori_subspaces`, else a list of ``2g``
            pairwise-disjoint k-dimensional :class:`ProjSubspace`.

    Raises:
        BadDimension: ``n`` even or nonpositive, ``g < 1``, or a subspace of the wrong dimension.
        SubspacesNotDisjoint: two of the given k-planes meet.
        AlphaOutOfRange: ``alpha`` not strictly between 0 and 1/2.
    """
    if not isinstance(n, (int, np.integer)) or n < 1 or n % 2 == 0:
        raise BadDimension(f"Nori's construction needs odd n, got {n}")
    if g < 1:
        raise BadDimension(f"need at least one generator, got g = {g}")
    if not 0.0 < alpha < 0.5:
        raise AlphaOutOfRange(f"alpha must lie in (0, 1/2), got {alpha}")
    k = (n - 1) // 2
    if subspace_config is None or (isinstance(subspace_config, str) and subspace_config == "coordinate-default"):
        lines = default_nori_subspaces(n, g)
    else:
        lines = list(subspace_config)
    if len(lines) != 2 * g:
        raise BadDimension(f"need {2 * g} subspaces, got {len(lines)}")
    for i, l in enumerate(lines):
        if l.ambient_dim != n or l.proj_dim != k:
            raise BadDimension(f"subspace {i + 1} must be a {k}-plane in P^{n}")
    for i in range(2 * g):
        for j in range(i + 1, 2 * g):
            if intersect(lines[i], lines[j]) is not None:
                raise SubspacesNotDisjoint(f"L_{i + 1} and L_{j + 1} intersect")
    lam = 1.0 / alpha - 1.0
    gens, regions = [], []
    for j in range(g):
        attr, rep = lines[g + j], lines[j]
        p = np.hstack([attr.basis, rep.basis])
        scale = np.diag([lam] * (k + 1) + [1.0] * (k + 1)).astype(complex)
        gens.append(ProjMap(p @ scale @ np.linalg.inv(p)))
        forms = phi_forms(attr, rep)
        regions.append((phi_below(forms, alpha), phi_above(forms, 1.0 - alpha)))
    construction = {
        "kind": "nori",
        "alpha": float(alpha),
        "lambda": float(lam),
        "subspaces": [l.to_json() for l in lines],
    }
    return SchottkyData(n=n, generators=gens, regions=regions, construction=construction)


def nori_subspaces(s: SchottkyData) -> List[ProjSubspace]:
    if not s.construction or s.construction.get("kind") != "nori":
        raise ValueError("data were not produced by the Nori builder")
    return [ProjSubspace.from_json(x) for x in s.construction["subspaces"]]


def nori_phi(s: SchottkyData, j: int, xs: np.ndarray) -> np.ndarray:
    """``phi_j`` on the rows of ``xs`` for Nori-built data."""
    lines = nori_subspaces(s)
    return phi_values(phi_forms(lines[s.g + j - 1], lines[j - 1]), xs)


# --------------------------------------------------------------------------
# verification


PASS, FAIL, UNKNOWN = "PASS", "FAIL", "UNKNOWN"


@dataclass
class AxiomResult:
    status: str
    details: dict = field(default_factory=dict)
    witness: Optional[dict] = None

    def to_dict(self):
        return {"status": self.status, "details": self.details, "witness": self.witness}

    @classmethod
    def from_dict(cls, data) -> "AxiomResult":
        return cls(status=data["status"], details=data.get("details", {}), witness=data.get("witness"))


@dataclass
class VerificationReport:
    axioms: dict  # name -> AxiomResult, in check order
    notes: List[str] = field(default_factory=list)
    samples: int = 0
    seed: int = 0

    @property
    def status(self) -> str:
        states = [a.status for a in self.axioms.values()]
        if FAIL in states:
            return FAIL
        if UNKNOWN in states:
            return UNKNOWN
        return PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def first_witness(self) -> Optional[dict]:
        for name, a in self.axioms.items():
            if a.status == FAIL and a.witness is not None:
                return {"axiom": name, **a.witness}
        return None

    def to_dict(self):
        return {
            "status": self.status,
            "axioms": {k: v.to_dict() for k, v in self.axioms.items()},
            "notes": list(self.notes),
            "samples": self.samples,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data) -> "VerificationReport":
        return cls(axioms={k: AxiomResult.from_dict(v) for k, v in data["axioms"].items()},
                   notes=list(data.get("notes", [])), samples=data.get("samples", 0), seed=data.get("seed", 0))


def _label(j: int, side: str) -> str:
    return f"{side}_{j}"


def check_regular(s: SchottkyData) -> AxiomResult:
    """Interior-of-closure axiom via the signature of each difference form."""
    bad = []
    for (j, side), r in s.labelled_regions():
        if not r.regular:
            ev = np.linalg.eigvalsh(r.form)
            bad.append({"region": _label(j, side), "form_eigenvalues": [float(x) for x in ev]})
    if bad:
        return AxiomResult(FAIL, {"irregular": [b["region"] for b in bad]}, witness=bad[0])
    return AxiomResult(PASS, {"regions": 2 * s.g, "rule": "difference form indefinite"})


def check_disjoint(s: SchottkyData, seed: int = 0, tol: float = BOUNDARY_TOL) -> AxiomResult:
    """Pairwise disjointness of the closures of all 2g regions."""
    labelled = s.labelled_regions()
    pairs = [(a, b) for i, a in enumerate(labelled) for b in labelled[i + 1:]]
    results = ordered_map(lambda ab: region_disjoint(ab[0][1], ab[1][1], tol=tol, seed=seed), pairs)
    certs, unknown = [], []
    for ((la, _), (lb, _)), res in zip(pairs, results):
        names = [_label(*la), _label(*lb)]
        if isinstance(res, CounterexamplePoint):
            return AxiomResult(FAIL, {"pair": names},
                               witness={"pair": names, "point": res.point.to_json(), "levels": list(res.levels)})
        if isinstance(res, Certificate):
            certs.append({"pair": names, "mu": res.mu, "margin": res.margin})
        else:
            unknown.append({"pair": names, **res.to_json()})
    if unknown:
        return AxiomResult(UNKNOWN, {"certificates": certs, "undecided": unknown})
    return AxiomResult(PASS, {"certificates": certs,
                              "min_margin": min(c["margin"] for c in certs) if certs else None})


def check_mapping(s: SchottkyData, samples: int, seed: int = 0, tol: float = BOUNDARY_TOL,
                  exact_tol: float = 1e-9) -> AxiomResult:
    """``gamma_j(R_j) = P^n - closure(S_j)``: exact form comparison, else two-sided sampling."""
    details, sampled_only = [], []
    rng = np.random.default_rng(seed)
    for j in range(1, s.g + 1):
        gam = s.generators[j - 1]
        image = region_image(s.region(j, "R"), gam)
        target = s.region(j, "S").complement()
        c = image.proportional_to(target, exact_tol)
        if c is not None:
            resid = float(np.linalg.norm(image.form - c * target.form) / np.linalg.norm(image.form))
            details.append({"generator": j, "method": "exact", "scale": c, "residual": resid})
            continue
        xs = random_unit_vectors(rng, s.n + 1, samples)
        # forward: points of R_j pushed by gamma_j; backward: points off closure(S_j) pulled back
        fwd = xs[s.region(j, "R").contains_rows(xs, tol)] @ gam.lift.T
        bwd_src = xs[target.contains_rows(xs, tol)]
        bwd = bwd_src @ np.linalg.inv(gam.lift).T
        bad_f = np.nonzero(target.levels(fwd) > tol)[0] if len(fwd) else []
        bad_b = np.nonzero(s.region(j, "R").levels(bwd) > tol)[0] if len(bwd) else []
        if len(bad_f):
            x = fwd[bad_f[0]]
            return AxiomResult(FAIL, {"generator": j, "method": "sampled"}, witness={
                "generator": j, "direction": "gamma(R) not inside complement of closure(S)",
                "point": ProjPoint(x).to_json(), "level_in_S": float(s.region(j, "S").level(x))})
        if len(bad_b):
            y = bwd_src[bad_b[0]]
            return AxiomResult(FAIL, {"generator": j, "method": "sampled"}, witness={
                "generator": j, "direction": "complement of closure(S) not inside gamma(R)",
                "point": ProjPoint(y).to_json(),
                "level_of_preimage_in_R": float(s.region(j, "R").level(bwd[bad_b[0]]))})
        details.append({"generator": j, "method": "sampled", "samples": samples,
                        "forward_checked": int(len(fwd)), "backward_checked": int(len(bwd))})
        sampled_only.append(j)
    if sampled_only:
        return AxiomResult(UNKNOWN, {"generators": details,
                                     "reason": "no counterexample among samples, no exact identity"})
    return AxiomResult(PASS, {"generators": details})


def verify_schottky(s: SchottkyData, samples: int = DEFAULT_SAMPLES, seed: int = 0,
                    tol: float = BOUNDARY_TOL, exact_tol: float = 1e-9) -> VerificationReport:
    """Check the Schottky axioms; every finding goes into the report."""
    axioms = {
        "generator_count": (AxiomResult(PASS, {"g": s.g}) if s.g >= 2 else
                            AxiomResult(FAIL, {"g": s.g}, witness={"g": s.g, "required": 2})),
        "interior_of_closure": check_regular(s),
        "disjointness": check_disjoint(s, seed, tol),
        "mapping": check_mapping(s, samples, seed, tol, exact_tol),
    }
    notes = [f"boundary tolerance {tol:g}; sampling seed {seed}"]
    if s.construction and s.construction.get("kind") == "nori":
        a = s.construction["alpha"]
        notes.append(
            f"S_j uses the threshold phi_j > 1 - alpha = {1 - a:g}. With lambda = 1/alpha - 1 the image "
            f"of {{phi_j < alpha}} is exactly {{phi_j < 1 - alpha}}; the threshold phi_j > alpha would "
            f"make the closures of R_j and S_j share the level set phi_j = alpha and break the pairing.")
    return VerificationReport(axioms=axioms, notes=notes, samples=samples, seed=seed)


# --------------------------------------------------------------------------
# fundamental domain


@dataclass(frozen=True)
class Membership:
    kind: str  # "InteriorF", "BoundaryF" or "InRegion"
    j: Optional[int] = None
    side: Optional[str] = None

    def __str__(self):
        return self.kind if self.kind != "InRegion" else f"InRegion({self.j}, {self.side})"


def region_levels(s: SchottkyData, xs: np.ndarray) -> np.ndarray:
    """Levels of every region at every row: shape ``(len(xs), 2g)``, order R_1, S_1, R_2, ..."""
    return np.stack([r.levels(xs) for _, r in s.labelled_regions()], axis=1)


def fundamental_domain_membership(s: SchottkyData, p, tol: float = BOUNDARY_TOL) -> Membership:
    """Classify a point as inside a region, on the boundary of F, or in Int(F)."""
    x = p.coords if isinstance(p, ProjPoint) else np.asarray(p, dtype=complex)
    lv = region_levels(s, x[None, :])[0]
    labels = [lab for lab, _ in s.labelled_regions()]
    i = int(np.argmin(lv))
    if lv[i] < -tol:
        return Membership("InRegion", *labels[i])
    if lv[i] <= tol:
        return Membership("BoundaryF")
    return Membership("InteriorF")


def interior_mask(s: SchottkyData, xs: np.ndarray, tol: float = BOUNDARY_TOL) -> np.ndarray:
    return np.all(region_levels(s, xs) > tol, axis=1)


def sample_interior_points(s: SchottkyData, count: int, seed: int = 0, tol: float = BOUNDARY_TOL,
                           max_draws: int = 10**7) -> np.ndarray:
    """``count`` seeded unit vectors in Int(F) by rejection sampling.

    Raises:
        PointNotInDomain: the sampler saw no interior point within ``max_draws`` draws.
    """
    rng = np.random.default_rng(seed)
    found, drawn = [], 0
    total = 0
    while total < count:
        if drawn >= max_draws:
            raise PointNotInDomain(f"only {total} interior points in {drawn} draws")
        xs = random_unit_vectors(rng, s.n + 1, 4096)
        drawn += len(xs)
        keep = xs[interior_mask(s, xs, tol)]
        found.append(keep)
        total += len(keep)
    return canonical_rows(np.vstack(found)[:count])


# --------------------------------------------------------------------------
# words


def word_image_region(s: SchottkyData, w) -> tuple:
    """Region ``(j, side)`` that ``w`` sends Int(F) into: ``S_j`` if the leading exponent is +1, else ``R_j``.

    Raises:
        NotReduced: ``w`` is not reduced.
    """
    w = w if isinstance(w, ReducedWord) else ReducedWord(w)
    i, e = w.leading
    if i > s.g:
        raise ValueError(f"word uses generator {i} but data have {s.g}")
    return i, ("S" if e == 1 else "R")


@dataclass
class WordCheck:
    words: int
    points: int
    violations: list  # [{"word", "point_index", "predicted", "level"}]
    min_margin: float  # largest predicted-region level seen (negative means all contained)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_word_images(s: SchottkyData, words: Sequence, xs: np.ndarray, tol: float = 0.0) -> WordCheck:
    """Map each point of ``xs`` through each nonempty word and test the predicted region."""
    violations = []
    worst = -np.inf
    count = 0
    for w in words:
        w = w if isinstance(w, ReducedWord) else ReducedWord(w)
        if not len(w):
            continue
        count += 1
        j, side = word_image_region(s, w)
        ys = xs @ w.lift(s.generators).T
        lv = s.region(j, side).levels(ys)
        worst = max(worst, float(lv.max()))
        for i in np.nonzero(lv >= -tol)[0]:
            violations.append({"word": w.to_json(), "point_index": int(i),
                               "predicted": _label(j, side), "level": float(lv[i])})
    return WordCheck(words=count, points=len(xs), violations=violations, min_margin=-worst)


def word_displacement(s: SchottkyData, w, xs: np.ndarray) -> float:
    """Largest Fubini-Study distance between ``x`` and ``w(x)`` over the rows of ``xs``."""
    w = w if isinstance(w, ReducedWord) else ReducedWord(w)
    ys = xs @ w.lift(s.generators).T
    xs_n = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    ys_n = ys / np.linalg.norm(ys, axis=1, keepdims=True)
    ip = np.abs(np.einsum("ij,ij->i", xs_n.conj(), ys_n))
    sin = np.sqrt(np.maximum(0.0, 1.0 - ip**2))
    return float(np.arctan2(sin, ip).max())


def in_f_k(s: SchottkyData, xs: np.ndarray, k: int, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Membership in ``F_k = U_{|w| <= k} w(Int F)``: some ``w^-1(x)`` lies in Int(F)."""
    hit = np.zeros(len(xs), dtype=bool)
    for w in enumerate_reduced_words(s.g, k):
        pre = xs @ w.inverse().lift(s.generators).T
        hit |= interior_mask(s, pre, tol)
    return hit


# --------------------------------------------------------------------------
# nested chains and accumulation


@dataclass
class NestedChain:
    """``base, step(base), step^2(base), ...`` with ``step = gamma`` (side S) or ``gamma^-1`` (side R).

    The explicit form pairs are built on first use of :attr:`regions`;
    membership queries never need them because they pull points back
    to ``base`` instead, which stays well conditioned at any depth.
    """

    generator: ProjMap
    side: str
    base: QuadricRegion
    depth: int
    _regions: Optional[List[QuadricRegion]] = field(default=None, repr=False)

    @property
    def regions(self) -> List[QuadricRegion]:
        """Exact images ``step^d(base)``, ``d = 0..depth``.

        Raises:
            ValueError: an image form is numerically indefinite (very deep chains).
        """
        if self._regions is None:
            step = ProjMap._normalized(self.step())
            regions = [self.base]
            for _ in range(self.depth):
                regions.append(region_image(regions[-1], step))
            self._regions = regions
        return self._regions

    def step(self) -> np.ndarray:
        return self.generator.lift if self.side == "S" else np.linalg.inv(self.generator.lift)

    def levels_at_depth(self, xs: np.ndarray, d: int) -> np.ndarray:
        """Level of ``step^d(base)`` at ``xs``, evaluated on the pulled-back points."""
        back = np.linalg.inv(self.step())
        ys = np.atleast_2d(np.asarray(xs, dtype=complex))
        for _ in range(d):
            ys = ys @ back.T
            ys = ys / np.linalg.norm(ys, axis=1, keepdims=True)
        return self.base.levels(ys)

    def depth_of(self, xs: np.ndarray) -> np.ndarray:
        """Deepest ``d <= depth`` with the point inside ``step^d(base)``; -1 if outside ``base``."""
        xs = np.atleast_2d(np.asarray(xs, dtype=complex))
        back = np.linalg.inv(self.step())
        out = np.full(len(xs), -1)
        alive = np.ones(len(xs), dtype=bool)
        ys = xs / np.linalg.norm(xs, axis=1, keepdims=True)
        for d in range(self.depth + 1):
            if d:
                ys = ys @ back.T
                ys = ys / np.linalg.norm(ys, axis=1, keepdims=True)
            alive &= self.base.levels(ys) < 0
            out[alive] = d
        return out

    def nesting_certificates(self, seed: int = 0):
        """Certificates that each closure ``closure(C_{d+1})`` avoids ``P^n - C_d``."""
        regions = self.regions
        return [region_disjoint(regions[d + 1], regions[d].complement(), seed=seed)
                for d in range(self.depth)]


def nested_region(s: SchottkyData, j: int, side: str, depth: int) -> NestedChain:
    """Chain ``gamma_j^{k}(S_j)`` (side S) or ``gamma_j^{-k}(R_j)`` (side R) for ``k = 0..depth``."""
    if side not in SIDES:
        raise ValueError(f"side must be 'R' or 'S', got {side!r}")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    return NestedChain(generator=s.generators[j - 1], side=side, base=s.region(j, side), depth=depth)


@dataclass
class AccumulationEstimate:
    points: List[ProjPoint]  # accepted cluster points
    hits: List[int]
    orbit_index: List[int]  # iterate index m of each cluster representative (per start point)
    start_index: List[int]
    chain_depth: int
    in_chain: List[bool]  # representative lies in step^{chain_depth}(base)
    backward: bool

    @property
    def all_in_chain(self) -> bool:
        return all(self.in_chain)

    def rows(self):
        for p, h, m, i, c in zip(self.points, self.hits, self.orbit_index, self.start_index, self.in_chain):
            yield [i, m, h, int(c)] + [float(v) for z in p.coords for v in (z.real, z.imag)]


def _orbit(step: np.ndarray, x: np.ndarray, m_max: int) -> np.ndarray:
    out = np.empty((m_max + 1, x.size), dtype=complex)
    y = x / np.linalg.norm(x)
    out[0] = y
    for m in range(1, m_max + 1):
        y = step @ y
        y = y / np.linalg.norm(y)
        out[m] = y
    return out


def accumulation_estimate(s: SchottkyData, j: int, p_set: Sequence, m_max: int, backward: bool = False,
                          radius: float = 1e-5, min_hits: int = 5, tol: float = BOUNDARY_TOL) -> AccumulationEstimate:
    """Cluster points of ``gamma_j^{m}(p)`` (or ``gamma_j^{-m}``) for ``m <= m_max``.

    A point ``q`` is a cluster point when at least ``min_hits`` iterates
    beyond ``m_max/2`` lie within ``radius`` of it.  Each representative
    ``q = gamma^m(p)`` is tested against the depth ``d = m_max // 2``
    region of the S-chain (R-chain when ``backward``) through the exact
    pull-back ``gamma^{-d}(q) = gamma^{m-d}(p)``.

    Start points must lie in Int(F) or in the forward-invariant region
    (``S_j`` forward, ``R_j`` backward).

    Raises:
        PointNotInDomain: a start point is elsewhere.
    """
    side = "R" if backward else "S"
    base = s.region(j, side)
    gen = s.generators[j - 1]
    step = np.linalg.inv(gen.lift) if backward else gen.lift
    d = m_max // 2
    out = AccumulationEstimate([], [], [], [], d, [], backward)
    for idx, p in enumerate(p_set):
        x = p.coords if isinstance(p, ProjPoint) else np.asarray(p, dtype=complex)
        if not (interior_mask(s, x[None, :], tol)[0] or base.levels(x)[0] < -tol):
            raise PointNotInDomain(f"start point {idx} is neither in Int(F) nor in {_label(j, side)}")
        orbit = _orbit(step, x, m_max)
        late = list(range(m_max // 2 + 1, m_max + 1))
        remaining = late[:]
        while remaining:
            m = remaining[-1]
            dist = fs_distance_rows(orbit[remaining], orbit[m])
            near = dist <= radius
            if int(near.sum()) >= min_hits:
                out.points.append(ProjPoint(orbit[m]))
                out.hits.append(int(near.sum()))
                out.orbit_index.append(m)
                out.start_index.append(idx)
                out.in_chain.append(bool(base.levels(orbit[m - d])[0] < 0))
            remaining = [t for t, nb in zip(remaining, near) if not nb]
    return out
