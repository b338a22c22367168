"""Binomially normalized iteration of linear maps.

For a linear map ``T`` whose eigenvalues all have modulus one, the
sequence ``binom(m, k)^-1 T^m v`` has nonzero cluster points inside the
eigenvector span of ``T`` for exactly one exponent ``k = k(v, T)``: the
largest Jordan "height" of the components of ``v``, minus one.  This
module computes that index from kernel filtrations, tabulates the decay
of ``lam^-m binom(m, l) T^m v`` under a spectral gap, and follows the
dominant modulus class of a projective orbit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

import numpy as np
import scipy.linalg

from .errors import IllConditioned, NonUnitarySpectrum, SpectralRadiusViolation, ZeroVector
from .projective import RANK_RTOL, ProjPoint, ProjSubspace, canonical_rows, distance_rows_to_subspace, null_space
from .psl import CLUSTER_GAP, ProjMap, cluster_eigenvalues, defective_gap, eigenvector_span, modulus_decomposition

UNIT_TOL = 1e-8
WITNESS_M = 10**4
DECAY_THRESHOLD = 1e-8
DIVERGENCE_THRESHOLD = 1e6
VANISH_THRESHOLD = 1e-6
COMPONENT_RTOL = 1e-9


def binom(m: int, l: int) -> float:
    """Binomial coefficient ``C(m, l)`` as a float, built multiplicatively.

    Returns 0 for ``l > m``.
    """
    if l < 0 or l > m:
        return 0.0
    l = min(l, m - l)
    out = 1.0
    for i in range(1, l + 1):
        out *= (m - l + i) / i
    return out


def binom_ratio_bound(m: int, l: int, k: int, corrected: bool = False) -> tuple[Fraction, Fraction]:
    """Exact ``C(m, l) / C(m, k)`` and a bound for it, for ``l < k < m``.

    The ratio is the telescoping product ``prod_{j=l}^{k-1} (j+1)/(m-j)``.
    The default bound is ``(k / (m - l))^(k - l)``; it holds whenever
    ``2k <= m`` (the regime of fixed ``k, l`` and growing ``m``) but can
    fail when ``k > m/2``, e.g. ``m, l, k = 5, 2, 4`` gives ratio 2 against
    16/9.  ``corrected=True`` bounds every factor by its largest value
    instead and returns ``(k / (m - k + 1))^(k - l)``, valid for all
    ``l < k < m``.
    """
    if not 0 <= l < k < m:
        raise ValueError("need 0 <= l < k < m")
    ratio = Fraction(1)
    for j in range(l, k):
        ratio *= Fraction(j + 1, m - j)
    denom = m - k + 1 if corrected else m - l
    return ratio, Fraction(k, denom) ** (k - l)


def jordan_block(lam: complex, size: int) -> np.ndarray:
    """Upper-triangular Jordan block with ``lam`` on the diagonal and ones above it."""
    return lam * np.eye(size, dtype=complex) + np.eye(size, k=1, dtype=complex)


def jordan_power(lam: complex, size: int, m: int) -> np.ndarray:
    """Closed form of ``jordan_block(lam, size)**m``: entry (i, j) is ``C(m, j-i) lam^(m-j+i)``."""
    out = np.zeros((size, size), dtype=complex)
    for d in range(min(size, m + 1)):
        val = math.comb(m, d) * complex(lam) ** (m - d)
        for i in range(size - d):
            out[i, i + d] = val
    return out


# --------------------------------------------------------------------------
# k-index


@dataclass
class KIndexReport:
    k: int
    witness_limit: np.ndarray
    residual: float
    heights: dict = field(default_factory=dict)  # eigenvalue -> Jordan height of that component


def generalized_eigenspaces(t: np.ndarray, gap: float = CLUSTER_GAP):
    """``[(lam, G, N)]``: orthonormal basis ``G`` of each generalized eigenspace
    and the nilpotent part ``N = G^H t G - lam I`` of the restriction.

    Eigenvalues closer than the larger of ``gap`` and the scatter that
    rounding induces in a defective cluster are treated as one.
    """
    t = np.asarray(t, dtype=complex)
    eig = np.linalg.eigvals(t)
    centers = cluster_eigenvalues(eig, defective_gap(t.shape[0], gap))
    out = []
    for c in centers:
        others = [abs(c - o) for o in centers if o != c]
        radius = 0.5 * min(others) if others else np.inf
        count = int(np.sum(np.abs(eig - c) < radius))
        _, z, sdim = scipy.linalg.schur(t, output="complex", sort=lambda x, c=c, r=radius: abs(x - c) < r)
        if sdim != count:
            raise IllConditioned(f"could not isolate eigenvalue cluster at {c}")
        g = z[:, :sdim]
        nil = g.conj().T @ t @ g - c * np.eye(sdim)
        out.append((c, g, nil))
    return out


def _check_unit_spectrum(spaces, tol: float) -> None:
    """Each cluster's geometric-mean eigenvalue modulus (a determinant, so
    insensitive to the scatter inside defective clusters) must be 1."""
    for lam, g, nil in spaces:
        d = nil.shape[0]
        _, logabs = np.linalg.slogdet(nil + lam * np.eye(d))
        r = float(np.exp(logabs / d))
        if abs(r - 1.0) > tol:
            raise NonUnitarySpectrum(f"eigenvalue cluster near {lam:.6g} has modulus {r:.10g}, not 1")


def nilpotent_height(nil: np.ndarray, coords: np.ndarray) -> int:
    """Smallest ``h`` with ``coords`` in ``ker(nil^h)``, read from the kernel filtration."""
    d = nil.shape[0]
    scale = max(np.linalg.norm(nil, 2), 1.0)
    cnorm = np.linalg.norm(coords)
    power = np.eye(d, dtype=complex)
    for h in range(1, d + 1):
        power = nil @ power
        kern = null_space(power, RANK_RTOL * scale**h)
        resid = np.linalg.norm(coords - kern @ (kern.conj().T @ coords))
        if resid <= 1e-8 * cnorm:
            return h
    return d


def max_jordan_block(t: np.ndarray, gap: float = CLUSTER_GAP) -> int:
    """Size of the largest Jordan block, via ranks of powers of the nilpotent parts."""
    best = 1
    for _, _, nil in generalized_eigenspaces(t, gap):
        d = nil.shape[0]
        scale = max(np.linalg.norm(nil, 2), 1.0)
        power = np.eye(d, dtype=complex)
        for h in range(1, d + 1):
            power = nil @ power
            if null_space(power, RANK_RTOL * scale**h).shape[1] == d:
                best = max(best, h)
                break
    return best


def k_value(v, t, gap: float = CLUSTER_GAP, unit_tol: float = UNIT_TOL) -> tuple[int, dict]:
    """The index ``k(v, t)`` and the per-eigenvalue heights it came from."""
    v = np.asarray(v, dtype=complex)
    t = np.asarray(t, dtype=complex)
    vnorm = np.linalg.norm(v)
    if vnorm <= 1e-14:
        raise ZeroVector("k-index of the zero vector")
    spaces = generalized_eigenspaces(t, gap)
    _check_unit_spectrum(spaces, unit_tol)
    basis = np.hstack([g for _, g, _ in spaces])
    coeffs = np.linalg.solve(basis, v)
    heights, start = {}, 0
    for lam, g, nil in spaces:
        c = coeffs[start:start + g.shape[1]]
        start += g.shape[1]
        if np.linalg.norm(g @ c) > COMPONENT_RTOL * vnorm:
            heights[complex(lam)] = nilpotent_height(nil, c)
    return max(heights.values()) - 1, heights


def k_index(v, t, m_witness: int = WITNESS_M, gap: float = CLUSTER_GAP,
            unit_tol: float = UNIT_TOL) -> KIndexReport:
    """Index ``k(v, t)`` plus a late normalized iterate as witness of the limit.

    The witness is ``binom(m, k)^-1 t^m v`` at ``m = m_witness``; its
    relative distance to the eigenvector span of ``t`` is the residual.

    Raises:
        NonUnitarySpectrum: some eigenvalue of ``t`` is off the unit circle by more than ``unit_tol``.
        ZeroVector: ``v`` is zero.
    """
    k, heights = k_value(v, t, gap, unit_tol)
    t = np.asarray(t, dtype=complex)
    u = np.linalg.matrix_power(t, m_witness) @ np.asarray(v, dtype=complex) / binom(m_witness, k)
    eve = eigenvector_span(t, gap)
    residual = float(np.linalg.norm(u - eve @ (eve.conj().T @ u)) / np.linalg.norm(u))
    return KIndexReport(k=k, witness_limit=u, residual=residual, heights=heights)


def k_uniqueness(v, t, k: int, m: int = WITNESS_M, grow: float = DIVERGENCE_THRESHOLD,
                 vanish: float = VANISH_THRESHOLD) -> dict:
    """Renormalize with ``k - 1`` and ``k + 1`` at step ``m``.

    Returns the two norms and whether the lower exponent blew past
    ``grow`` and the upper one fell under ``vanish``.  With ``k = 0``
    there is no lower exponent and that side is reported as passing.
    """
    tm_v = np.linalg.matrix_power(np.asarray(t, dtype=complex), m) @ np.asarray(v, dtype=complex)
    base = np.linalg.norm(tm_v)
    below = base / binom(m, k - 1) if k >= 1 else None
    above = base / binom(m, k + 1)
    return {
        "m": m,
        "k": k,
        "norm_at_k": float(base / binom(m, k)),
        "norm_below": None if below is None else float(below),
        "norm_above": float(above),
        "diverges_below": True if below is None else bool(below > grow),
        "vanishes_above": bool(above < vanish),
    }


# --------------------------------------------------------------------------
# decay under a spectral gap


@dataclass
class DecayTable:
    ms: np.ndarray
    norms: np.ndarray
    distances: np.ndarray  # distance of t^m v to the eigenvector span of t (nan when undefined)
    first_below: Optional[int]
    burn_in: int
    threshold: float

    def rows(self):
        for m, nv, d in zip(self.ms, self.norms, self.distances):
            yield int(m), float(nv), ("" if np.isnan(d) else float(d))


def _burn_in(values: np.ndarray) -> int:
    """First index after which ``values`` never increases."""
    idx = len(values) - 1
    while idx > 0 and values[idx - 1] >= values[idx]:
        idx -= 1
    return idx


def verify_decay(t, lam: complex, l: int, v, m_max: int, threshold: float = DECAY_THRESHOLD,
                 margin: float = 1e-10) -> DecayTable:
    """Tabulate ``|lam^-m binom(m, l) t^m v|`` for ``m = 1..m_max``.

    Raises:
        SpectralRadiusViolation: the spectral radius of ``t`` is not below ``|lam|`` by ``margin``.
    """
    t = np.asarray(t, dtype=complex)
    v = np.asarray(v, dtype=complex)
    rho = float(np.max(np.abs(np.linalg.eigvals(t)))) if t.size else 0.0
    if not rho < abs(lam) - margin:
        raise SpectralRadiusViolation(f"spectral radius {rho:.6g} not below |lam| = {abs(lam):.6g}")
    try:
        eve = eigenvector_span(t)
    except Exception:
        eve = None
    ms = np.arange(1, m_max + 1)
    norms = np.empty(m_max)
    dists = np.full(m_max, np.nan)
    y = v.copy()
    for i, m in enumerate(ms):
        y = t @ y / lam
        ny = np.linalg.norm(y)
        norms[i] = binom(int(m), l) * ny
        if eve is not None and ny > 0:
            dists[i] = distance_rows_to_subspace(y[None, :], eve)[0]
    below = np.nonzero(norms < threshold)[0]
    return DecayTable(ms=ms, norms=norms, distances=dists,
                      first_below=int(ms[below[0]]) if below.size else None,
                      burn_in=int(ms[_burn_in(norms)]), threshold=threshold)


# --------------------------------------------------------------------------
# dominant-class orbit


@dataclass
class OrbitDiagnostics:
    j0: int  # 1-based index of the dominant modulus class met by the start point
    k: int
    points: np.ndarray  # canonical orbit points, rows m = 0..m_max
    normalized: np.ndarray  # binom(m, k)^-1 g~^m(v) / r_j0^m (nan rows where binom vanishes)
    norms: np.ndarray
    distances: np.ndarray  # Fubini-Study distance of each orbit point to L_{r_j0}
    attractor: ProjSubspace

    @property
    def final_distance(self) -> float:
        return float(self.distances[-1])

    def rows(self):
        for m, (nv, d) in enumerate(zip(self.norms, self.distances)):
            yield m, ("" if np.isnan(nv) else float(nv)), float(d)


def normalized_orbit(g: ProjMap, p: ProjPoint, m_max: int, gap: float = CLUSTER_GAP) -> OrbitDiagnostics:
    """Follow ``g^m(p)`` through the top modulus class that ``p`` meets.

    The iteration runs class by class (each block scaled by
    ``(r_j / r_j0)^m``) so classes above ``j0`` stay exactly zero instead
    of being seeded by rounding.
    """
    dec = modulus_decomposition(g, gap)
    comps = dec.components(p.coords)
    sizes = [np.linalg.norm(part.basis @ c) for part, c in zip(dec.parts, comps)]
    j0 = max(i for i, s in enumerate(sizes) if s > COMPONENT_RTOL * max(sizes))
    top = dec.parts[j0]
    k, _ = k_value(comps[j0], top.gamma, gap)
    attractor = ProjSubspace(top.basis @ eigenvector_span(top.gamma, gap))

    blocks = [(part.basis, part.gamma * (part.r / top.r), c.copy())
              for part, c in zip(dec.parts[:j0 + 1], comps[:j0 + 1])]
    n1 = p.coords.size
    raw = np.empty((m_max + 1, n1), dtype=complex)
    for m in range(m_max + 1):
        if m:
            blocks = [(b, step, step @ c) for b, step, c in blocks]
        raw[m] = sum(b @ c for b, _, c in blocks)
    weights = np.array([binom(m, k) for m in range(m_max + 1)])
    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = np.where(weights[:, None] > 0, raw / weights[:, None], np.nan)
    norms = np.linalg.norm(normalized, axis=1)
    points = canonical_rows(raw)
    return OrbitDiagnostics(j0=j0 + 1, k=k, points=points, normalized=normalized, norms=norms,
                            distances=distance_rows_to_subspace(points, attractor.basis),
                            attractor=attractor)
