"""Open regions of P^n cut out by a pair of Hermitian forms.

A :class:`QuadricRegion` is ``{[x] : x* a x < x* b x}`` with ``b``
positive definite.  Such regions are closed under projective images
(``g(R)`` is the pair ``(g^-H a g^-1, g^-H b g^-1)``), so pairing and
containment statements between them become identities between forms.
Disjointness of closures is certified by a positive-definite convex
combination of the two difference forms (an S-procedure argument) or
falsified by an explicit point lying in both closures.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DimensionMismatch, ParseError
from .projective import ProjPoint, canonical_vector, random_unit_vectors
from .psl import ProjMap
from .serialize import matrix_from_json, matrix_to_json

HERMITIAN_TOL = 1e-12
BOUNDARY_TOL = 1e-10
PD_FLOOR = 1e-10
MU_GRID = np.linspace(0.0, 1.0, 101)
DISJOINT_SAMPLES = 10**5


def hermitize(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def _hermitian_defect(m: np.ndarray) -> float:
    return float(np.linalg.norm(m - m.conj().T) / max(np.linalg.norm(m), 1.0))


class QuadricRegion:
    """The open set ``{[x] : x* a x < x* b x}``.

    Attributes:
        a, b: Hermitian matrices, ``b`` positive definite.
        regular: whether ``a - b`` is indefinite, i.e. the region is a
            nonempty proper open set equal to the interior of its closure.
    """

    __slots__ = ("a", "b", "regular")

    def __init__(self, a, b):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
            raise DimensionMismatch(f"form shapes {a.shape} and {b.shape} do not match")
        if _hermitian_defect(a) > HERMITIAN_TOL or _hermitian_defect(b) > HERMITIAN_TOL:
            raise ValueError("region forms must be Hermitian")
        a, b = hermitize(a), hermitize(b)
        if np.linalg.eigvalsh(b)[0] <= PD_FLOOR:
            raise ValueError("denominator form b must be positive definite")
        a.flags.writeable = False
        b.flags.writeable = False
        self.a, self.b = a, b
        ev = np.linalg.eigvalsh(a - b)
        scale = max(np.abs(ev).max(), 1e-300)
        self.regular = bool(ev[0] < -PD_FLOOR * scale and ev[-1] > PD_FLOOR * scale)

    @classmethod
    def from_form(cls, h) -> "QuadricRegion":
        """Region ``{x* h x < 0}`` encoded as the pair ``(h + I, I)``."""
        h = hermitize(h)
        return cls(h + np.eye(h.shape[0]), np.eye(h.shape[0]))

    @property
    def ambient_dim(self) -> int:
        return self.a.shape[0] - 1

    @property
    def form(self) -> np.ndarray:
        """The difference form ``a - b``; the region is where it is negative."""
        return self.a - self.b

    def complement(self) -> "QuadricRegion":
        """Interior of the complement, ``{x* (a - b) x > 0}``."""
        return QuadricRegion(2 * self.b - self.a, self.b)

    def levels(self, xs: np.ndarray) -> np.ndarray:
        """``x*(a-b)x / x*bx`` for each row: negative inside, zero on the boundary."""
        xs = np.atleast_2d(np.asarray(xs, dtype=complex))
        num = np.einsum("ij,jk,ik->i", xs.conj(), self.form, xs).real
        den = np.einsum("ij,jk,ik->i", xs.conj(), self.b, xs).real
        return num / den

    def level(self, p: Union[ProjPoint, np.ndarray]) -> float:
        x = p.coords if isinstance(p, ProjPoint) else p
        self._check_dim(np.asarray(x).size - 1)
        return float(self.levels(x)[0])

    def classify(self, p, tol: float = BOUNDARY_TOL) -> str:
        """``"inside"``, ``"boundary"`` (within ``tol``) or ``"outside"``."""
        lv = self.level(p)
        if lv < -tol:
            return "inside"
        if lv <= tol:
            return "boundary"
        return "outside"

    def contains(self, p, tol: float = 0.0) -> bool:
        return self.level(p) < -tol

    def contains_rows(self, xs: np.ndarray, tol: float = 0.0) -> np.ndarray:
        return self.levels(xs) < -tol

    def _check_dim(self, n: int) -> None:
        if n != self.ambient_dim:
            raise DimensionMismatch(f"point in P^{n} tested against region in P^{self.ambient_dim}")

    def proportional_to(self, other: "QuadricRegion", tol: float = 1e-9) -> Optional[float]:
        """Positive ``c`` with ``form = c * other.form`` within relative ``tol``, else ``None``."""
        h, k = self.form, other.form
        c = float(np.vdot(k, h).real / np.vdot(k, k).real)
        if c <= 0:
            return None
        if np.linalg.norm(h - c * k) > tol * np.linalg.norm(h):
            return None
        return c

    def to_json(self):
        return {"a": matrix_to_json(self.a), "b": matrix_to_json(self.b)}

    @classmethod
    def from_json(cls, data) -> "QuadricRegion":
        if not isinstance(data, dict) or set(data) != {"a", "b"}:
            raise ParseError("region must be an object with keys 'a' and 'b'")
        try:
            return cls(matrix_from_json(data["a"]), matrix_from_json(data["b"]))
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(f"invalid region: {exc}") from exc

    def __eq__(self, other):
        if not isinstance(other, QuadricRegion):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    __hash__ = None

    def __repr__(self):
        return f"QuadricRegion(P^{self.ambient_dim}, regular={self.regular})"


def ball_region(center, radius: float) -> QuadricRegion:
    """Fubini-Study ball ``{x : d(x, center) < radius}``, ``0 < radius < pi/2``."""
    c = np.asarray(center.coords if isinstance(center, ProjPoint) else center, dtype=complex)
    c = c / np.linalg.norm(c)
    if not 0.0 < radius < np.pi / 2:
        raise ValueError(f"ball radius must lie in (0, pi/2), got {radius}")
    n1 = c.size
    cos2 = np.cos(radius) ** 2
    return QuadricRegion((1 + cos2) * np.eye(n1) - np.outer(c, c.conj()), np.eye(n1))


def region_image(r: QuadricRegion, g: ProjMap) -> QuadricRegion:
    """Exact image ``g(r)``: both forms pulled back through ``g^-1``."""
    if g.ambient_dim != r.ambient_dim:
        raise DimensionMismatch(f"map on P^{g.ambient_dim} applied to region in P^{r.ambient_dim}")
    ginv = np.linalg.inv(g.lift)
    a = hermitize(ginv.conj().T @ r.a @ ginv)
    b = hermitize(ginv.conj().T @ r.b @ ginv)
    # one positive rescaling of both forms leaves the region unchanged and keeps b near unit size
    scale = 1.0 / np.linalg.norm(b, 2)
    return QuadricRegion(a * scale, b * scale)


# --------------------------------------------------------------------------
# disjointness of closures


@dataclass
class Certificate:
    """``mu * H1 + (1 - mu) * H2`` is positive definite (forms scaled to unit norm)."""

    mu: float
    margin: float  # smallest eigenvalue of the combination
    status: str = "disjoint"

    def to_json(self):
        return {"status": self.status, "mu": self.mu, "margin": self.margin}


@dataclass
class CounterexamplePoint:
    """A point in both closures."""

    point: ProjPoint
    levels: tuple
    status: str = "intersecting"

    def to_json(self):
        return {"status": self.status, "point": self.point.to_json(), "levels": list(self.levels)}


@dataclass
class Unknown:
    best_mu: float
    best_margin: float
    samples: int
    status: str = "unknown"

    def to_json(self):
        return {"status": self.status, "best_mu": self.best_mu, "best_margin": self.best_margin,
                "samples": self.samples}


def _unit_form(h: np.ndarray) -> np.ndarray:
    return h / np.linalg.norm(h, 2)


def _rayleigh(h: np.ndarray, xs: np.ndarray) -> np.ndarray:
    xs = np.atleast_2d(xs)
    num = np.einsum("ij,jk,ik->i", xs.conj(), h, xs).real
    return num / np.einsum("ij,ij->i", xs.conj(), xs).real


def _search_witness(h1, h2, seeds, tol):
    """Look for ``x`` with both Rayleigh quotients ``<= tol`` on pencils of seed vectors."""
    best = (np.inf, None)

    def worst(x):
        return max(_rayleigh(h1, x)[0], _rayleigh(h2, x)[0])

    for x in seeds:
        val = worst(x)
        if val < best[0]:
            best = (val, x)
    if best[0] <= tol:
        return best
    thetas = np.linspace(0.0, np.pi / 2, 61)
    phases = np.linspace(0.0, 2 * np.pi, 24, endpoint=False)
    for i in range(len(seeds)):
        for j in range(i + 1, len(seeds)):
            u, v = seeds[i], seeds[j]
            v = v - np.vdot(u, v) * u
            nv = np.linalg.norm(v)
            if nv < 1e-8:
                continue
            v = v / nv
            for ph in phases:
                w = np.exp(1j * ph) * v
                curve = lambda t, w=w: np.cos(t) * u + np.sin(t) * w
                pts = np.array([curve(t) for t in thetas])
                f1, f2 = _rayleigh(h1, pts), _rayleigh(h2, pts)
                vals = np.maximum(f1, f2)
                idx = int(np.argmin(vals))
                cand = (vals[idx], pts[idx])
                # refine around the best grid node: root of f1 - f2 or a bounded minimum
                lo, hi = thetas[max(idx - 1, 0)], thetas[min(idx + 1, len(thetas) - 1)]
                diff = lambda t: _rayleigh(h1, curve(t))[0] - _rayleigh(h2, curve(t))[0]
                try:
                    for a, b in ((lo, thetas[idx]), (thetas[idx], hi)):
                        if a < b and diff(a) * diff(b) <= 0:
                            t = brentq(diff, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                            val = worst(curve(t))
                            if val < cand[0]:
                                cand = (val, curve(t))
                except ValueError:
                    pass
                if lo < hi:
                    res = minimize_scalar(lambda t: worst(curve(t)), bounds=(lo, hi), method="bounded",
                                          options={"xatol": 1e-14})
                    if res.fun < cand[0]:
                        cand = (res.fun, curve(res.x))
                if cand[0] < best[0]:
                    best = cand
                if best[0] <= tol:
                    return best
    return best


def region_disjoint(r1: QuadricRegion, r2: QuadricRegion, tol: float = BOUNDARY_TOL,
                    samples: int = DISJOINT_SAMPLES, seed: int = 0):
    """Decide whether the closures of ``r1`` and ``r2`` are disjoint.

    Returns a :class:`Certificate` (some convex combination of the unit-norm
    difference forms is positive definite, so no point is non-positive for
    both), a :class:`CounterexamplePoint` (a point whose two levels are
    both ``<= tol``) or :class:`Unknown`.
    """
    if r1.ambient_dim != r2.ambient_dim:
        raise DimensionMismatch("regions live in different projective spaces")
    h1, h2 = _unit_form(r1.form), _unit_form(r2.form)

    def lam_min(mu):
        return float(np.linalg.eigvalsh(mu * h1 + (1 - mu) * h2)[0])

    grid = np.array([lam_min(mu) for mu in MU_GRID])
    i = int(np.argmax(grid))
    best_mu, best = float(MU_GRID[i]), float(grid[i])
    lo, hi = MU_GRID[max(i - 1, 0)], MU_GRID[min(i + 1, len(MU_GRID) - 1)]
    if lo < hi:
        res = minimize_scalar(lambda m: -lam_min(m), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if -res.fun > best:
            best_mu, best = float(res.x), float(-res.fun)
    if best > PD_FLOOR:
        return Certificate(mu=best_mu, margin=best)

    # witness search: minimum eigenvectors near the optimal mu and at the endpoints
    seeds = []
    for mu in sorted({0.0, 1.0, best_mu, max(best_mu - 1e-3, 0.0), min(best_mu + 1e-3, 1.0),
                      max(best_mu - 0.05, 0.0), min(best_mu + 0.05, 1.0)}):
        w, v = np.linalg.eigh(mu * h1 + (1 - mu) * h2)
        seeds.extend(v[:, : max(1, int(np.sum(w <= w[0] + 1e-9)))].T)
    val, x = _search_witness(h1, h2, seeds, tol)
    if x is not None and val <= tol:
        x = canonical_vector(x)
        return CounterexamplePoint(ProjPoint(x), (r1.level(x), r2.level(x)))

    rng = np.random.default_rng(seed)
    n1 = r1.ambient_dim + 1
    done = 0
    while done < samples:
        batch = min(10**4, samples - done)
        xs = random_unit_vectors(rng, n1, batch)
        both = np.maximum(r1.levels(xs), r2.levels(xs))
        j = int(np.argmin(both))
        if both[j] <= tol:
            return CounterexamplePoint(ProjPoint(xs[j]), (r1.level(xs[j]), r2.level(xs[j])))
        done += batch
    return Unknown(best_mu=best_mu, best_margin=best, samples=samples)
