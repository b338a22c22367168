"""Homogeneous-coordinate primitives for complex projective space P^n.

A point of P^n is a nonzero vector of C^{n+1} up to a nonzero complex
scalar.  Points are stored in a canonical form (unit norm, first
coordinate of largest modulus real and positive) so that equality and
hashing are meaningful.  Projective subspaces are stored through an
orthonormal basis of their linear lift.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, EmptyInput, ZeroVector
from .serialize import matrix_from_json, matrix_to_json, vector_from_json, vector_to_json

ZERO_NORM = 1e-14
RANK_RTOL = 1e-10
# relative slack when picking the pivot among (near-)equal largest coordinates
_PIVOT_RTOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def canonical_vector(raw) -> np.ndarray:
    """Return the canonical unit representative of ``raw`` as an array."""
    v = np.asarray(raw, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm <= ZERO_NORM:
        raise ZeroVector(f"vector of norm {norm:.3g} has no projective class")
    mags = np.abs(v)
    pivot = int(np.argmax(mags >= mags.max() * (1.0 - _PIVOT_RTOL)))
    u = v / v[pivot]
    return _positive_zeros(u / np.linalg.norm(u))


def _positive_zeros(u: np.ndarray) -> np.ndarray:
    out = np.empty_like(u)
    out.real = u.real + 0.0
    out.imag = u.imag + 0.0
    return out


def canonical_rows(vs: np.ndarray) -> np.ndarray:
    """Vectorised :func:`canonical_vector` over the rows of ``vs``."""
    vs = np.asarray(vs, dtype=complex)
    mags = np.abs(vs)
    pivots = np.argmax(mags >= mags.max(axis=1, keepdims=True) * (1.0 - _PIVOT_RTOL), axis=1)
    piv = vs[np.arange(len(vs)), pivots]
    if np.any(np.abs(piv) <= ZERO_NORM):
        raise ZeroVector("zero row in batch")
    u = vs / piv[:, None]
    return _positive_zeros(u / np.linalg.norm(u, axis=1, keepdims=True))


class ProjPoint:
    """A point of P^n held as its canonical homogeneous coordinates."""

    __slots__ = ("_coords",)

    def __init__(self, coords):
        self._coords = _frozen(canonical_vector(coords))

    @classmethod
    def _trusted(cls, unit: np.ndarray) -> "ProjPoint":
        obj = cls.__new__(cls)
        obj._coords = _frozen(unit)
        return obj

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def ambient_dim(self) -> int:
        return self._coords.size - 1

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self._coords.shape == other._coords.shape and bool(np.all(self._coords == other._coords))

    def __hash__(self):
        return hash(self._coords.tobytes())

    def __repr__(self):
        body = ", ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in self._coords)
        return f"ProjPoint([{body}])"

    def to_json(self):
        return vector_to_json(self._coords)

    @classmethod
    def from_json(cls, data) -> "ProjPoint":
        return cls(vector_from_json(data))


def canonicalize(raw) -> ProjPoint:
    """Canonical representative of the projective class of ``raw``.

    Raises:
        ZeroVector: if ``raw`` has norm at most 1e-14.
    """
    return ProjPoint(raw)


def orthonormal_basis(mat: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis of the column space, rank cut at ``rtol * s_max``."""
    mat = np.asarray(mat, dtype=complex)
    if mat.size == 0:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] <= ZERO_NORM:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    rank = int(np.sum(s > rtol * s[0]))
    return u[:, :rank]


def null_space(mat: np.ndarray, atol: float) -> np.ndarray:
    """Orthonormal basis of ``{x : mat @ x = 0}``, singular values <= ``atol`` count as zero."""
    mat = np.asarray(mat, dtype=complex)
    ncols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(s > atol))
    return vh[rank:].conj().T


def fs_cos_sin(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    x = x / np.linalg.norm(x)
    y = y / np.linalg.norm(y)
    ip = np.vdot(x, y)
    return abs(ip), float(np.linalg.norm(y - ip * x))


def _check_same_dim(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatch(f"ambient dimensions differ: {a} vs {b}")


def fs_distance(p: ProjPoint, q: ProjPoint) -> float:
    """Fubini-Study distance ``arccos |<p, q>|`` in radians (diameter pi/2).

    Evaluated as ``atan2(sin, cos)`` for accuracy near 0 and pi/2.
    """
    _check_same_dim(p.ambient_dim, q.ambient_dim)
    x, y = p.coords, q.coords
    if x.tobytes() > y.tobytes():
        x, y = y, x  # fixed argument order makes the result exactly symmetric
    c, s = fs_cos_sin(x, y)
    return float(np.arctan2(s, c))


def fs_distance_rows(xs: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Fubini-Study distance from each row of ``xs`` to the vector ``y``."""
    xs = np.asarray(xs, dtype=complex)
    xs = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    y = np.asarray(y, dtype=complex) / np.linalg.norm(y)
    ip = xs @ y.conj()
    s = np.linalg.norm(y[None, :] - ip[:, None] * xs, axis=1)
    return np.arctan2(s, np.abs(ip))


class ProjSubspace:
    """Projective subspace ``[H]`` given by an orthonormal basis of ``H``.

    ``proj_dim`` is the projective dimension, one less than the number of
    basis columns.
    """

    __slots__ = ("_basis",)

    def __init__(self, basis, *, orthonormalize: bool = True):
        basis = np.asarray(basis, dtype=complex)
        if basis.ndim == 1:
            basis = basis[:, None]
        if orthonormalize:
            basis = orthonormal_basis(basis)
        if basis.shape[1] == 0:
            raise ZeroVector("a projective subspace needs a nonzero spanning vector")
        if basis.shape[1] > basis.shape[0]:
            raise DimensionMismatch("more basis columns than ambient coordinates")
        gram = basis.conj().T @ basis
        if not np.allclose(gram, np.eye(basis.shape[1]), atol=1e-10):
            raise ValueError("basis columns are not orthonormal")
        self._basis = _frozen(basis)

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def proj_dim(self) -> int:
        return self._basis.shape[1] - 1

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0] - 1

    def projector(self) -> np.ndarray:
        return self._basis @ self._basis.conj().T

    def distance(self, p: Union[ProjPoint, np.ndarray]) -> float:
        """Fubini-Study distance from a point to this subspace."""
        x = p.coords if isinstance(p, ProjPoint) else np.asarray(p, dtype=complex)
        _check_same_dim(x.size - 1, self.ambient_dim)
        return float(distance_rows_to_subspace(x[None, :], self._basis)[0])

    def contains(self, p: Union[ProjPoint, np.ndarray], tol: float = 1e-10) -> bool:
        return self.distance(p) <= tol

    def same_as(self, other: "ProjSubspace", tol: float = 1e-8) -> bool:
        if self.ambient_dim != other.ambient_dim or self.proj_dim != other.proj_dim:
            return False
        return float(np.linalg.norm(self.projector() - other.projector(), 2)) <= tol

    def transform(self, matrix: np.ndarray) -> "ProjSubspace":
        """Image under the linear map ``matrix`` (assumed invertible)."""
        return ProjSubspace(np.asarray(matrix) @ self._basis)

    def point(self, coeffs=None) -> ProjPoint:
        """Point of the subspace with basis coefficients ``coeffs`` (default: first basis vector)."""
        if coeffs is None:
            return ProjPoint(self._basis[:, 0])
        return ProjPoint(self._basis @ np.asarray(coeffs, dtype=complex))

    def __repr__(self):
        return f"ProjSubspace(proj_dim={self.proj_dim}, ambient_dim={self.ambient_dim})"

    def to_json(self):
        return matrix_to_json(self._basis)

    @classmethod
    def from_json(cls, data) -> "ProjSubspace":
        return cls(matrix_from_json(data), orthonormalize=False)


def distance_rows_to_subspace(xs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs, dtype=complex)
    xs = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    coef = xs @ basis.conj()
    inside = np.linalg.norm(coef, axis=1)
    outside = np.linalg.norm(xs - coef @ basis.T, axis=1)
    return np.arctan2(outside, inside)


def _lift_columns(item) -> np.ndarray:
    if isinstance(item, ProjPoint):
        return item.coords[:, None]
    if isinstance(item, ProjSubspace):
        return item.basis
    arr = np.asarray(item, dtype=complex)
    return arr[:, None] if arr.ndim == 1 else arr


def span(items: Iterable) -> ProjSubspace:
    """Smallest projective subspace containing all points/subspaces in ``items``.

    Raw vectors and basis matrices are accepted alongside
    :class:`ProjPoint` and :class:`ProjSubspace`.
    """
    cols = [_lift_columns(it) for it in items]
    if not cols:
        raise EmptyInput("span of an empty collection")
    dims = {c.shape[0] for c in cols}
    if len(dims) != 1:
        raise DimensionMismatch(f"mixed ambient dimensions {sorted(d - 1 for d in dims)}")
    return ProjSubspace(np.hstack(cols))


def complement_basis(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of ``span(basis)``."""
    n1, k1 = basis.shape
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, k1:]


def intersect(a: ProjSubspace, b: ProjSubspace, rtol: float = RANK_RTOL) -> Optional[ProjSubspace]:
    """Intersection ``[A ∩ B]`` of two projective subspaces, or ``None`` if empty.

    The linear intersection is the kernel of the stacked system of
    orthogonal-complement equations.  Whenever
    ``a.proj_dim + b.proj_dim >= n`` the system has fewer rows than
    columns, so the kernel (hence the result) is never empty.
    """
    _check_same_dim(a.ambient_dim, b.ambient_dim)
    ca = complement_basis(a.basis)
    cb = complement_basis(b.basis)
    system = np.vstack([ca.conj().T, cb.conj().T])
    if system.shape[0] == 0:
        return ProjSubspace(np.eye(a.ambient_dim + 1))
    s_max = np.linalg.norm(system, 2)
    kernel = null_space(system, rtol * max(s_max, 1.0))
    if kernel.shape[1] == 0:
        return None
    return ProjSubspace(kernel)


def random_unit_vectors(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """``count`` seeded Gaussian-uniform unit vectors of C^dim, one per row."""
    z = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
