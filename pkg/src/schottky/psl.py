"""Elements of PSL(n+1, C): action on P^n, eigenstructure and limit sets.

A :class:`ProjMap` keeps a lifting matrix normalized to determinant one
(principal (n+1)-th root).  The eigenvalue moduli of that lift drive the
modulus decomposition ``lift = ⊕ r_i * gamma_i`` where each ``gamma_i``
has unit-modulus spectrum, and the limit set of a cyclic group is the
union of the projectivized eigenvector spans of the modulus classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, FiniteOrder, IllConditioned, ParseError, Singular
from .projective import (
    RANK_RTOL,
    ProjPoint,
    ProjSubspace,
    canonical_rows,
    canonical_vector,
    null_space,
    orthonormal_basis,
)
from .serialize import matrix_from_json, matrix_to_json

CLUSTER_GAP = 1e-6
FINITE_ORDER_CAP = 360
FINITE_ORDER_TOL = 1e-9
INVERTIBLE_RTOL = 1e-12


def _check_invertible(m: np.ndarray) -> None:
    s = np.linalg.svd(m, compute_uv=False)
    if not np.all(np.isfinite(s)) or s[-1] <= INVERTIBLE_RTOL * s[0]:
        ratio = s[-1] / s[0] if s[0] > 0 else 0.0
        raise Singular(f"matrix is numerically singular (s_min/s_max = {ratio:.3g})")


class ProjMap:
    """Projective transformation of P^n given by a lifting matrix.

    The lift is rescaled to determinant 1 with the principal (n+1)-th
    root of the determinant; the remaining root-of-unity ambiguity is
    invisible to every projective computation.
    """

    __slots__ = ("_lift",)

    def __init__(self, lift):
        m = np.array(lift, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise DimensionMismatch(f"lift must be a square matrix of size >= 2, got {m.shape}")
        _check_invertible(m)
        root = np.linalg.det(m) ** (1.0 / m.shape[0])
        self._set(m / root)

    def _set(self, m: np.ndarray) -> None:
        m = np.array(m, dtype=complex)
        m.flags.writeable = False
        self._lift = m

    @classmethod
    def _normalized(cls, m: np.ndarray) -> "ProjMap":
        obj = cls.__new__(cls)
        obj._set(m)
        return obj

    @classmethod
    def identity(cls, n: int) -> "ProjMap":
        return cls._normalized(np.eye(n + 1, dtype=complex))

    @property
    def lift(self) -> np.ndarray:
        return self._lift

    @property
    def ambient_dim(self) -> int:
        return self._lift.shape[0] - 1

    def inverse(self) -> "ProjMap":
        return ProjMap._normalized(np.linalg.inv(self._lift))

    def __matmul__(self, other: "ProjMap") -> "ProjMap":
        if not isinstance(other, ProjMap):
            return NotImplemented
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("cannot compose maps of different dimension")
        return ProjMap._normalized(self._lift @ other._lift)

    def power(self, m: int) -> "ProjMap":
        base = self._lift if m >= 0 else np.linalg.inv(self._lift)
        return ProjMap._normalized(np.linalg.matrix_power(base, abs(m)))

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return apply(self, p)

    def projectively_equal(self, other: "ProjMap", tol: float = FINITE_ORDER_TOL) -> bool:
        if other.ambient_dim != self.ambient_dim:
            return False
        a = canonical_vector(self._lift.ravel())
        b = canonical_vector(other._lift.ravel())
        return float(np.max(np.abs(a - b))) <= tol

    def is_identity(self, tol: float = FINITE_ORDER_TOL) -> bool:
        return _is_projective_identity(self._lift, tol)

    def __eq__(self, other):
        if not isinstance(other, ProjMap):
            return NotImplemented
        return self._lift.shape == other._lift.shape and bool(np.all(self._lift == other._lift))

    def __hash__(self):
        return hash(self._lift.tobytes())

    def __repr__(self):
        return f"ProjMap(n={self.ambient_dim})"

    def to_json(self):
        return {"n": self.ambient_dim, "lift": matrix_to_json(self._lift)}

    @classmethod
    def from_json(cls, data) -> "ProjMap":
        if not isinstance(data, dict) or "lift" not in data or "n" not in data:
            raise ParseError("ProjMap JSON needs keys 'n' and 'lift'")
        m = matrix_from_json(data["lift"])
        if m.shape != (data["n"] + 1, data["n"] + 1):
            raise ParseError(f"lift shape {m.shape} does not match n = {data['n']}")
        try:
            _check_invertible(m)
        except Singular as exc:
            raise ParseError(str(exc)) from exc
        if abs(np.linalg.det(m) - 1) <= 1e-9:
            # already normalized: keep the stored bits so JSON round-trips exactly
            return cls._normalized(m)
        return cls(m)


def _is_projective_identity(m: np.ndarray, tol: float) -> bool:
    n1 = m.shape[0]
    a = canonical_vector(m.ravel())
    b = canonical_vector(np.eye(n1).ravel())
    return float(np.max(np.abs(a - b))) <= tol


def apply(g: ProjMap, p: ProjPoint) -> ProjPoint:
    """Image ``g([w]) = [g~ w]`` of a point."""
    if g.ambient_dim != p.ambient_dim:
        raise DimensionMismatch(f"map on P^{g.ambient_dim} applied to point of P^{p.ambient_dim}")
    return ProjPoint(g.lift @ p.coords)


def apply_rows(m: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Apply a lift to each row of ``xs`` and renormalize rows to unit length."""
    ys = np.asarray(xs) @ np.asarray(m).T
    return ys / np.linalg.norm(ys, axis=1, keepdims=True)


def map_with_spectrum(eigenvalues: Sequence[complex], conjugator=None) -> ProjMap:
    """Diagonalizable map ``h diag(eigenvalues) h^-1``."""
    d = np.diag(np.asarray(eigenvalues, dtype=complex))
    if conjugator is None:
        return ProjMap(d)
    h = np.asarray(conjugator, dtype=complex)
    return ProjMap(h @ d @ np.linalg.inv(h))


# --------------------------------------------------------------------------
# modulus decomposition


@dataclass(frozen=True)
class ModulusPart:
    r: float
    basis: np.ndarray  # (n+1) x d, orthonormal columns spanning V_i
    gamma: np.ndarray  # d x d, unit-modulus spectrum, in the coordinates of ``basis``

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class ModulusDecomposition:
    """``lift = ⊕ r_i gamma_i`` with ``r_1 < ... < r_k``."""

    lift: np.ndarray
    parts: tuple

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def moduli(self) -> List[float]:
        return [p.r for p in self.parts]

    @property
    def dims(self) -> List[int]:
        return [p.dim for p in self.parts]

    def basis_matrix(self) -> np.ndarray:
        return np.hstack([p.basis for p in self.parts])

    def block_matrix(self) -> np.ndarray:
        return scipy.linalg.block_diag(*[p.r * p.gamma for p in self.parts])

    def reassemble(self) -> np.ndarray:
        b = self.basis_matrix()
        return b @ self.block_matrix() @ np.linalg.inv(b)

    def reassembly_error(self) -> float:
        return float(np.linalg.norm(self.reassemble() - self.lift) / np.linalg.norm(self.lift))

    def components(self, v) -> List[np.ndarray]:
        """Coordinates of the V_i-components of ``v`` (direct-sum splitting)."""
        c = np.linalg.solve(self.basis_matrix(), np.asarray(v, dtype=complex))
        out, start = [], 0
        for p in self.parts:
            out.append(c[start:start + p.dim])
            start += p.dim
        return out

    def class_index(self, r: float, gap: float = CLUSTER_GAP) -> Optional[int]:
        for i, p in enumerate(self.parts):
            if abs(r / p.r - 1.0) <= gap:
                return i
        return None

    def to_json(self):
        return {
            "moduli": [float(p.r) for p in self.parts],
            "dims": self.dims,
            "parts": [
                {"r": float(p.r), "basis": matrix_to_json(p.basis), "gamma": matrix_to_json(p.gamma)}
                for p in self.parts
            ],
        }


def cluster_moduli(moduli: Sequence[float], gap: float = CLUSTER_GAP) -> List[List[float]]:
    """Greedy clustering: sort, cut wherever consecutive ratio exceeds ``1 + gap``."""
    mods = sorted(float(m) for m in moduli)
    clusters = [[mods[0]]]
    for m in mods[1:]:
        if m > clusters[-1][-1] * (1.0 + gap):
            clusters.append([m])
        else:
            clusters[-1].append(m)
    return clusters


def modulus_decomposition(g, gap: float = CLUSTER_GAP) -> ModulusDecomposition:
    """Split the lift of ``g`` by eigenvalue modulus.

    Each class subspace V_i is the invariant subspace of the eigenvalues
    whose modulus falls in cluster i, read off an ordered complex Schur
    form.  ``r_i`` is the geometric mean of the class moduli and
    ``gamma_i`` the restriction divided by ``r_i``.

    Raises:
        Singular: the lift is not invertible.
        IllConditioned: the Schur reordering does not reproduce the
            cluster sizes, or the class subspaces are nearly dependent.
    """
    t = g.lift if isinstance(g, ProjMap) else np.asarray(g, dtype=complex)
    _check_invertible(t)
    eig = np.linalg.eigvals(t)
    clusters = cluster_moduli(np.abs(eig), gap)
    cuts = [np.sqrt(clusters[i][-1] * clusters[i + 1][0]) for i in range(len(clusters) - 1)]
    parts = []
    for i, cl in enumerate(clusters):
        lo = cuts[i - 1] if i > 0 else 0.0
        hi = cuts[i] if i < len(cuts) else np.inf
        _, z, sdim = scipy.linalg.schur(t, output="complex", sort=lambda x, lo=lo, hi=hi: lo < abs(x) < hi)
        if sdim != len(cl):
            raise IllConditioned(f"modulus class {i} has {len(cl)} eigenvalues but Schur selected {sdim}")
        v = z[:, :sdim]
        m = v.conj().T @ t @ v
        _, logabs = np.linalg.slogdet(m)
        r = float(np.exp(logabs / sdim))
        parts.append(ModulusPart(r=r, basis=v, gamma=m / r))
    dec = ModulusDecomposition(lift=np.array(t), parts=tuple(parts))
    s = np.linalg.svd(dec.basis_matrix(), compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        raise IllConditioned("modulus classes are numerically dependent")
    return dec


# --------------------------------------------------------------------------
# eigenvectors, level sets, limit sets


def cluster_eigenvalues(eig: Sequence[complex], gap: float = CLUSTER_GAP) -> List[complex]:
    """Merge eigenvalues closer than ``gap`` relative to their size; return cluster means."""
    groups: List[List[complex]] = []
    for lam in eig:
        for grp in groups:
            if abs(lam - grp[0]) <= gap * max(abs(grp[0]), 1.0):
                grp.append(lam)
                break
        else:
            groups.append([lam])
    return [complex(np.mean(grp)) for grp in groups]


def defective_gap(size: int, gap: float = CLUSTER_GAP) -> float:
    """Eigenvalue clustering gap that also absorbs the ``eps^(1/size)`` scatter
    rounding induces in a defective (Jordan) cluster of a ``size x size`` matrix."""
    return max(gap, 10.0 * np.finfo(float).eps ** (1.0 / max(size, 1)))


def eigenvector_span(t: np.ndarray, gap: float = CLUSTER_GAP) -> np.ndarray:
    """Orthonormal basis of the span of the proper eigenvectors of ``t``.

    Raises:
        Singular: ``t`` is not invertible.
    """
    t = np.asarray(t, dtype=complex)
    _check_invertible(t)
    scale = max(np.linalg.norm(t, 2), 1.0)
    cols = []
    for lam in cluster_eigenvalues(np.linalg.eigvals(t), defective_gap(t.shape[0], gap)):
        shifted = t - lam * np.eye(t.shape[0])
        kern = null_space(shifted, RANK_RTOL * scale)
        if kern.shape[1] == 0:
            # cluster mean is off by more than the rank tolerance; keep the best eigenvector
            kern = np.linalg.svd(shifted)[2][-1:].conj().T
        cols.append(kern)
    return orthonormal_basis(np.hstack(cols))


def level_set(g: ProjMap, r: float, decomposition: Optional[ModulusDecomposition] = None,
              gap: float = CLUSTER_GAP) -> Optional[ProjSubspace]:
    """``L_r(g)``: projectivized eigenvectors whose eigenvalue has modulus ``r``.

    ``r`` refers to the determinant-normalized lift.  Returns ``None``
    when ``r`` is not one of the class moduli.
    """
    dec = decomposition or modulus_decomposition(g, gap)
    i = dec.class_index(r, gap)
    if i is None:
        return None
    part = dec.parts[i]
    return ProjSubspace(part.basis @ eigenvector_span(part.gamma, gap))


def finite_order(g: ProjMap, cap: int = FINITE_ORDER_CAP, tol: float = FINITE_ORDER_TOL,
                 gap: float = CLUSTER_GAP) -> Optional[int]:
    """Smallest ``m <= cap`` with ``g^m`` projectively the identity, else ``None``."""
    mods = np.abs(np.linalg.eigvals(g.lift))
    if len(cluster_moduli(mods, gap)) > 1:
        return None
    p = np.eye(g.ambient_dim + 1, dtype=complex)
    for m in range(1, cap + 1):
        p = g.lift @ p
        p /= np.linalg.norm(p)
        if _is_projective_identity(p, tol):
            return m
    return None


def limit_set(g: ProjMap, gap: float = CLUSTER_GAP, cap: int = FINITE_ORDER_CAP,
              tol: float = FINITE_ORDER_TOL) -> List[ProjSubspace]:
    """Limit set of the cyclic group generated by ``g`` as ``[L_r for r in |Eva(g)|]``.

    Raises:
        FiniteOrder: ``g`` is periodic with period at most ``cap``.
        IllConditioned: propagated from :func:`modulus_decomposition`.
    """
    order = finite_order(g, cap, tol, gap)
    if order is not None:
        raise FiniteOrder(order)
    dec = modulus_decomposition(g, gap)
    return [ProjSubspace(p.basis @ eigenvector_span(p.gamma, gap)) for p in dec.parts]


def limit_set_distance(points: np.ndarray, limit: Sequence[ProjSubspace]) -> np.ndarray:
    """Fubini-Study distance from each row of ``points`` to the union of ``limit``."""
    from .projective import distance_rows_to_subspace

    d = np.stack([distance_rows_to_subspace(points, s.basis) for s in limit])
    return d.min(axis=0)


def orbit_rows(m: np.ndarray, x: np.ndarray, steps: int) -> np.ndarray:
    """Projective orbit ``x, m x, ..., m^steps x`` as unit rows (renormalized each step)."""
    out = np.empty((steps + 1, x.size), dtype=complex)
    y = np.asarray(x, dtype=complex) / np.linalg.norm(x)
    out[0] = y
    for i in range(1, steps + 1):
        y = m @ y
        y /= np.linalg.norm(y)
        out[i] = y
    return canonical_rows(out)
