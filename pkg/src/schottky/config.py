"""Run configuration: named tolerances, seed, and the worker pool size."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, List, Mapping, Optional, TypeVar

from .errors import ParseError

T = TypeVar("T")
U = TypeVar("U")

# name -> (default, meaning)
TOLERANCES = {
    "boundary": (1e-10, "quadric level treated as on the boundary"),
    "mapping_exact": (1e-9, "relative residual for exact form-pair proportionality"),
    "cluster_gap": (1e-6, "relative gap separating eigenvalue modulus classes"),
    "finite_order": (1e-9, "projective-identity tolerance for torsion detection"),
    "decay": (1e-8, "decay tables must drop below this value"),
}

DEFAULT_SEED = 0
DEFAULT_SAMPLES = 10**4


def default_tolerances() -> dict:
    return {k: v for k, (v, _) in TOLERANCES.items()}


def merge_tolerances(overrides: Optional[Mapping[str, object]] = None) -> dict:
    """Defaults updated with ``overrides``; unknown names raise :class:`ParseError`."""
    tol = default_tolerances()
    for key, value in (overrides or {}).items():
        if key not in TOLERANCES:
            raise ParseError(f"unknown tolerance {key!r}; known: {', '.join(sorted(TOLERANCES))}")
        try:
            val = float(value)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"tolerance {key!r} must be a number, got {value!r}") from exc
        if not val > 0:
            raise ParseError(f"tolerance {key!r} must be positive")
        tol[key] = val
    return tol


@dataclass
class RunConfig:
    command: str
    tolerances: dict = field(default_factory=default_tolerances)
    seed: int = DEFAULT_SEED
    output_path: Optional[str] = None

    def tol(self, name: str) -> float:
        return self.tolerances[name]


def thread_count() -> int:
    """Worker cap from ``SCHOTTKY_THREADS`` (default 1, i.e. run inline)."""
    raw = os.environ.get("SCHOTTKY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn: Callable[[T], U], items: Iterable[T]) -> List[U]:
    """``[fn(x) for x in items]``, fanned out over threads when allowed.

    Results keep input order regardless of completion order, so reports
    assembled from them are deterministic.
    """
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
