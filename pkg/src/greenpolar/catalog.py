"""Catalog of concrete test sets with seeded samplers and bounding data.

Every set is an axis product inside a finite window, so grid coverings
can prune per axis.  Samplers draw points of the set itself; the
`member` predicate is the analytic description used to spot-check them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class AxisSpec:
    """One axis of a product set."""

    kind: str  # "point", "interval", "cantor"
    lo: float
    hi: float
    ratio: float = 0.0
    depth: int = 0


@dataclass(frozen=True)
class TestSet:
    name: str
    kind: str
    axes: tuple[AxisSpec, ...]
    spacetime: bool
    is_empty: bool = False

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def window_filling(self) -> bool:
        return all(a.kind != "cantor" for a in self.axes)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([a.lo for a in self.axes])
        hi = np.array([a.hi for a in self.axes])
        return lo, hi

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        out = np.empty((count, self.dim))
        for i, a in enumerate(self.axes):
            if a.kind == "point":
                out[:, i] = a.lo
            elif a.kind == "interval":
                out[:, i] = rng.uniform(a.lo, a.hi, size=count)
            else:
                out[:, i] = _sample_cantor(a, count, rng)
        return out

    def member(self, points: np.ndarray, atol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.ones(pts.shape[0], dtype=bool)
        for i, a in enumerate(self.axes):
            x = pts[:, i]
            if a.kind == "point":
                ok &= np.abs(x - a.lo) <= atol
            elif a.kind == "interval":
                ok &= (x >= a.lo - atol) & (x <= a.hi + atol)
            else:
                ok &= np.array([_cantor_contains(a, float(v), atol) for v in x])
        return ok

    def axis_intersects(self, axis: int, edges_lo: np.ndarray,
                        edges_hi: np.ndarray) -> np.ndarray:
        a = self.axes[axis]
        if a.kind == "point":
            return (edges_lo <= a.lo) & (a.lo <= edges_hi)
        # strict overlap: closed tiles cover their own span, so tiles that
        # only touch the set at an edge point are redundant
        if a.kind == "interval":
            return (edges_lo < a.hi) & (edges_hi > a.lo)
        return np.array([_cantor_hits_interval(a, lo, hi)
                         for lo, hi in zip(edges_lo, edges_hi)])

    def to_record(self) -> dict:
        return {"set": self.name, "kind": self.kind, "dim": self.dim,
                "spacetime": self.spacetime}


# Cantor helpers: depth-d approximation of the set kept when repeatedly
# retaining the two outer `ratio` fractions of each interval.

def _cantor_cells(a: AxisSpec, lo: float, hi: float, depth: int):
    if depth == 0:
        yield lo, hi
        return
    w = (hi - lo) * a.ratio
    yield from _cantor_cells(a, lo, lo + w, depth - 1)
    yield from _cantor_cells(a, hi - w, hi, depth - 1)


def _sample_cantor(a: AxisSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    bits = rng.integers(0, 2, size=(count, a.depth))
    lo = np.full(count, a.lo)
    width = np.full(count, a.hi - a.lo)
    for j in range(a.depth):
        lo = lo + bits[:, j] * width * (1.0 - a.ratio)
        width = width * a.ratio
    return lo + rng.uniform(size=count) * width


def _cantor_contains(a: AxisSpec, x: float, atol: float) -> bool:
    lo, hi = a.lo, a.hi
    for _ in range(a.depth):
        if x < lo - atol or x > hi + atol:
            return False
        w = (hi - lo) * a.ratio
        if x <= lo + w + atol:
            hi = lo + w
        elif x >= hi - w - atol:
            lo = hi - w
        else:
            return False
    return lo - atol <= x <= hi + atol


def _cantor_hits_interval(a: AxisSpec, lo: float, hi: float) -> bool:
    stack = [(a.lo, a.hi, a.depth)]
    while stack:
        clo, chi, depth = stack.pop()
        if hi <= clo or lo >= chi:
            continue
        if depth == 0:
            return True
        w = (chi - clo) * a.ratio
        stack.append((clo, clo + w, depth - 1))
        stack.append((chi - w, chi, depth - 1))
    return False


# ---------------------------------------------------------------------------
# constructors

def singleton(point, spacetime: bool = False, name: Optional[str] = None) -> TestSet:
    pt = np.atleast_1d(np.asarray(point, dtype=float))
    axes = tuple(AxisSpec("point", float(v), float(v)) for v in pt)
    return TestSet(name or f"singleton(dim={pt.size})", "singleton", axes, spacetime)


def segment(ambient: int, k: int = 1, name: Optional[str] = None) -> TestSet:
    """[0,1]^k x {0}^(ambient-k) in R^ambient."""
    if not (1 <= k <= ambient):
        raise ValueError("need 1 <= k <= ambient")
    axes = tuple(AxisSpec("interval", 0.0, 1.0) if i < k else AxisSpec("point", 0.0, 0.0)
                 for i in range(ambient))
    return TestSet(name or f"segment(k={k},ambient={ambient})", "segment", axes,
                   spacetime=False)


def slice_set(n: int, name: Optional[str] = None) -> TestSet:
    """[0,1]^n x {0} in space-time R^(n+1)."""
    axes = tuple(AxisSpec("interval", 0.0, 1.0) for _ in range(n))
    axes += (AxisSpec("point", 0.0, 0.0),)
    return TestSet(name or f"slice(n={n})", "slice", axes, spacetime=True)


def vertical_segment(name: Optional[str] = None) -> TestSet:
    """{0} x [0,1] in space-time R^(1+1)."""
    axes = (AxisSpec("point", 0.0, 0.0), AxisSpec("interval", 0.0, 1.0))
    return TestSet(name or "vertical-segment", "vertical_segment", axes,
                   spacetime=True)


def cantor_dust(ratio: float, depth: int, ambient: int,
                spacetime: bool = False, name: Optional[str] = None) -> TestSet:
    if not (0.0 < ratio < 0.5):
        raise ValueError("ratio must lie in (0, 1/2)")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    axes = tuple(AxisSpec("cantor", 0.0, 1.0, ratio=ratio, depth=depth)
                 for _ in range(ambient))
    if spacetime:
        axes += (AxisSpec("point", 0.0, 0.0),)
    return TestSet(name or f"cantor-dust(r={ratio:g},depth={depth},ambient={ambient})",
                   "cantor_dust", axes, spacetime)


def window(lo, hi, spacetime: bool = False, name: Optional[str] = None) -> TestSet:
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    axes = tuple(AxisSpec("interval", float(a), float(b)) if b > a
                 else AxisSpec("point", float(a), float(a))
                 for a, b in zip(lo, hi))
    return TestSet(name or f"window(dim={lo.size})", "window", axes, spacetime)


def empty_set(dim: int, spacetime: bool = False) -> TestSet:
    axes = tuple(AxisSpec("point", 0.0, 0.0) for _ in range(dim))
    return TestSet(f"empty(dim={dim})", "empty", axes, spacetime, is_empty=True)


_REGISTRY: dict[str, Callable[[], TestSet]] = {
    "singleton3": lambda: singleton([0.0, 0.0, 0.0]),
    "singleton-st1": lambda: singleton([0.0, 0.0], spacetime=True),
    "segment3": lambda: segment(3),
    "segment4": lambda: segment(4),
    "segment5": lambda: segment(5),
    "square3": lambda: segment(3, k=2),
    "slice1": lambda: slice_set(1),
    "slice2": lambda: slice_set(2),
    "vertical": lambda: vertical_segment(),
    "cantor2": lambda: cantor_dust(1.0 / 4.0, 6, 2),
}


def named_sets() -> list[str]:
    return sorted(_REGISTRY)


def get_set(name: str) -> TestSet:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown test set {name!r}; known: {named_sets()}")
