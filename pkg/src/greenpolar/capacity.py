"""Potentials of discrete measures and certified capacity lower bounds.

A candidate measure nu supported in a set A with a certified bound S on
sup G(nu) witnesses the capacity lower bound nu(A) / S: rescaling nu by
1/S gives an admissible measure (potential at most one) of that mass.
Certificates record how S was obtained: a grid maximum plus an explicit
margin, an analytic bound tied to the kernel and the measure's cell
structure, or both (the certified bound is never below a sampled value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .kernels import GaussTransition, Kernel, RieszKernel, SpaceTimeKernel

MACHINE_FLOOR = 1e-300
QUAD_LEVELS = 3  # midpoint refinement: 2**QUAD_LEVELS points per cell axis


@dataclass(frozen=True)
class DiscreteMeasure:
    """Weighted atoms plus constant-density axis-box cells.

    Cell extents may be zero on some axes (surface-type measures); the
    weight of a cell is its total mass.
    """

    atom_points: np.ndarray
    atom_weights: np.ndarray
    cell_centers: np.ndarray
    cell_extents: np.ndarray
    cell_weights: np.ndarray
    name: str = "measure"

    def __post_init__(self):
        for w in (self.atom_weights, self.cell_weights):
            if np.any(~np.isfinite(w)) or np.any(w < 0):
                raise ValueError("weights must be finite and nonnegative")

    @property
    def dim(self) -> int:
        if self.atom_points.shape[0]:
            return self.atom_points.shape[1]
        return self.cell_centers.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self.atom_weights.sum() + self.cell_weights.sum())

    @property
    def is_empty(self) -> bool:
        return self.atom_points.shape[0] == 0 and self.cell_centers.shape[0] == 0

    def scaled(self, a: float) -> "DiscreteMeasure":
        if a < 0:
            raise ValueError("scale must be nonnegative")
        return DiscreteMeasure(self.atom_points, a * self.atom_weights,
                               self.cell_centers, self.cell_extents,
                               a * self.cell_weights, name=f"{a:g}*{self.name}")

    def quadrature_atoms(self, levels: int = QUAD_LEVELS) -> tuple[np.ndarray, np.ndarray]:
        """Atoms plus midpoint product-quadrature nodes for every cell."""
        if levels < QUAD_LEVELS:
            raise ValueError(f"midpoint refinement must be >= {QUAD_LEVELS} levels")
        pts = [self.atom_points] if self.atom_points.shape[0] else []
        wts = [self.atom_weights] if self.atom_points.shape[0] else []
        m = 1 << levels
        for center, extent, weight in zip(self.cell_centers, self.cell_extents,
                                          self.cell_weights):
            axes = []
            for c, e in zip(center, extent):
                if e > 0:
                    offs = (np.arange(m) + 0.5) / m - 0.5
                    axes.append(c + offs * e)
                else:
                    axes.append(np.array([c]))
            mesh = np.meshgrid(*axes, indexing="ij")
            nodes = np.stack([g.ravel() for g in mesh], axis=1)
            pts.append(nodes)
            wts.append(np.full(nodes.shape[0], weight / nodes.shape[0]))
        if not pts:
            d = self.dim if self.cell_centers.size else 0
            return np.empty((0, d)), np.empty(0)
        return np.concatenate(pts), np.concatenate(wts)


def atoms(points, weights, name: str = "atoms") -> DiscreteMeasure:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    w = np.atleast_1d(np.asarray(weights, dtype=float))
    d = pts.shape[1]
    return DiscreteMeasure(pts, w, np.empty((0, d)), np.empty((0, d)),
                           np.empty(0), name=name)


def empty_measure(dim: int) -> DiscreteMeasure:
    return DiscreteMeasure(np.empty((0, dim)), np.empty(0), np.empty((0, dim)),
                           np.empty((0, dim)), np.empty(0), name="empty")


def lebesgue_cells(test_set, per_axis: int, name: Optional[str] = None) -> DiscreteMeasure:
    """Unit-density measure on a product test set, tiled into cells.

    Effective axes are split into `per_axis` equal cells; degenerate axes
    stay as zero-extent directions.  The total mass is the set's volume
    in its effective dimensions.
    """
    lo, hi = test_set.bounds()
    span = hi - lo
    eff = np.flatnonzero(span > 0)
    if eff.size == 0:
        raise ConfigurationError("set has no effective axes; use atoms instead")
    grids = []
    for a in range(lo.shape[0]):
        if span[a] > 0:
            edges = np.linspace(lo[a], hi[a], per_axis + 1)
            grids.append((edges[:-1] + edges[1:]) / 2.0)
        else:
            grids.append(np.array([lo[a]]))
    mesh = np.meshgrid(*grids, indexing="ij")
    centers = np.stack([g.ravel() for g in mesh], axis=1)
    extents = np.zeros_like(centers)
    cellvol = 1.0
    for a in eff:
        extents[:, a] = span[a] / per_axis
        cellvol *= span[a] / per_axis
    weights = np.full(centers.shape[0], cellvol)
    return DiscreteMeasure(np.empty((0, lo.shape[0])), np.empty(0),
                           centers, extents, weights,
                           name=name or f"lebesgue[{test_set.name}]")


# ---------------------------------------------------------------------------
# potentials

def potential_grid(kernel: Kernel, nu: DiscreteMeasure,
                   targets: np.ndarray) -> np.ndarray:
    """G(nu) at each target, cells integrated by midpoint quadrature."""
    targets = np.atleast_2d(np.asarray(targets, dtype=float))
    if nu.is_empty:
        return np.zeros(targets.shape[0])
    pts, wts = nu.quadrature_atoms()
    return kernel.potential_at(targets, pts, wts)


def potential(kernel: Kernel, nu: DiscreteMeasure, x) -> float:
    """G(nu)(x); may be +inf at atoms of singular kernels."""
    return float(potential_grid(kernel, nu, np.atleast_2d(
        np.asarray(x, dtype=float)))[0])


@dataclass(frozen=True)
class BallMassReport:
    mass_in_ball: float
    potential_at_center: float
    rho: float
    bound: float
    ok: bool

    def to_record(self) -> dict:
        return {"check": "ball-mass-vs-potential", "mass": self.mass_in_ball,
                "potential": self.potential_at_center, "rho": self.rho,
                "bound": self.bound, "ok": self.ok}


def check_ball_mass_bound(kernel: Kernel, nu: DiscreteMeasure, x,
                          rho: float) -> BallMassReport:
    """nu(B(x, rho)) against rho * G(nu)(x), with a 1e-9 relative slack."""
    from .shapes import GBallFamily

    if rho <= 0:
        raise ValueError("rho must be positive")
    center = np.asarray(x, dtype=float)
    pts, wts = nu.quadrature_atoms()
    if pts.shape[0]:
        inside = GBallFamily(kernel).contains_many(center, rho, pts)
        mass = float(wts[inside].sum())
    else:
        mass = 0.0
    pot = potential(kernel, nu, center)
    bound = rho * pot
    ok = bool(mass <= bound + 1e-9 * max(1.0, mass)) or math.isinf(bound)
    return BallMassReport(mass, pot, rho, bound, ok)


# ---------------------------------------------------------------------------
# capacity certificates

@dataclass(frozen=True)
class CapacityCertificate:
    set_name: str
    kernel_name: str
    measure_name: str
    mass: float
    sup_bound: float
    lower_bound: float
    grid_points: int
    grid_sup: float
    margin: float
    analytic_bound: Optional[float] = None
    diagnostic: Optional[str] = None

    def to_record(self) -> dict:
        return {
            "set": self.set_name, "kernel": self.kernel_name,
            "measure": self.measure_name, "mass": self.mass,
            "sup_bound": self.sup_bound, "lower_bound": self.lower_bound,
            "grid_points": self.grid_points, "grid_sup": self.grid_sup,
            "margin": self.margin, "analytic_bound": self.analytic_bound,
            "diagnostic": self.diagnostic,
        }


def analytic_sup_bound(kernel: Kernel, nu: DiscreteMeasure) -> Optional[float]:
    """Closed-form bound on sup G(nu) for recognized kernel/measure pairs.

    Space-time heat kernel with single-time spatial cells of density d:
    the spatial mass of the transition is t-independent, so the potential
    is at most d times that mass.  Heat kernel over a time-axis cell
    measure at one spatial point: the time integral of t**(-1/2) over a
    window of length T is at most 2 sqrt(T) (n = 1 only).
    """
    if not isinstance(kernel, SpaceTimeKernel):
        return None
    tr = kernel.transition
    if not isinstance(tr, GaussTransition):
        return None
    if nu.atom_points.shape[0] or not nu.cell_centers.shape[0]:
        return None
    ext = nu.cell_extents
    spatial_cells = np.all(ext[:, -1] == 0.0) and np.all(ext[:, :-1] > 0.0)
    if spatial_cells and np.ptp(nu.cell_centers[:, -1]) == 0.0:
        areas = np.prod(ext[:, :-1], axis=1)
        density = float(np.max(nu.cell_weights / areas))
        return density * tr.mass_factor()
    time_cells = (tr.n == 1 and np.all(ext[:, :-1] == 0.0)
                  and np.all(ext[:, -1] > 0.0)
                  and np.ptp(nu.cell_centers[:, :-1], axis=0).max() == 0.0)
    if time_cells:
        lengths = ext[:, -1]
        density = float(np.max(nu.cell_weights / lengths))
        window = float(nu.cell_centers[:, -1].max() + lengths.max() / 2
                       - (nu.cell_centers[:, -1].min() - lengths.max() / 2))
        return density * 2.0 * math.sqrt(window) * tr.scale
    return None


def capacity_lower_bound(kernel: Kernel, test_set, candidate: DiscreteMeasure,
                         grid: np.ndarray, margin: float = 0.0) -> CapacityCertificate:
    """Certificate lower_bound = mass / sup_bound for c(set).

    sup_bound is the grid maximum plus `margin`, improved by an analytic
    bound when one is recognized; it is never below a sampled value.
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    pots = potential_grid(kernel, candidate, grid)
    mass = candidate.total_mass
    grid_sup = float(np.max(pots)) if pots.size else 0.0
    analytic = analytic_sup_bound(kernel, candidate)
    if not np.all(np.isfinite(pots)):
        return CapacityCertificate(
            getattr(test_set, "name", "set"), kernel.name, candidate.name,
            mass, math.inf, 0.0, grid.shape[0], math.inf, margin, analytic,
            diagnostic="potential is unbounded on the evaluation grid")
    if analytic is not None:
        sup_bound = max(grid_sup, analytic)
    else:
        sup_bound = grid_sup + margin
    lower = mass / max(sup_bound, MACHINE_FLOOR)
    return CapacityCertificate(
        getattr(test_set, "name", "set"), kernel.name, candidate.name,
        mass, sup_bound, lower, grid.shape[0], grid_sup, margin, analytic)


@dataclass(frozen=True)
class CapMeasureReport:
    status: str  # "pass", "fail", "inconclusive"
    capacity_lower: float
    measure_upper: Optional[float]

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def to_record(self) -> dict:
        return {"check": "capacity-below-measure", "status": self.status,
                "capacity_lower": self.capacity_lower,
                "measure_upper": self.measure_upper}


def check_cap_le_measure(cert: CapacityCertificate,
                         measure_est) -> CapMeasureReport:
    """Capacity lower bound against a uniform covering upper bound."""
    ub = measure_est.uniform_bound
    if ub is None:
        return CapMeasureReport("inconclusive", cert.lower_bound, None)
    ok = cert.lower_bound <= ub * (1.0 + 1e-9)
    return CapMeasureReport("pass" if ok else "fail", cert.lower_bound, ub)


def grid_box(lo, hi, counts) -> np.ndarray:
    """Cartesian evaluation grid over a box; counts may vary per axis."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    counts = np.broadcast_to(np.asarray(counts, dtype=int), lo.shape)
    axes = [np.linspace(a, b, max(int(c), 1)) for a, b, c in zip(lo, hi, counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)
