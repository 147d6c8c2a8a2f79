"""Covering constructions for Hausdorff-type measures and their comparison.

For a set family F and exponent eta, the delta-level quantity is the
infimum of sum_j rho_j**eta over countable coverings of A by members
F(x_j, rho_j) with 0 < rho_j < delta; the measure is its limit as
delta -> 0.  The infimum is never claimed here: the toolkit constructs
explicit coverings, reports their sums as upper bounds for every
admissible delta, and flags divergence along a delta schedule.

Comparison transforms implement the covering map behind the general
inequality: when F(x, rho) is always contained in some
Ftilde(z, kappa rho**(eta/eta_tilde)), an F-covering maps element-wise to
an Ftilde-covering whose sum inflates by exactly kappa**eta_tilde.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ComparisonError, ConfigurationError
from .kernels import GaussTransition, ProfilePair, SpaceTimeKernel
from .shapes import (CylinderFamily, GBallFamily, HeatBallFamily,
                     ParabolicBoxFamily, ShapeFamily, admissible_cylinder_factor)


# ---------------------------------------------------------------------------
# coverings

class Covering:
    """A finite covering attempt: family, elements (center, rho), exponent."""

    family: ShapeFamily
    eta: float

    @property
    def count(self) -> int:
        raise NotImplementedError

    @property
    def covering_sum(self) -> float:
        raise NotImplementedError

    @property
    def max_rho(self) -> float:
        raise NotImplementedError

    def covers(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def element_arrays(self, limit: int = 200_000) -> tuple[np.ndarray, np.ndarray]:
        """Explicit (centers, rhos); guarded against huge implicit grids."""
        raise NotImplementedError


class ListCovering(Covering):
    def __init__(self, family: ShapeFamily, centers, rhos, eta: float):
        self.family = family
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
        if self.centers.shape[0] != self.rhos.shape[0]:
            raise ValueError("centers and rhos must align")
        if np.any(self.rhos <= 0):
            raise ValueError("covering parameters must be positive")
        self.eta = float(eta)

    @property
    def count(self) -> int:
        return int(self.rhos.shape[0])

    @property
    def covering_sum(self) -> float:
        return float(np.sum(self.rhos ** self.eta))

    @property
    def max_rho(self) -> float:
        return float(self.rhos.max()) if self.count else 0.0

    def covers(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        mask = np.zeros(pts.shape[0], dtype=bool)
        for center, rho in zip(self.centers, self.rhos):
            todo = ~mask
            if not np.any(todo):
                break
            mask[todo] = self.family.contains_many(center, float(rho), pts[todo])
        return mask

    def element_arrays(self, limit: int = 200_000):
        return self.centers, self.rhos


def empty_covering(family: ShapeFamily, eta: float) -> ListCovering:
    return ListCovering(family, np.empty((0, family.dim)), np.empty(0), eta)


class GridCovering(Covering):
    """An implicit covering by one element per tile of an axis grid.

    Tiles are closed boxes of the given pitches starting at `origin`;
    the element of tile index i sits at the tile center plus `anchor`
    and covers its tile by construction of the family's grid_tile.
    `kept`, when present, lists the flat indices of retained tiles.
    """

    def __init__(self, family: ShapeFamily, eta: float, rho: float,
                 origin: np.ndarray, counts: np.ndarray, pitch: np.ndarray,
                 anchor: np.ndarray, kept: Optional[np.ndarray] = None):
        if rho <= 0:
            raise ValueError("covering parameter must be positive")
        self.family = family
        self.eta = float(eta)
        self.rho = float(rho)
        self.origin = np.asarray(origin, dtype=float)
        self.counts = np.asarray(counts, dtype=np.int64)
        self.pitch = np.asarray(pitch, dtype=float)
        self.anchor = np.asarray(anchor, dtype=float)
        self.kept = None if kept is None else np.asarray(kept, dtype=np.int64)

    @property
    def count(self) -> int:
        if self.kept is not None:
            return int(self.kept.size)
        return int(np.prod(self.counts))

    @property
    def covering_sum(self) -> float:
        return self.count * self.rho ** self.eta

    @property
    def max_rho(self) -> float:
        return self.rho

    def _tile_index(self, pts: np.ndarray) -> np.ndarray:
        rel = (pts - self.origin) / self.pitch
        idx = np.floor(rel).astype(np.int64)
        return np.clip(idx, 0, self.counts - 1)

    def _center_of(self, idx: np.ndarray) -> np.ndarray:
        return self.origin + (idx + 0.5) * self.pitch + self.anchor

    def _kept_mask(self, idx: np.ndarray) -> np.ndarray:
        if self.kept is None:
            return np.ones(idx.shape[0], dtype=bool)
        flat = np.ravel_multi_index(idx.T, tuple(self.counts))
        pos = np.searchsorted(self.kept, flat)
        pos = np.clip(pos, 0, self.kept.size - 1)
        return self.kept[pos] == flat

    def covers(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = pts.shape[1]
        mask = np.zeros(pts.shape[0], dtype=bool)
        base = self._tile_index(pts)
        # own tile first, then neighboring tiles for boundary stragglers
        offsets = [np.zeros(d, dtype=np.int64)]
        offsets += [np.array(o, dtype=np.int64)
                    for o in itertools.product((-1, 0, 1), repeat=d)
                    if any(o)]
        for off in offsets:
            todo = ~mask
            if not np.any(todo):
                break
            idx = np.clip(base[todo] + off, 0, self.counts - 1)
            ok = self._kept_mask(idx)
            centers = self._center_of(idx)
            sub = np.zeros(int(todo.sum()), dtype=bool)
            # contains_many takes one center; group by unique tile lazily
            if np.any(ok):
                which = np.flatnonzero(ok)
                for j in which:
                    sub[j] = bool(self.family.contains_many(
                        centers[j], self.rho, pts[todo][j:j + 1])[0])
            mask[np.flatnonzero(todo)[sub]] = True
        return mask

    def element_arrays(self, limit: int = 200_000):
        if self.count > limit:
            raise ConfigurationError(
                f"grid covering holds {self.count} elements; raise `limit` to export")
        if self.kept is not None:
            flat = self.kept
        else:
            flat = np.arange(self.count, dtype=np.int64)
        idx = np.stack(np.unravel_index(flat, tuple(self.counts)), axis=1)
        centers = self._center_of(idx)
        return centers, np.full(flat.size, self.rho)


def covering_sum(c: Covering) -> float:
    """sum of rho_j**eta over the covering's elements."""
    return c.covering_sum


# ---------------------------------------------------------------------------
# verification and construction

@dataclass(frozen=True)
class CoverageReport:
    ok: bool
    probes: int
    uncovered: int
    vacuous: bool = False

    def __bool__(self) -> bool:
        return self.ok


def verify_covering(c: Covering, test_set, probes: int,
                    seed: int = 0) -> CoverageReport:
    """Probe the covering condition with points drawn from the test set."""
    if getattr(test_set, "sample", None) is None:
        raise ConfigurationError("test set has no sampler")
    if probes == 0:
        return CoverageReport(ok=True, probes=0, uncovered=0, vacuous=True)
    rng = np.random.default_rng(seed)
    pts = test_set.sample(probes, rng)
    covered = c.covers(pts)
    uncovered = int(np.sum(~covered))
    return CoverageReport(ok=uncovered == 0, probes=probes, uncovered=uncovered)


def build_grid_covering(test_set, family: ShapeFamily, delta: float,
                        eta: float, rho: Optional[float] = None) -> GridCovering:
    """Anisotropy-adapted grid covering with parameter strictly below delta.

    The grid pitch per axis equals the family's tile extent at
    rho = delta/2, so dyadic deltas tile dyadic windows exactly.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    lo, hi = test_set.bounds()
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise ConfigurationError("unbounded set: window it first")
    if lo.shape[0] != family.dim:
        raise ValueError(f"set dimension {lo.shape[0]} != family dimension {family.dim}")
    rho = delta / 2.0 if rho is None else float(rho)
    if not (0 < rho < delta):
        raise ValueError("rho must lie in (0, delta)")
    span = hi - lo
    eff_dim = int(np.sum(span > 0))
    extents, anchor = family.grid_tile(rho, max(eff_dim, 1))
    counts = np.ones(family.dim, dtype=np.int64)
    origin = lo.copy()
    for a in range(family.dim):
        if span[a] > 0:
            counts[a] = max(1, int(math.ceil(span[a] / extents[a] - 1e-9)))
        else:
            origin[a] = lo[a] - extents[a] / 2.0
    kept = None
    if not getattr(test_set, "window_filling", True):
        kept = _prune_tiles(test_set, origin, counts, extents)
    return GridCovering(family, eta, rho, origin, counts, extents, anchor, kept)


def _prune_tiles(test_set, origin, counts, pitch) -> np.ndarray:
    """Keep tiles whose closed box meets the set (axis-product sets only)."""
    per_axis = []
    for a in range(counts.shape[0]):
        edges_lo = origin[a] + pitch[a] * np.arange(counts[a])
        edges_hi = edges_lo + pitch[a]
        hits = test_set.axis_intersects(a, edges_lo, edges_hi)
        per_axis.append(np.flatnonzero(hits))
    total = 1
    for ids in per_axis:
        total *= ids.size
    if total > 50_000_000:
        raise ConfigurationError("pruned covering would still be too large")
    mesh = np.meshgrid(*per_axis, indexing="ij")
    idx = np.stack([m.ravel() for m in mesh], axis=1)
    flat = np.ravel_multi_index(idx.T, tuple(counts))
    return np.sort(flat)


# ---------------------------------------------------------------------------
# measure estimates

@dataclass
class MeasureRow:
    delta: float
    covering_sum: float
    count: int
    best_sum: float = math.nan
    correction: Optional[float] = None


@dataclass
class MeasureEstimate:
    """Constructed upper bounds for the delta-level covering quantity.

    Rows are sorted by decreasing delta; `best_sum` is the running best
    over all admissible (finer) rows, hence nondecreasing as delta
    shrinks.  `uniform_bound` is set when the schedule shows no
    divergence and then upper-bounds every delta level at once.
    """

    family_name: str
    eta: float
    set_name: str
    rows: list[MeasureRow] = field(default_factory=list)
    uniform_bound: Optional[float] = None
    divergent: bool = False
    scale_note: Optional[str] = None

    def finalize(self) -> "MeasureEstimate":
        self.rows.sort(key=lambda r: -r.delta)
        best = math.inf
        for row in reversed(self.rows):
            best = min(best, row.covering_sum)
            row.best_sum = best
        self.divergent = _divergence_flag([r.covering_sum for r in self.rows])
        if self.rows and not self.divergent:
            self.uniform_bound = max(r.covering_sum for r in self.rows)
        else:
            self.uniform_bound = None
        return self

    def to_records(self) -> list[dict]:
        return [
            {"delta": r.delta, "covering_sum": r.covering_sum, "count": r.count,
             "best_sum": r.best_sum, "correction": r.correction}
            for r in self.rows
        ]

    def to_csv(self) -> str:
        lines = ["delta,covering_sum,count"]
        for r in self.rows:
            lines.append(f"{r.delta!r},{r.covering_sum!r},{r.count}")
        return "\n".join(lines) + "\n"


def _divergence_flag(sums: Sequence[float], factor: float = 1.5,
                     run: int = 4) -> bool:
    streak = 0
    for a, b in zip(sums, sums[1:]):
        if a > 0 and b >= factor * a:
            streak += 1
            if streak >= run:
                return True
        else:
            streak = 0
    return False


DEFAULT_DELTAS = tuple(2.0 ** -k for k in range(1, 13))


def estimate_measure(test_set, family: ShapeFamily, eta: float,
                     delta_schedule: Sequence[float] = DEFAULT_DELTAS,
                     probes: int = 128, seed: int = 0) -> MeasureEstimate:
    """One verified grid covering per delta of a strictly decreasing schedule."""
    deltas = [float(d) for d in delta_schedule]
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta schedule must be strictly decreasing")
    est = MeasureEstimate(family_name=family.name, eta=float(eta),
                          set_name=getattr(test_set, "name", "set"))
    if getattr(test_set, "is_empty", False):
        est.rows = [MeasureRow(d, 0.0, 0) for d in deltas]
        return est.finalize()
    for i, d in enumerate(deltas):
        cov = build_grid_covering(test_set, family, d, eta)
        if probes:
            rep = verify_covering(cov, test_set, probes, seed=seed + i)
            if not rep.ok:
                raise ConfigurationError(
                    f"constructed covering failed verification at delta={d}")
        est.rows.append(MeasureRow(d, cov.covering_sum, cov.count))
    return est.finalize()


# ---------------------------------------------------------------------------
# comparison transforms

@dataclass(frozen=True)
class ComparisonParams:
    """Element map behind a covering comparison.

    Maps F(x, rho) into target_family(witness(x, rho), kappa * rho**(eta/eta_tilde));
    `shift` gives the uniform center displacement as a function of rho
    (all catalog witnesses are translations).
    """

    eta: float
    eta_tilde: float
    kappa: float
    target_family: ShapeFamily
    shift: Callable[[float], np.ndarray]
    name: str = "comparison"

    def witness(self, center, rho: float) -> np.ndarray:
        return np.asarray(center, dtype=float) + self.shift(float(rho))

    def target_rho(self, rho) -> np.ndarray:
        return self.kappa * np.asarray(rho, dtype=float) ** (self.eta / self.eta_tilde)


def transform_covering(c: Covering, params: ComparisonParams,
                       check_probes: int = 0, seed: int = 0) -> Covering:
    """Element-wise image covering; sums inflate by exactly kappa**eta_tilde."""
    if check_probes:
        _check_witness(c, params, check_probes, seed)
    if isinstance(c, GridCovering):
        return GridCovering(params.target_family, params.eta_tilde,
                            float(params.target_rho(c.rho)),
                            c.origin, c.counts, c.pitch,
                            c.anchor + params.shift(c.rho), kept=c.kept)
    centers, rhos = c.element_arrays()
    if centers.shape[0]:
        shifts = np.stack([params.shift(float(r)) for r in rhos])
        new_centers = centers + shifts
    else:
        new_centers = centers
    return ListCovering(params.target_family, new_centers,
                        params.target_rho(rhos), params.eta_tilde)


def _check_witness(c: Covering, params: ComparisonParams, probes: int,
                   seed: int) -> None:
    rng = np.random.default_rng(seed)
    centers, rhos = c.element_arrays()
    take = min(centers.shape[0], 16)
    for center, rho in zip(centers[:take], rhos[:take]):
        pts = c.family.sample(center, float(rho), probes, rng)
        target_center = params.witness(center, float(rho))
        inside = params.target_family.contains_many(
            target_center, float(params.target_rho(rho)), pts)
        if not np.all(inside):
            raise ComparisonError(
                f"{params.name}: witness inclusion violated "
                f"({int(np.sum(~inside))}/{probes} probes outside)")


def heat_ball_to_box(n: int, scale: float = 1.0) -> ComparisonParams:
    """Heat balls into parabolic boxes: kappa = 2 sqrt(n), eta 1 -> n."""
    return ComparisonParams(
        eta=1.0, eta_tilde=float(n), kappa=2.0 * math.sqrt(n),
        target_family=ParabolicBoxFamily(n),
        shift=lambda rho: np.zeros(n + 1),
        name="heat-ball-to-box")


def box_to_heat_ball(n: int, scale: float = 1.0) -> ComparisonParams:
    """Parabolic boxes into heat balls shifted up by rho^2: kappa = 2^(n/2)."""
    def shift(rho: float) -> np.ndarray:
        z = np.zeros(n + 1)
        z[-1] = rho * rho
        return z

    return ComparisonParams(
        eta=float(n), eta_tilde=1.0, kappa=2.0 ** (n / 2.0),
        target_family=HeatBallFamily(n, scale=scale), shift=shift,
        name="box-to-heat-ball")


def gball_to_cylinder(profile: ProfilePair, spatial_dim: int) -> ComparisonParams:
    """Kernel balls into cylinders of radius (C rho)^(1/alpha)."""
    from .kernels import profile_constants

    consts = profile_constants(profile)
    C = max(float(profile.phi2(np.array(0.0))), consts.M)
    return ComparisonParams(
        eta=1.0, eta_tilde=profile.alpha, kappa=C ** (1.0 / profile.alpha),
        target_family=CylinderFamily(spatial_dim, profile.beta),
        shift=lambda rho: np.zeros(spatial_dim + 1),
        name="ball-to-cylinder")


def cylinder_to_gball(profile: ProfilePair, kernel: SpaceTimeKernel) -> ComparisonParams:
    """Cylinders into shifted kernel balls; a cylinder of radius rc maps to
    the ball of parameter rc^alpha / kappa_zb around (x, r + 2 rc^beta)."""
    eta_zb, kappa_zb = admissible_cylinder_factor(profile)

    def shift(rc: float) -> np.ndarray:
        z = np.zeros(kernel.dim)
        z[-1] = 2.0 * rc ** profile.beta
        return z

    return ComparisonParams(
        eta=profile.alpha, eta_tilde=1.0, kappa=1.0 / kappa_zb,
        target_family=GBallFamily(kernel), shift=shift,
        name="cylinder-to-ball")


def rescale_kernel_ball(factor: float, kernel: SpaceTimeKernel) -> ComparisonParams:
    """Identity-center comparison between two normalizations of one kernel."""
    return ComparisonParams(
        eta=1.0, eta_tilde=1.0, kappa=float(factor),
        target_family=GBallFamily(kernel),
        shift=lambda rho: np.zeros(kernel.dim),
        name="kernel-ball-rescale")


def mp_from_mnp(estimate: MeasureEstimate, n: int) -> MeasureEstimate:
    """Diameter-gauge parabolic bounds from exponent-n box bounds.

    Box diameters satisfy sqrt(n) rho <= diam <= sqrt(n) rho (1 + delta)
    for rho < delta, so sums scale by n**(n/2) and each row records the
    residual (1 + delta)**n correction factor.
    """
    scale = float(n) ** (n / 2.0)
    out = MeasureEstimate(
        family_name=estimate.family_name, eta=estimate.eta,
        set_name=estimate.set_name,
        scale_note=f"diameter gauge: sums scaled by n^(n/2) = {scale!r}")
    for r in estimate.rows:
        out.rows.append(MeasureRow(
            delta=math.sqrt(n) * r.delta * (1.0 + r.delta),
            covering_sum=scale * r.covering_sum,
            count=r.count,
            correction=(1.0 + r.delta) ** n))
    return out.finalize()
