"""Set families and the geometric inclusions between them.

Families are parametrized maps (center, rho) -> subset, with strict (open)
membership everywhere except the parabolic box, which is closed:

    kernel ball   {y : G(x, y) > 1/rho}
    heat ball     {(y, -s) : 0 < s < u, |y|^2 < 2 n s log(u/s)},  u = rho**(2/n)
    parabolic box [-rho/2, rho/2]^n x [-rho^2/2, rho^2/2]
    cylinder      {(y, s) : |y - x| < rho, |s - r| < rho**beta}
    metric ball   {y : |y - x| < rho}

The check_* verifiers make the proved inclusions executable: they sample
one family and assert membership in the other with the stated constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _core
from .errors import ConfigurationError, SamplingError
from .kernels import (CauchyTransition, GaussTransition, Kernel, ProfilePair,
                      RieszKernel, SpaceTimeKernel, Transition, as_coords,
                      profile_constants)

INTERIOR_MARGIN = 1e-12  # sampled points stay this far inside open sets


# ---------------------------------------------------------------------------
# families

class ShapeFamily:
    """A parametrized family of subsets of R^dim."""

    dim: int
    name: str
    closed: bool = False

    def contains(self, center, rho: float, candidate) -> bool:
        pts = np.atleast_2d(as_coords(candidate, self.dim))
        return bool(self.contains_many(as_coords(center, self.dim), rho, pts)[0])

    def contains_many(self, center: np.ndarray, rho: float,
                      points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self, center, rho: float) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def grid_tile(self, rho: float, eff_dim: int) -> tuple[np.ndarray, np.ndarray]:
        """(extents, anchor) of a box tile covered by the member at rho.

        Placing the member's center at tile_center + anchor covers the
        closed box of the given full extents (on up to eff_dim effective
        axes) centered at tile_center.
        """
        raise NotImplementedError

    def sample(self, center, rho: float, count: int,
               rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


def _ball_pitch(radius: float, eff_dim: int) -> float:
    # a ball of radius r covers a cube of side r when eff_dim <= 4
    if eff_dim <= 4:
        return radius
    return 2.0 * radius / math.sqrt(eff_dim)


def _sample_uniform_ball(k: int, radius: float, count: int,
                         rng: np.random.Generator) -> np.ndarray:
    vec = rng.normal(size=(count, k))
    norm = np.linalg.norm(vec, axis=1, keepdims=True)
    norm[norm == 0] = 1.0
    radii = radius * rng.uniform(size=(count, 1)) ** (1.0 / k)
    return vec / norm * radii


class MetricBallFamily(ShapeFamily):
    """Open Euclidean balls D(x, rho); rho is the radius itself."""

    def __init__(self, dim: int):
        self.dim = int(dim)
        self.name = f"metric-ball(dim={dim})"

    def contains_many(self, center, rho, points):
        return _core.metric_ball_mask(np.ascontiguousarray(points, dtype=float),
                                      np.ascontiguousarray(center, dtype=float),
                                      float(rho))

    def bounding_box(self, center, rho):
        c = as_coords(center, self.dim)
        return c - rho, c + rho

    def grid_tile(self, rho, eff_dim):
        pitch = _ball_pitch(rho, eff_dim)
        return np.full(self.dim, pitch), np.zeros(self.dim)

    def sample(self, center, rho, count, rng):
        c = as_coords(center, self.dim)
        return c + _sample_uniform_ball(self.dim, rho * (1 - INTERIOR_MARGIN),
                                        count, rng)


class ParabolicBoxFamily(ShapeFamily):
    """Closed boxes with spatial side rho and temporal side rho^2."""

    closed = True

    def __init__(self, n: int):
        self.n = int(n)
        self.dim = self.n + 1
        self.name = f"parabolic-box(n={n})"

    def half_extents(self, rho: float) -> np.ndarray:
        h = np.full(self.dim, rho / 2.0)
        h[-1] = rho * rho / 2.0
        return h

    def contains_many(self, center, rho, points):
        c = np.asarray(center, dtype=float)
        h = self.half_extents(rho)
        return _core.box_mask(np.ascontiguousarray(points, dtype=float),
                              np.ascontiguousarray(c - h),
                              np.ascontiguousarray(c + h))

    def bounding_box(self, center, rho):
        c = as_coords(center, self.dim)
        h = self.half_extents(rho)
        return c - h, c + h

    def grid_tile(self, rho, eff_dim):
        ext = np.full(self.dim, rho)
        ext[-1] = rho * rho
        return ext, np.zeros(self.dim)

    def sample(self, center, rho, count, rng):
        c = as_coords(center, self.dim)
        h = self.half_extents(rho)
        return c + rng.uniform(-1.0, 1.0, size=(count, self.dim)) * h


class HeatBallFamily(ShapeFamily):
    """Heat balls: kernel balls of the unnormalized heat kernel on R^{n+1}."""

    def __init__(self, n: int, scale: float = 1.0):
        self.n = int(n)
        self.dim = self.n + 1
        self.scale = float(scale)  # transition prefactor; 1 is the classical form
        self.name = f"heat-ball(n={n})"

    def time_extent(self, rho: float) -> float:
        return (rho * self.scale) ** (2.0 / self.n)

    def contains_many(self, center, rho, points):
        return _core.heat_ball_mask(np.ascontiguousarray(points, dtype=float),
                                    np.ascontiguousarray(center, dtype=float),
                                    self.n, self.time_extent(rho))

    def bounding_box(self, center, rho):
        c = as_coords(center, self.dim)
        u = self.time_extent(rho)
        r = math.sqrt(self.n * u)
        lo, hi = c.copy(), c.copy()
        lo[:-1] -= r
        hi[:-1] += r
        lo[-1] -= u
        return lo, hi

    def grid_tile(self, rho, eff_dim):
        # time band [u/4, u/2] below the center keeps the spatial radius
        # at least sqrt(n u log 2); inscribe a cube in that ball
        u = self.time_extent(rho)
        k = max(1, min(eff_dim, self.n))
        side = 2.0 * math.sqrt(self.n * u * math.log(2.0) / k)
        ext = np.full(self.dim, side)
        ext[-1] = u / 4.0
        anchor = np.zeros(self.dim)
        anchor[-1] = 3.0 * u / 8.0
        return ext, anchor

    def sample(self, center, rho, count, rng):
        c = as_coords(center, self.dim)
        u = self.time_extent(rho)
        tight = math.sqrt(2.0 * self.n * u / math.e)
        out = np.empty((count, self.dim))
        got = 0
        drawn = 0
        batch = max(4 * count, 1024)
        while got < count:
            y = _sample_uniform_ball(self.n, tight, batch, rng)
            s = rng.uniform(0.0, u, size=batch)
            d2 = np.einsum("ij,ij->i", y, y)
            with np.errstate(divide="ignore"):
                bound = 2.0 * self.n * s * np.log(np.where(s > 0, u / s, 1.0))
            keep = (s > 0) & (d2 < (1 - INTERIOR_MARGIN) * bound)
            drawn += batch
            take = min(count - got, int(keep.sum()))
            if take > 0:
                sel = np.flatnonzero(keep)[:take]
                out[got:got + take, :-1] = c[:-1] + y[sel]
                out[got:got + take, -1] = c[-1] - s[sel]
                got += take
            if drawn > 1e7 and got == 0:
                raise SamplingError("heat-ball rejection sampling starved")
        return out


class CylinderFamily(ShapeFamily):
    """Space-time cylinders: spatial radius rho, time half-height rho**beta."""

    def __init__(self, spatial_dim: int, beta: float):
        self.n = int(spatial_dim)
        self.dim = self.n + 1
        self.beta = float(beta)
        self.name = f"cylinder(n={self.n},beta={self.beta:g})"

    def contains_many(self, center, rho, points):
        return _core.cylinder_mask(np.ascontiguousarray(points, dtype=float),
                                   np.ascontiguousarray(center, dtype=float),
                                   float(rho), self.beta)

    def bounding_box(self, center, rho):
        c = as_coords(center, self.dim)
        h = np.full(self.dim, rho)
        h[-1] = rho ** self.beta
        return c - h, c + h

    def grid_tile(self, rho, eff_dim):
        k = max(1, min(eff_dim, self.n))
        ext = np.full(self.dim, 2.0 * rho / math.sqrt(k))
        ext[-1] = 2.0 * rho ** self.beta
        return ext, np.zeros(self.dim)

    def sample(self, center, rho, count, rng):
        c = as_coords(center, self.dim)
        out = np.empty((count, self.dim))
        out[:, :-1] = c[:-1] + _sample_uniform_ball(
            self.n, rho * (1 - INTERIOR_MARGIN), count, rng)
        h = rho ** self.beta * (1 - INTERIOR_MARGIN)
        out[:, -1] = c[-1] + rng.uniform(-h, h, size=count)
        return out


class GBallFamily(ShapeFamily):
    """Kernel balls {y : G(x, y) > 1/rho} of a concrete kernel."""

    def __init__(self, kernel: Kernel):
        self.kernel = kernel
        self.dim = kernel.dim
        self.name = f"kernel-ball[{kernel.name}]"

    # batch membership uses the algebraically equivalent closed forms
    def contains_many(self, center, rho, points):
        ker = self.kernel
        pts = np.ascontiguousarray(points, dtype=float)
        c = np.ascontiguousarray(center, dtype=float)
        if isinstance(ker, RieszKernel):
            return _core.metric_ball_mask(pts, c, ker.ball_radius(rho))
        if isinstance(ker, SpaceTimeKernel):
            tr = ker.transition
            if isinstance(tr, GaussTransition):
                u = (rho * tr.scale) ** (2.0 / tr.n)
                return _core.heat_ball_mask(pts, c, tr.n, u)
            dt = c[-1] - pts[:, -1]
            ok = dt > 0
            d = np.linalg.norm(pts[:, :-1] - c[:-1], axis=1)
            vals = np.zeros(pts.shape[0])
            if np.any(ok):
                vals[ok] = tr.eval_dt(d[ok], dt[ok])
            return ok & (vals > 1.0 / rho)
        raise ConfigurationError(f"no ball geometry for kernel {ker.name}")

    def contains(self, center, rho, candidate) -> bool:
        # scalar path follows the defining inequality directly
        return self.kernel.eval(center, candidate) > 1.0 / rho

    def _profile(self) -> ProfilePair:
        ker = self.kernel
        if not isinstance(ker, SpaceTimeKernel):
            raise ConfigurationError("profile geometry needs a space-time kernel")
        return ker.transition.profile()

    def bounding_box(self, center, rho):
        ker = self.kernel
        c = as_coords(center, self.dim)
        if isinstance(ker, RieszKernel):
            r = ker.ball_radius(rho)
            return c - r, c + r
        prof = self._profile()
        consts = profile_constants(prof)
        phi2_0 = float(prof.phi2(np.array(0.0)))
        tmax = (phi2_0 * rho) ** (prof.beta / prof.alpha)
        dmax = (consts.M * rho) ** (1.0 / prof.alpha)
        lo, hi = c.copy(), c.copy()
        lo[:-1] -= dmax
        hi[:-1] += dmax
        lo[-1] -= tmax
        return lo, hi

    def grid_tile(self, rho, eff_dim):
        ker = self.kernel
        if isinstance(ker, RieszKernel):
            pitch = _ball_pitch(ker.ball_radius(rho), eff_dim)
            return np.full(self.dim, pitch), np.zeros(self.dim)
        if isinstance(ker, SpaceTimeKernel) and isinstance(ker.transition, GaussTransition):
            tr = ker.transition
            return HeatBallFamily(tr.n, tr.scale).grid_tile(rho, eff_dim)
        # generic profiled transition: inscribe the proved cylinder
        prof = self._profile()
        eta, kappa = admissible_cylinder_factor(prof)
        rc = (kappa * rho) ** (1.0 / prof.alpha)
        k = max(1, min(eff_dim, self.dim - 1))
        ext = np.full(self.dim, 2.0 * rc / math.sqrt(k))
        ext[-1] = 2.0 * rc ** prof.beta
        anchor = np.zeros(self.dim)
        anchor[-1] = 2.0 * eta * rho ** (prof.beta / prof.alpha)
        return ext, anchor

    def sample(self, center, rho, count, rng):
        ker = self.kernel
        c = as_coords(center, self.dim)
        if isinstance(ker, RieszKernel):
            return MetricBallFamily(self.dim).sample(c, ker.ball_radius(rho),
                                                     count, rng)
        if isinstance(ker, SpaceTimeKernel) and isinstance(ker.transition, GaussTransition):
            tr = ker.transition
            return HeatBallFamily(tr.n, tr.scale).sample(c, rho, count, rng)
        return sample_spacetime_gball(ker, c, rho, count, rng)


def sample_spacetime_gball(kernel: SpaceTimeKernel, center: np.ndarray,
                           rho: float, count: int,
                           rng: np.random.Generator) -> np.ndarray:
    """Rejection-sample the kernel ball from its profile bounding box."""
    fam = GBallFamily(kernel)
    lo, hi = fam.bounding_box(center, rho)
    tr = kernel.transition
    n = tr.n
    dmax = hi[0] - center[0]
    tmax = center[-1] - lo[-1]
    threshold = (1.0 / rho) * (1 + INTERIOR_MARGIN)
    out = np.empty((count, n + 1))
    got = 0
    drawn = 0
    batch = max(4 * count, 1024)
    while got < count:
        y = _sample_uniform_ball(n, dmax, batch, rng)
        t = rng.uniform(0.0, tmax, size=batch)
        d = np.linalg.norm(y, axis=1)
        keep = tr.eval_dt(d, t) > threshold
        drawn += batch
        take = min(count - got, int(keep.sum()))
        if take > 0:
            sel = np.flatnonzero(keep)[:take]
            out[got:got + take, :-1] = center[:-1] + y[sel]
            out[got:got + take, -1] = center[-1] - t[sel]
            got += take
        if (drawn >= 1 << 20 and got / drawn < 1e-6) or drawn > 5e7:
            raise SamplingError(
                f"kernel-ball rejection acceptance too low ({got}/{drawn})")
    return out


# ---------------------------------------------------------------------------
# membership operations

def gball_contains(kernel: Kernel, center, rho: float, y) -> bool:
    """Defining inequality G(center, y) > 1/rho, evaluated directly."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return kernel.eval(center, y) > 1.0 / rho


def heat_ball_contains(center, rho: float, yp, n: int) -> bool:
    """Closed-form heat-ball membership of yp relative to center."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    fam = HeatBallFamily(n)
    return fam.contains(as_coords(center, n + 1), rho, as_coords(yp, n + 1))


def parabolic_box_contains(center, rho: float, yp) -> bool:
    """Closed-box membership of yp in P(center, rho)."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    c = as_coords(center)
    fam = ParabolicBoxFamily(c.shape[0] - 1)
    return fam.contains(c, rho, as_coords(yp, c.shape[0]))


@dataclass(frozen=True)
class HeatBallExtents:
    time_extent: float
    cylinder_radius: float
    tight_radius: float


def heat_ball_extents(rho: float, n: int) -> HeatBallExtents:
    """Time extent rho^(2/n) and the two enclosing spatial radii.

    The spatial section radius sqrt(2 n s log(u/s)) is maximized at
    s = u/e, giving the tight radius sqrt(2n/e) rho^(1/n); the coarser
    cylinder radius is sqrt(n) rho^(1/n).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    u = rho ** (2.0 / n)
    return HeatBallExtents(
        time_extent=u,
        cylinder_radius=math.sqrt(n) * rho ** (1.0 / n),
        tight_radius=math.sqrt(2.0 * n / math.e) * rho ** (1.0 / n),
    )


# ---------------------------------------------------------------------------
# inclusion verifiers

@dataclass
class InclusionReport:
    name: str
    params: dict
    samples: int
    violations: int
    vacuous: bool = False
    constants: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_record(self) -> dict:
        return {
            "check": self.name,
            "params": self.params,
            "samples": self.samples,
            "violations": self.violations,
            "vacuous": self.vacuous,
            "constants": self.constants,
            "ok": self.ok,
        }


def check_BP_inclusion(n: int, rho: float, samples: int,
                       seed: int = 0) -> InclusionReport:
    """Heat ball inside the parabolic box of side 2 sqrt(n) rho^(1/n)."""
    rng = np.random.default_rng(seed)
    params = {"n": n, "rho": rho, "seed": seed}
    if samples == 0:
        return InclusionReport("heat-ball-in-box", params, 0, 0, vacuous=True)
    ball = HeatBallFamily(n)
    c = np.zeros(n + 1)
    pts = ball.sample(c, rho, samples, rng)
    box = ParabolicBoxFamily(n)
    side = 2.0 * math.sqrt(n) * rho ** (1.0 / n)
    inside = box.contains_many(c, side, pts)
    return InclusionReport("heat-ball-in-box", params, samples,
                           int(np.sum(~inside)), constants={"box_side": side})


def check_PB_inclusion(n: int, rho: float) -> InclusionReport:
    """All vertices of the shifted box lie strictly inside the heat ball.

    The box P(-z', rho) with z' = (0, rho^2) has vertices (y, -s) with
    s = (k/2) rho^2 for k in {1, 3} and |y|^2 = n (rho/2)^2; membership in
    the heat ball of parameter 2^(n/2) rho^n reduces to 1/4 < k log(4/k).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    violations = 0
    u = 2.0 * rho * rho  # time extent of the target ball
    count = 0
    for k in (1, 3):
        s = 0.5 * k * rho * rho
        y2 = n * (rho / 2.0) ** 2  # shared by all 2^n spatial vertices
        count += 2 ** n
        if not (0.0 < s < u and y2 < 2.0 * n * s * math.log(u / s)):
            violations += 2 ** n
    scalar = {f"k={k}": k * math.log(4.0 / k) for k in (1, 3)}
    scalar_ok = all(v > 0.25 for v in scalar.values())
    value = 4.0 * math.log(4.0 / 3.0)
    identity_gap = abs(value - math.log(256.0 / 81.0))
    if not scalar_ok or value <= 1.0 or identity_gap > 1e-12:
        violations += 1
    return InclusionReport(
        "box-in-heat-ball", {"n": n, "rho": rho}, count, violations,
        constants={"ball_param": 2.0 ** (n / 2.0) * rho ** n,
                   "four_log_four_thirds": value, **scalar})


def check_BZ_inclusion(transition: Transition, rho: float, samples: int,
                       seed: int = 0,
                       profile: Optional[ProfilePair] = None) -> InclusionReport:
    """Kernel ball inside the cylinder of radius (C rho)^(1/alpha).

    C = max(Phi2(0), M) with M the sup of sigma^alpha Phi2(sigma).
    """
    prof = profile if profile is not None else transition.profile()
    consts = profile_constants(prof)
    phi2_0 = float(prof.phi2(np.array(0.0)))
    C = max(phi2_0, consts.M)
    rng = np.random.default_rng(seed)
    params = {"transition": transition.name, "rho": rho, "seed": seed}
    if samples == 0:
        return InclusionReport("ball-in-cylinder", params, 0, 0, vacuous=True,
                               constants={"C": C})
    kernel = SpaceTimeKernel(transition)
    center = np.zeros(kernel.dim)
    pts = GBallFamily(kernel).sample(center, rho, samples, rng)
    cyl = CylinderFamily(transition.n, prof.beta)
    radius = (C * rho) ** (1.0 / prof.alpha)
    inside = cyl.contains_many(center, radius, pts)
    return InclusionReport("ball-in-cylinder", params, samples,
                           int(np.sum(~inside)),
                           constants={"C": C, "cylinder_radius": radius})


def admissible_cylinder_factor(profile: ProfilePair) -> tuple[float, float]:
    """Largest grid eta in (0, 1) with (3 eta)^(alpha/beta) < Phi1(1).

    Returns (eta, kappa) with kappa = eta^(alpha/beta).  Coarse-to-fine
    grid search; raises if no grid point is admissible.
    """
    a_over_b = profile.alpha / profile.beta
    phi1_at_1 = float(profile.phi1(np.array(1.0)))
    if phi1_at_1 <= 0:
        raise ConfigurationError("Phi1(1) = 0: no admissible eta")
    admissible = lambda e: 0.0 < e < 1.0 and (3.0 * e) ** a_over_b < phi1_at_1
    lo, hi = 0.0, 1.0
    best = None
    for _ in range(6):
        grid = np.linspace(lo, hi, 65)[1:-1]
        ok = [e for e in grid if admissible(e)]
        if not ok:
            if best is None:
                hi = grid[0]
                continue
            break
        best = max(ok)
        step = grid[1] - grid[0]
        lo, hi = best, min(1.0, best + 2 * step)
    if best is None:
        raise ConfigurationError("no admissible eta found")
    return float(best), float(best ** a_over_b)


def check_ZB_inclusion(transition: Transition, rho: float, samples: int,
                       seed: int = 0,
                       profile: Optional[ProfilePair] = None) -> InclusionReport:
    """Cylinder of radius (kappa rho)^(1/alpha) inside a shifted kernel ball.

    The ball center sits 2 eta rho^(beta/alpha) above the cylinder center,
    with kappa = eta^(alpha/beta) and eta chosen so that
    (3 eta)^(alpha/beta) < Phi1(1).
    """
    prof = profile if profile is not None else transition.profile()
    eta, kappa = admissible_cylinder_factor(prof)
    rng = np.random.default_rng(seed)
    shift = 2.0 * eta * rho ** (prof.beta / prof.alpha)
    params = {"transition": transition.name, "rho": rho, "seed": seed}
    consts = {"eta": eta, "kappa": kappa, "witness_shift": shift}
    if samples == 0:
        return InclusionReport("cylinder-in-ball", params, 0, 0, vacuous=True,
                               constants=consts)
    n = transition.n
    center = np.zeros(n + 1)
    cyl = CylinderFamily(n, prof.beta)
    radius = (kappa * rho) ** (1.0 / prof.alpha)
    pts = cyl.sample(center, radius, samples, rng)
    witness = center.copy()
    witness[-1] += shift
    kernel = SpaceTimeKernel(transition)
    inside = GBallFamily(kernel).contains_many(witness, rho, pts)
    return InclusionReport("cylinder-in-ball", params, samples,
                           int(np.sum(~inside)), constants=consts)
