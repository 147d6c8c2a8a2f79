"""Point spaces and the concrete kernel catalog.

Kernels come in two layers.  A *transition* is a density p_t(x, y) on
R^n x R^n x (0, inf); the catalog holds the heat (Gauss-Weierstrass)
transition in unnormalized and normalized form, the 1-stable (Cauchy)
transition, and profile-only transitions known through two-sided bounds

    t**(-alpha/beta) * Phi1(d / t**(1/beta))
        <= p_t(x, y) <=
    t**(-alpha/beta) * Phi2(d / t**(1/beta)).

A *kernel* G(x, y) is what potentials integrate against: the Riesz kernel
|x - y|**(beta - n) on R^n, or the space-time lift of a transition,

    G'((x, r), (y, s)) = p_{r-s}(x, y) for r > s, and 0 for r <= s.

All evaluation is IEEE double; the diagonal blow-up is represented by inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .errors import ConfigurationError
from . import _core


# ---------------------------------------------------------------------------
# points

def as_coords(x, dim: Optional[int] = None) -> np.ndarray:
    """Coerce a point-like to a finite float64 vector, checking length."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"expected a coordinate vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coordinates must be finite")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"expected {dim} coordinates, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True)
class Point:
    """A point of R^n."""

    coords: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        if not all(math.isfinite(c) for c in self.coords):
            raise ValueError("coordinates must be finite")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class SpaceTimePoint:
    """A point (x, r) of R^n x R; the time coordinate is stored last."""

    space: Point
    time: float

    def __post_init__(self):
        if not math.isfinite(self.time):
            raise ValueError("time must be finite")

    @property
    def dim(self) -> int:
        return self.space.dim + 1

    def as_array(self) -> np.ndarray:
        return np.append(self.space.as_array(), self.time)


def split_spacetime(xp, n: int) -> tuple[np.ndarray, float]:
    """Split an (n+1)-vector or SpaceTimePoint into (space, time)."""
    if isinstance(xp, SpaceTimePoint):
        return as_coords(xp.space.as_array(), n), float(xp.time)
    arr = as_coords(xp, n + 1)
    return arr[:-1], float(arr[-1])


# ---------------------------------------------------------------------------
# heat-kernel bound profiles

@dataclass(frozen=True)
class ProfilePair:
    """Two-sided bound shape (alpha, beta, Phi1, Phi2) for a transition.

    phi1 and phi2 must be decreasing and accept scalar or ndarray input;
    tail_grid is the positive grid used for sup searches and monotonicity
    spot checks.
    """

    alpha: float
    beta: float
    phi1: Callable[[np.ndarray], np.ndarray]
    phi2: Callable[[np.ndarray], np.ndarray]
    tail_grid: np.ndarray = field(
        default_factory=lambda: np.geomspace(1e-3, 60.0, 512)
    )
    name: str = "profile"

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")

    def validate(self, rtol: float = 1e-9) -> None:
        """Check the standing profile assumptions on the sampled grid."""
        grid = np.asarray(self.tail_grid, dtype=float)
        if np.any(grid <= 0):
            raise ValueError("tail_grid must be strictly positive")
        p1, p2 = self.phi1(grid), self.phi2(grid)
        if float(self.phi1(np.array(1.0))) <= 0:
            raise ConfigurationError("phi1(1) must be positive")
        if np.any(p1 > p2 * (1 + rtol) + 1e-300):
            raise ConfigurationError("phi1 must not exceed phi2")
        for p in (p1, p2):
            if np.any(np.diff(p) > rtol * np.abs(p[:-1]) + 1e-300):
                raise ConfigurationError("profile functions must be decreasing")
        tail = tail_integral(self, float(grid[-1]))
        if not math.isfinite(tail):
            raise ConfigurationError("sigma**(alpha-1) * phi2 tail diverges")


def tail_integral(profile: ProfilePair, lower: float) -> float:
    """integral_{lower}^inf sigma**alpha * Phi2(sigma) dsigma/sigma."""
    f = lambda s: s ** (profile.alpha - 1.0) * float(profile.phi2(np.array(s)))
    val, _ = integrate.quad(f, lower, np.inf, epsabs=1e-12, limit=200)
    return val


@dataclass(frozen=True)
class ProfileConstants:
    """Derived constants of a profile.

    M       sup of sigma**alpha * Phi2(sigma)
    c, C    Green sandwich constants (require beta < alpha, else None)
    c_mu    volume-bound constant 1 / Phi1(1)
    C_mu    ball-integral constant 2**alpha (2**beta - 1)**-1 c_mu C
    """

    M: float
    sigma_at_max: float
    c: Optional[float]
    C: Optional[float]
    c_mu: float
    C_mu: Optional[float]
    missing_reason: Optional[str] = None


def profile_constants(profile: ProfilePair) -> ProfileConstants:
    """Compute the derived constants of a two-sided bound profile."""
    a, b = profile.alpha, profile.beta
    grid = np.asarray(profile.tail_grid, dtype=float)
    vals = grid ** a * profile.phi2(grid)
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    neg = lambda s: -(s ** a * float(profile.phi2(np.array(s))))
    res = optimize.minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    M = max(float(vals[k]), -float(res.fun))
    sigma_at_max = float(res.x) if -res.fun >= vals[k] else float(grid[k])

    phi1_at_1 = float(profile.phi1(np.array(1.0)))
    if phi1_at_1 <= 0:
        raise ConfigurationError("phi1(1) must be positive")
    c_mu = 1.0 / phi1_at_1

    if b >= a:
        reason = f"beta={b} >= alpha={a}: the time integral of p_t diverges"
        return ProfileConstants(M, sigma_at_max, None, None, c_mu, None, reason)

    f = lambda s: s ** (a - b - 1.0) * float(profile.phi2(np.array(s)))
    head, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-12, limit=200)
    tail, _ = integrate.quad(f, 1.0, np.inf, epsabs=1e-12, limit=200)
    C = b * (head + tail)
    c = b / (a - b) * phi1_at_1
    C_mu = 2.0 ** a / (2.0 ** b - 1.0) * c_mu * C
    return ProfileConstants(M, sigma_at_max, c, C, c_mu, C_mu)


# ---------------------------------------------------------------------------
# transitions

class Transition:
    """Transition density p_t(x, y), radial in the Euclidean metric."""

    n: int
    name: str

    def eval_dt(self, d: np.ndarray, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def eval(self, x, y, t: float) -> float:
        if t <= 0:
            raise ValueError("transition time must be positive")
        xa, ya = as_coords(x, self.n), as_coords(y, self.n)
        d = float(np.linalg.norm(xa - ya))
        return float(self.eval_dt(np.array(d), np.array(float(t))))

    def profile(self) -> ProfilePair:
        raise ConfigurationError(f"{self.name}: no bound profile attached")

    def mass_factor(self) -> float:
        """integral of p_t(x, .) over R^n (t-independent for the catalog)."""
        raise NotImplementedError


class GaussTransition(Transition):
    """Heat transition t**(-n/2) exp(-d^2 / 4t), optionally normalized.

    The normalized variant carries the extra (4 pi)**(-n/2) so that the
    spatial mass is exactly 1 and the semigroup is Markov.
    """

    def __init__(self, n: int, normalized: bool = False):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = int(n)
        self.normalized = bool(normalized)
        self.scale = (4.0 * math.pi) ** (-0.5 * n) if normalized else 1.0
        self.name = f"gauss(n={n},{'normalized' if normalized else 'unnormalized'})"

    def eval_dt(self, d, t):
        d = np.asarray(d, dtype=float)
        t = np.asarray(t, dtype=float)
        return self.scale * t ** (-0.5 * self.n) * np.exp(-d * d / (4.0 * t))

    def profile(self) -> ProfilePair:
        s = self.scale
        phi = lambda sig: s * np.exp(-np.asarray(sig, dtype=float) ** 2 / 4.0)
        return ProfilePair(alpha=float(self.n), beta=2.0, phi1=phi, phi2=phi,
                           name=self.name)

    def mass_factor(self) -> float:
        return 1.0 if self.normalized else (4.0 * math.pi) ** (0.5 * self.n)


class CauchyTransition(Transition):
    """1-stable transition c_n t (t^2 + d^2)**(-(n+1)/2), mass one.

    This is the explicit instance of the stable-like bound class: it is
    exactly self-similar with p_t(x, y) = t**-n p_1(x/t, y/t).
    """

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = int(n)
        self.cn = math.gamma((n + 1) / 2.0) / math.pi ** ((n + 1) / 2.0)
        self.name = f"cauchy(n={n})"

    def eval_dt(self, d, t):
        d = np.asarray(d, dtype=float)
        t = np.asarray(t, dtype=float)
        return self.cn * t * (t * t + d * d) ** (-0.5 * (self.n + 1))

    def profile(self) -> ProfilePair:
        cn, n = self.cn, self.n
        phi = lambda sig: cn * (1.0 + np.asarray(sig, dtype=float) ** 2) ** (-0.5 * (n + 1))
        return ProfilePair(alpha=float(n), beta=1.0, phi1=phi, phi2=phi,
                           name=self.name)

    def mass_factor(self) -> float:
        return 1.0


class BoundedHeatTransition(Transition):
    """A transition known through its bound profile.

    Without an explicit evaluator only profile-level operations are
    available; pointwise evaluation raises ConfigurationError.
    """

    def __init__(self, profile: ProfilePair, evaluator=None, name: str = "bounded-heat"):
        self.n = int(round(profile.alpha))
        self._profile = profile
        self._evaluator = evaluator
        self.name = name

    def eval_dt(self, d, t):
        if self._evaluator is None:
            raise ConfigurationError(f"{self.name}: no explicit evaluator supplied")
        return self._evaluator(np.asarray(d, dtype=float), np.asarray(t, dtype=float))

    def profile(self) -> ProfilePair:
        return self._profile

    def mass_factor(self) -> float:
        raise ConfigurationError(f"{self.name}: mass factor unknown")


# ---------------------------------------------------------------------------
# kernels

class Kernel:
    """A positive kernel G(x, y); +inf marks the diagonal blow-up."""

    dim: int
    name: str

    def eval(self, x, y) -> float:
        raise NotImplementedError

    def potential_at(self, targets: np.ndarray, points: np.ndarray,
                     weights: np.ndarray) -> np.ndarray:
        """Batched sum_i w_i G(target, y_i); the capacity hot path."""
        raise NotImplementedError

    def to_record(self) -> dict:
        raise NotImplementedError


class RieszKernel(Kernel):
    """G(x, y) = |x - y|**(beta - n) on R^n with 0 < beta < n, beta <= 2."""

    def __init__(self, n: int, beta: float):
        if n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 < beta < n):
            raise ValueError("Riesz index requires 0 < beta < n")
        if beta > 2.0:
            raise ValueError("Riesz index requires beta <= 2")
        self.n = int(n)
        self.beta = float(beta)
        self.dim = self.n
        self.name = f"riesz(n={self.n},beta={self.beta:g})"

    def eval(self, x, y) -> float:
        xa, ya = as_coords(x, self.n), as_coords(y, self.n)
        d = float(np.linalg.norm(xa - ya))
        if d == 0.0:
            return math.inf
        return d ** (self.beta - self.n)

    def ball_radius(self, rho: float) -> float:
        """Euclidean radius of {G(x, .) > 1/rho}: rho**(1/(n - beta))."""
        return rho ** (1.0 / (self.n - self.beta))

    def rho_for_radius(self, radius: float) -> float:
        return radius ** (self.n - self.beta)

    def potential_at(self, targets, points, weights):
        return _core.riesz_sum(np.ascontiguousarray(targets, dtype=float),
                               np.ascontiguousarray(points, dtype=float),
                               np.ascontiguousarray(weights, dtype=float),
                               self.beta - self.n)

    def to_record(self) -> dict:
        return {"variant": "riesz", "n": self.n, "beta": self.beta}


class SpaceTimeKernel(Kernel):
    """G'((x, r), (y, s)) = p_{r-s}(x, y) for r > s, and 0 for r <= s."""

    def __init__(self, transition: Transition):
        self.transition = transition
        self.n = transition.n
        self.dim = transition.n + 1
        self.name = f"spacetime[{transition.name}]"

    def eval(self, xp, yp) -> float:
        x, r = split_spacetime(xp, self.n)
        y, s = split_spacetime(yp, self.n)
        if r <= s:
            return 0.0
        d = float(np.linalg.norm(x - y))
        return float(self.transition.eval_dt(np.array(d), np.array(r - s)))

    def potential_at(self, targets, points, weights):
        targets = np.ascontiguousarray(targets, dtype=float)
        points = np.ascontiguousarray(points, dtype=float)
        weights = np.ascontiguousarray(weights, dtype=float)
        tr = self.transition
        if isinstance(tr, GaussTransition):
            return _core.spacetime_heat_sum(targets, points, weights, tr.n, tr.scale)
        if isinstance(tr, CauchyTransition):
            return _core.spacetime_cauchy_sum(targets, points, weights, tr.n, tr.cn)
        out = np.zeros(targets.shape[0])
        for j, (pt, w) in enumerate(zip(points, weights)):
            dt = targets[:, -1] - pt[-1]
            pos = dt > 0
            if not np.any(pos):
                continue
            d = np.linalg.norm(targets[pos, :-1] - pt[:-1], axis=1)
            out[pos] += w * tr.eval_dt(d, dt[pos])
        return out

    def to_record(self) -> dict:
        rec = {"variant": "spacetime", "n": self.n, "transition": self.transition.name}
        if isinstance(self.transition, GaussTransition):
            rec["normalized"] = self.transition.normalized
        return rec


# constructors -------------------------------------------------------------

def riesz(n: int, beta: float) -> RieszKernel:
    return RieszKernel(n, beta)


def gauss_weierstrass(n: int, normalized: bool = False) -> SpaceTimeKernel:
    """Space-time heat kernel; the unnormalized form is the classical one."""
    return SpaceTimeKernel(GaussTransition(n, normalized=normalized))


def cauchy(n: int) -> SpaceTimeKernel:
    return SpaceTimeKernel(CauchyTransition(n))


def spacetime(base: Transition) -> SpaceTimeKernel:
    return SpaceTimeKernel(base)


def bounded_heat(profile: ProfilePair, evaluator=None,
                 name: str = "bounded-heat") -> BoundedHeatTransition:
    return BoundedHeatTransition(profile, evaluator, name)


def kernel_from_record(rec: dict) -> Kernel:
    variant = rec.get("variant")
    if variant == "riesz":
        return riesz(int(rec["n"]), float(rec["beta"]))
    if variant in ("spacetime", "gauss", "gauss_weierstrass"):
        tr = rec.get("transition", "gauss")
        if "cauchy" in str(tr):
            return cauchy(int(rec["n"]))
        return gauss_weierstrass(int(rec["n"]), bool(rec.get("normalized", False)))
    if variant == "cauchy":
        return cauchy(int(rec["n"]))
    raise ValueError(f"unknown kernel record {rec!r}")


# operation layer ----------------------------------------------------------

def eval_riesz(x, y, n: int, beta: float) -> float:
    """|x - y|**(beta - n); +inf on the diagonal."""
    return riesz(n, beta).eval(x, y)


def eval_gauss_transition(x, y, t: float, n: int, normalized: bool = False) -> float:
    """Heat transition at spatial points x, y and time t > 0."""
    return GaussTransition(n, normalized=normalized).eval(x, y, t)


def eval_cauchy_transition(x, y, t: float, n: int) -> float:
    """1-stable transition at spatial points x, y and time t > 0."""
    return CauchyTransition(n).eval(x, y, t)


def eval_spacetime(xp, yp, base: Transition) -> float:
    """Space-time kernel of `base`: p_{r-s}(x, y) if r > s else 0."""
    return SpaceTimeKernel(base).eval(xp, yp)


def gaussian_profile(n: int, normalized: bool = True) -> ProfilePair:
    return GaussTransition(n, normalized=normalized).profile()


def cauchy_profile(n: int) -> ProfilePair:
    return CauchyTransition(n).profile()
