"""Semigroup checks and time-integrated Green functions for heat kernels.

Numerical verifications of the semigroup identity (two-sided quadrature
with profile-controlled tails), the unit-mass property, escape radii for
the compact-tail condition, the volume bound implied by the lower profile
bound, and the Green function G(x, y) = integral of p_t(x, y) dt with its
two-sided power sandwich

    c d^{-(alpha-beta)} <= G(x, y) <= C d^{-(alpha-beta)},
    c = beta/(alpha-beta) Phi1(1),   C = beta * int sigma^(alpha-beta) Phi2 dsigma/sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import ConfigurationError
from .kernels import (CauchyTransition, GaussTransition, ProfilePair,
                      Transition, as_coords, profile_constants, tail_integral)


@dataclass(frozen=True)
class QuadSpec:
    epsabs: float = 1e-10
    epsrel: float = 1e-8
    limit: int = 300


def _ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def _radial_integral(f, n: int, lo: float, hi: float, spec: QuadSpec) -> float:
    """integral over an annulus of a radial function on R^n."""
    surf = n * _ball_volume(n)
    val, _ = integrate.quad(lambda r: surf * r ** (n - 1) * f(r), lo, hi,
                            epsabs=spec.epsabs, epsrel=spec.epsrel,
                            limit=spec.limit)
    return val


# ---------------------------------------------------------------------------
# Chapman-Kolmogorov

@dataclass(frozen=True)
class CKReport:
    lhs: float
    rhs: float
    residual: float
    tol: float
    window: float
    tail_bound: float
    ok: bool

    def to_record(self) -> dict:
        return {"check": "chapman-kolmogorov", "lhs": self.lhs, "rhs": self.rhs,
                "residual": self.residual, "tol": self.tol,
                "window": self.window, "tail_bound": self.tail_bound,
                "ok": self.ok}


def _ck_rhs_1d(tr: Transition, x: float, y: float, s: float, t: float,
               window: float, spec: QuadSpec) -> float:
    lo = min(x, y) - window
    hi = max(x, y) + window
    f = lambda z: (float(tr.eval_dt(np.array(abs(x - z)), np.array(s)))
                   * float(tr.eval_dt(np.array(abs(z - y)), np.array(t))))
    val, _ = integrate.quad(f, lo, hi, epsabs=spec.epsabs, epsrel=spec.epsrel,
                            limit=spec.limit,
                            points=[x, y] if lo < x < hi and lo < y < hi else None)
    return val


def check_chapman_kolmogorov(transition: Transition, x, y, s: float, t: float,
                             tol: float = 1e-8,
                             spec: QuadSpec = QuadSpec()) -> CKReport:
    """p_{s+t}(x, y) against the spatial integral of p_s p_t.

    The integration window is grown until the profile tail bound
    M * L**(-alpha) * mass drops below tol/4; Gauss factorizes over
    coordinates, the 1-stable case is supported for n = 1.
    """
    if s <= 0 or t <= 0:
        raise ValueError("times must be positive")
    xa = as_coords(x, transition.n)
    ya = as_coords(y, transition.n)
    d = float(np.linalg.norm(xa - ya))
    lhs = float(transition.eval_dt(np.array(d), np.array(s + t)))

    prof = transition.profile()
    consts = profile_constants(prof)
    if isinstance(transition, GaussTransition):
        mass1 = (1.0 if transition.normalized else (4.0 * math.pi) ** 0.5)
        one_d = GaussTransition(1, normalized=True)
        prof1 = one_d.profile()
        m1 = profile_constants(prof1).M
    elif isinstance(transition, CauchyTransition) and transition.n == 1:
        mass1 = 1.0
        m1 = consts.M
    else:
        raise ConfigurationError(
            "CK quadrature supports the Gauss transition and the 1-D 1-stable one")

    # tail of the 1-D factor integral beyond distance L from both points
    window = 4.0 * max(1.0, (s + t) ** (1.0 / prof.beta))
    tail = math.inf
    for _ in range(60):
        tail = m1 * window ** (-1.0) * mass1 * 2.0
        if isinstance(transition, CauchyTransition):
            tail = consts.M * window ** (-prof.alpha) * mass1 * 2.0
        else:
            tail = m1 * window ** (-1.0) * mass1 * 2.0
        if tail < tol / 4.0:
            break
        window *= 2.0
    else:
        return CKReport(lhs, math.nan, math.nan, tol, window, tail, ok=False)

    if isinstance(transition, GaussTransition):
        # the n-dimensional transition is a product of 1-D factors, so the
        # convolution integral factorizes coordinate-wise
        scale1 = (4.0 * math.pi) ** -0.5 if transition.normalized else 1.0
        tr1 = GaussTransition(1, normalized=False)
        rhs = 1.0
        for xi, yi in zip(xa, ya):
            fac = _ck_rhs_1d(tr1, float(xi), float(yi), s, t, window, spec)
            rhs *= fac * scale1 * scale1
    else:
        rhs = _ck_rhs_1d(transition, float(xa[0]), float(ya[0]), s, t, window,
                         spec)
    residual = abs(lhs - rhs)
    return CKReport(lhs, rhs, residual, tol, window, tail, ok=residual <= tol)


# ---------------------------------------------------------------------------
# mass

@dataclass(frozen=True)
class MassReport:
    masses: dict
    expected: float
    max_deviation: float
    non_markov: bool
    ok: bool

    def to_record(self) -> dict:
        return {"check": "semigroup-mass", "masses": self.masses,
                "expected": self.expected, "max_deviation": self.max_deviation,
                "non_markov": self.non_markov, "ok": self.ok}


def check_mass(transition: Transition, x, t_schedule: Sequence[float],
               tol: float = 1e-6, spec: QuadSpec = QuadSpec()) -> MassReport:
    """Spatial mass of p_t for each t; flags non-Markov normalizations."""
    expected = transition.mass_factor()
    masses = {}
    for t in t_schedule:
        if t <= 0:
            raise ValueError("times must be positive")
        f = lambda r: float(transition.eval_dt(np.array(r), np.array(float(t))))
        masses[float(t)] = _radial_integral(f, transition.n, 0.0, np.inf, spec)
    dev = max(abs(m - expected) for m in masses.values())
    return MassReport(masses, expected, dev, non_markov=expected != 1.0,
                      ok=dev <= tol * max(1.0, expected))


# ---------------------------------------------------------------------------
# escape radii for the compact-tail condition

def kl_tail_radius(profile: ProfilePair, R: float, T: float,
                   epsilon: float) -> float:
    """Smallest dyadic radius 2^k R with both escape conditions below eps/2.

    Pointwise escape: beyond distance 2^(k-1) R the kernel is at most
    M d^(-alpha) < eps/2.  Integrated escape: with sigma_k = 2^(k-2) R / T^(1/beta),
    2^(3 alpha + 1) c_mu * tail(sigma_k) < eps/2 where tail integrates
    sigma^alpha Phi2(sigma) dsigma/sigma.
    """
    if R < 1 or T <= 0 or epsilon <= 0:
        raise ValueError("need R >= 1, T > 0, epsilon > 0")
    consts = profile_constants(profile)
    a, b = profile.alpha, profile.beta
    probe = tail_integral(profile, 1.0)
    if not math.isfinite(probe):
        raise ConfigurationError("profile tail integral does not converge")
    for k in range(1, 64):
        pointwise = consts.M * (2.0 ** (k - 1) * R) ** (-a)
        sigma_k = 2.0 ** (k - 2) * R / T ** (1.0 / b)
        integrated = 2.0 ** (3 * a + 1) * consts.c_mu * tail_integral(profile, sigma_k)
        if pointwise < epsilon / 2.0 and integrated < epsilon / 2.0:
            return 2.0 ** k * R
    raise ConfigurationError("no dyadic escape radius found below 2^63 R")


# ---------------------------------------------------------------------------
# volume bound

@dataclass(frozen=True)
class VolumeReport:
    n: int
    omega_n: float
    c_mu: float
    rows: dict
    ok: bool

    def to_record(self) -> dict:
        return {"check": "volume-bound", "n": self.n, "omega_n": self.omega_n,
                "c_mu": self.c_mu, "rows": self.rows, "ok": self.ok}


def check_volume_bound(n: int, r_schedule: Sequence[float]) -> VolumeReport:
    """Lebesgue ball volume against c_mu r^n for the Gaussian profile.

    With alpha = n the bound reduces to omega_n <= (4 pi)^(n/2) e^(1/4).
    """
    omega = _ball_volume(n)
    c_mu = (4.0 * math.pi) ** (n / 2.0) * math.exp(0.25)
    rows = {}
    ok = True
    for r in r_schedule:
        lhs = omega * r ** n
        rhs = c_mu * r ** n
        rows[float(r)] = {"volume": lhs, "bound": rhs}
        ok = ok and lhs <= rhs
    return VolumeReport(n, omega, c_mu, rows, ok)


# ---------------------------------------------------------------------------
# Green function by time quadrature

@dataclass(frozen=True)
class GreenValue:
    value: float
    lower: float
    upper: float
    distance: float
    ok: bool
    infinite: bool = False

    def to_record(self) -> dict:
        return {"check": "green-sandwich", "value": self.value,
                "lower": self.lower, "upper": self.upper,
                "distance": self.distance, "ok": self.ok,
                "infinite": self.infinite}


def green_from_heat(transition: Transition, x, y,
                    profile: Optional[ProfilePair] = None,
                    spec: QuadSpec = QuadSpec(),
                    sandwich_rtol: float = 1e-7) -> GreenValue:
    """G(x, y) as the time integral of p_t(x, y), split at t = d^beta.

    Requires beta < alpha (otherwise the integral diverges); returns the
    sandwich values from the profile constants and whether they hold
    within `sandwich_rtol`.
    """
    prof = profile if profile is not None else transition.profile()
    if prof.beta >= prof.alpha:
        raise ValueError("time integral diverges unless beta < alpha")
    xa = as_coords(x, transition.n)
    ya = as_coords(y, transition.n)
    d = float(np.linalg.norm(xa - ya))
    if d == 0.0:
        return GreenValue(math.inf, math.inf, math.inf, 0.0, ok=True,
                          infinite=True)
    consts = profile_constants(prof)
    f = lambda t: float(transition.eval_dt(np.array(d), np.array(t)))
    t_star = d ** prof.beta
    head, _ = integrate.quad(f, 0.0, t_star, epsabs=spec.epsabs,
                             epsrel=spec.epsrel, limit=spec.limit)
    tail, _ = integrate.quad(f, t_star, np.inf, epsabs=spec.epsabs,
                             epsrel=spec.epsrel, limit=spec.limit)
    value = head + tail
    power = d ** (-(prof.alpha - prof.beta))
    lower = consts.c * power
    upper = consts.C * power
    ok = (lower * (1 - sandwich_rtol) <= value <= upper * (1 + sandwich_rtol))
    return GreenValue(value, lower, upper, d, ok)


@dataclass(frozen=True)
class GreenBallReport:
    integral: float
    bound: float
    radius: float
    ok: bool

    def to_record(self) -> dict:
        return {"check": "green-ball-integral", "integral": self.integral,
                "bound": self.bound, "radius": self.radius, "ok": self.ok}


def check_green_ball_integral(transition: Transition, x, R: float,
                              profile: Optional[ProfilePair] = None,
                              spec: QuadSpec = QuadSpec()) -> GreenBallReport:
    """integral of G(x, .) over the ball of radius R against C_mu R^beta."""
    prof = profile if profile is not None else transition.profile()
    consts = profile_constants(prof)
    if consts.C_mu is None:
        raise ValueError(consts.missing_reason)
    xa = as_coords(x, transition.n)
    origin = np.zeros_like(xa)

    def g(r: float) -> float:
        shifted = origin.copy()
        shifted[0] = r
        return green_from_heat(transition, origin, shifted, prof, spec).value

    # the integrand r^(n-1) G(r) is tame: G(r) ~ r^(beta - alpha)
    outer = QuadSpec(epsabs=1e-9, epsrel=1e-7, limit=spec.limit)
    lhs = _radial_integral(g, transition.n, 0.0, R, outer)
    rhs = consts.C_mu * R ** prof.beta
    return GreenBallReport(lhs, rhs, R, ok=lhs <= rhs)
