import math

import numpy as np
import pytest

from greenpolar import kernels as K
from greenpolar import shapes as S


def test_riesz_gball_radii():
    ker = K.riesz(3, 2)
    # radius rho**(1/(n-beta)) = 0.5
    assert S.gball_contains(ker, [0, 0, 0], 0.5, [0.4, 0, 0])
    ker4 = K.riesz(4, 2)
    # radius 0.25**(1/2) = 0.5
    assert not S.gball_contains(ker4, [0, 0, 0, 0], 0.25, [0.6, 0, 0, 0])


def test_spacetime_gball_empty_at_earlier_center_time():
    ker = K.gauss_weierstrass(1)
    for rho in (0.01, 1.0, 100.0):
        assert not S.gball_contains(ker, [0.0, 0.0], rho, [0.0, 0.5])
        assert not S.gball_contains(ker, [0.0, 0.0], rho, [0.3, 0.0])


def test_gball_rejects_bad_rho():
    with pytest.raises(ValueError):
        S.gball_contains(K.riesz(3, 2), [0, 0, 0], 0.0, [1, 1, 1])


def test_heat_ball_time_cutoff():
    # points at or below the time extent are outside
    for s in (1.0, 1.5, 2.0):
        assert not S.heat_ball_contains([0.0, 0.0], 1.0, [0.0, -s], n=1)


def test_heat_ball_center_axis_point():
    # s = 0.5, bound 2 * 0.5 * log 2 > 0
    assert S.heat_ball_contains([0.0, 0.0], 1.0, [0.0, -0.5], n=1)


def test_heat_ball_matches_kernel_ball_of_heat_kernel():
    rng = np.random.default_rng(42)
    ker = K.gauss_weierstrass(2)
    fam = S.HeatBallFamily(2)
    center = np.array([0.3, -0.2, 1.1])
    for rho in (0.3, 1.0, 4.0):
        ext = S.heat_ball_extents(rho, 2)
        pts = np.empty((10_000, 3))
        pts[:, :2] = center[:2] + rng.uniform(-1.2, 1.2, size=(10_000, 2)) * ext.cylinder_radius
        pts[:, 2] = center[2] + rng.uniform(-1.2, 0.2, size=10_000) * ext.time_extent
        direct = np.array([ker.eval(center, p) > 1.0 / rho for p in pts])
        closed = fam.contains_many(center, rho, pts)
        assert np.array_equal(direct, closed)


def test_heat_ball_extents_values():
    ext = S.heat_ball_extents(1.0, 1)
    assert ext.time_extent == 1.0
    assert ext.cylinder_radius == 1.0
    ext2 = S.heat_ball_extents(1.0, 2)
    # maximize s log(u/s) at s = u/e
    assert ext2.tight_radius == pytest.approx(math.sqrt(4.0 / math.e), rel=1e-12)
    assert ext2.tight_radius == pytest.approx(1.2131, abs=5e-5)
    for n in (1, 2, 3, 5):
        for rho in (0.1, 1.0, 10.0):
            e = S.heat_ball_extents(rho, n)
            assert e.tight_radius <= e.cylinder_radius


def test_heat_ball_inside_bounding_cylinder():
    rng = np.random.default_rng(5)
    for n in (1, 2, 3):
        fam = S.HeatBallFamily(n)
        c = np.zeros(n + 1)
        pts = fam.sample(c, 1.0, 2000, rng)
        ext = S.heat_ball_extents(1.0, n)
        sp = np.linalg.norm(pts[:, :-1], axis=1)
        assert np.all(sp < ext.cylinder_radius)
        assert np.all((-ext.time_extent < pts[:, -1]) & (pts[:, -1] < 0))


def test_parabolic_box_closed_boundary():
    c = np.array([0.0, 0.0])
    assert S.parabolic_box_contains(c, 1.0, [0.0, 0.0])
    assert S.parabolic_box_contains(c, 1.0, [0.5, 0.5])
    assert not S.parabolic_box_contains(c, 1.0, [0.51, 0.0])


def test_check_bp_inclusion():
    for n, rho in [(1, 1.0), (3, 0.1), (2, 10.0)]:
        rep = S.check_BP_inclusion(n, rho, samples=10_000, seed=11)
        assert rep.ok and rep.samples == 10_000
    vac = S.check_BP_inclusion(1, 1.0, samples=0)
    assert vac.vacuous and rep.ok


def test_check_pb_inclusion():
    for n in (1, 2, 3):
        for rho in (0.1, 1.0, 10.0):
            rep = S.check_PB_inclusion(n, rho)
            assert rep.ok
            assert rep.samples == 2 ** (n + 1)
    rep = S.check_PB_inclusion(1, 1.0)
    assert rep.constants["four_log_four_thirds"] == pytest.approx(1.1507283, abs=1e-6)
    assert rep.constants["four_log_four_thirds"] > 1.0


def test_check_bz_inclusion_gauss_constants():
    prof = K.gaussian_profile(3)
    consts = K.profile_constants(prof)
    phi2_0 = float(prof.phi2(np.array(0.0)))
    assert phi2_0 == pytest.approx(0.0224484, abs=1e-6)
    assert consts.M == pytest.approx(0.0736157, abs=2e-6)
    assert max(phi2_0, consts.M) == consts.M


def test_check_bz_inclusion_sampling():
    rep = S.check_BZ_inclusion(K.GaussTransition(1, normalized=True), 1.0,
                               samples=10_000, seed=3)
    assert rep.ok
    rep = S.check_BZ_inclusion(K.CauchyTransition(1), 1.0, samples=10_000, seed=4)
    assert rep.ok


def test_check_zb_inclusion():
    prof = K.gaussian_profile(1)
    eta, kappa = S.admissible_cylinder_factor(prof)
    phi1_at_1 = float(prof.phi1(np.array(1.0)))
    assert (3 * eta) ** (prof.alpha / prof.beta) < phi1_at_1
    assert kappa == pytest.approx(eta ** (prof.alpha / prof.beta))
    for rho in (0.1, 1.0, 10.0):
        rep = S.check_ZB_inclusion(K.GaussTransition(1, normalized=True), rho,
                                   samples=10_000, seed=9)
        assert rep.ok
        # kappa does not depend on rho
        assert rep.constants["kappa"] == pytest.approx(kappa)


def test_zb_requires_positive_phi1():
    from greenpolar.errors import ConfigurationError
    dead = K.ProfilePair(alpha=1.0, beta=1.0,
                         phi1=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
                         phi2=lambda s: np.exp(-np.asarray(s, dtype=float)))
    with pytest.raises(ConfigurationError):
        S.admissible_cylinder_factor(dead)


def test_monotonicity_in_rho():
    rng = np.random.default_rng(17)
    families = [
        S.GBallFamily(K.riesz(3, 2)),
        S.GBallFamily(K.gauss_weierstrass(1)),
        S.HeatBallFamily(2),
        S.ParabolicBoxFamily(2),
        S.CylinderFamily(1, 2.0),
        S.MetricBallFamily(3),
    ]
    for fam in families:
        center = np.zeros(fam.dim)
        pts = rng.uniform(-2.0, 2.0, size=(400, fam.dim))
        small = fam.contains_many(center, 0.7, pts)
        large = fam.contains_many(center, 1.3, pts)
        assert not np.any(small & ~large)


def test_riesz_gball_equals_metric_ball():
    rng = np.random.default_rng(23)
    for n, beta in [(3, 2.0), (4, 2.0), (5, 1.0)]:
        ker = K.riesz(n, beta)
        x = rng.normal(size=(100, n))
        for i in range(100):
            rho = float(rng.uniform(0.05, 2.0))
            y = x[i] + rng.normal(size=n) * rng.uniform(0, 2)
            direct = S.gball_contains(ker, x[i], rho, y)
            radius = rho ** (1.0 / (n - beta))
            assert direct == (np.linalg.norm(y - x[i]) < radius)


def test_gball_family_batch_matches_scalar_for_cauchy():
    ker = K.cauchy(1)
    fam = S.GBallFamily(ker)
    rng = np.random.default_rng(31)
    center = np.array([0.0, 0.0])
    pts = rng.uniform(-1, 1, size=(500, 2))
    batch = fam.contains_many(center, 1.0, pts)
    scalar = np.array([S.gball_contains(ker, center, 1.0, p) for p in pts])
    assert np.array_equal(batch, scalar)


def test_inclusion_report_record():
    rep = S.check_PB_inclusion(1, 1.0)
    rec = rep.to_record()
    assert rec["ok"] is True and rec["check"] == "box-in-heat-ball"
