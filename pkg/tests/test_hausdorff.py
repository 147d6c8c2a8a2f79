import math

import numpy as np
import pytest

from greenpolar import catalog as C
from greenpolar import hausdorff as H
from greenpolar import kernels as K
from greenpolar import shapes as S
from greenpolar.errors import ComparisonError, ConfigurationError


def test_covering_sum_basics():
    box = S.ParabolicBoxFamily(1)
    assert H.covering_sum(H.empty_covering(box, 1.0)) == 0.0
    two = H.ListCovering(box, np.zeros((2, 2)), [0.5, 0.5], eta=1.0)
    assert H.covering_sum(two) == 1.0
    two2 = H.ListCovering(box, np.zeros((2, 2)), [0.5, 0.5], eta=2.0)
    assert H.covering_sum(two2) == 0.5


def test_covering_rejects_nonpositive_rho():
    with pytest.raises(ValueError):
        H.ListCovering(S.ParabolicBoxFamily(1), np.zeros((1, 2)), [0.0], eta=1.0)


def test_verify_covering_grid_and_translated():
    sl = C.slice_set(1)
    box = S.ParabolicBoxFamily(1)
    cov = H.build_grid_covering(sl, box, delta=1.0 / 4.0, eta=1.0)
    assert H.verify_covering(cov, sl, probes=500, seed=1).ok
    centers, rhos = cov.element_arrays()
    shifted = H.ListCovering(box, centers + 10.0, rhos, eta=1.0)
    rep = H.verify_covering(shifted, sl, probes=100, seed=2)
    assert not rep.ok and rep.uncovered == 100
    vac = H.verify_covering(shifted, sl, probes=0)
    assert vac.ok and vac.vacuous


def test_grid_covering_slice_unit_sum():
    # oracle: N^n closed boxes of side 1/N tile [0,1]^n exactly
    for n in (1, 2):
        sl = C.slice_set(n)
        box = S.ParabolicBoxFamily(n)
        for k in (1, 2, 3, 4):
            delta = 2.0 ** -k
            cov = H.build_grid_covering(sl, box, delta, eta=float(n))
            rho = delta / 2.0
            expected_count = int(round((1.0 / rho) ** n))
            assert cov.count == expected_count
            assert cov.covering_sum == pytest.approx(1.0, abs=1e-12)
            # brute-force coverage check on a deterministic fine grid
            if n == 1:
                xs = np.linspace(0, 1, 37)
                pts = np.stack([xs, np.zeros_like(xs)], axis=1)
            else:
                g = np.linspace(0, 1, 13)
                xx, yy = np.meshgrid(g, g)
                pts = np.stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)], axis=1)
            assert np.all(cov.covers(pts))


def test_grid_covering_vertical_segment_divergence_rate():
    vs = C.vertical_segment()
    box = S.ParabolicBoxFamily(1)
    sums = []
    for k in (1, 2, 3, 4, 5):
        cov = H.build_grid_covering(vs, box, 2.0 ** -k, eta=1.0)
        rho = 2.0 ** -(k + 1)
        # time extent rho^2 forces 1/rho^2 boxes, so the sum is 1/rho
        assert cov.count == int(round(1.0 / rho ** 2))
        assert cov.covering_sum == pytest.approx(1.0 / rho, rel=1e-12)
        assert H.verify_covering(cov, vs, probes=200, seed=k).ok
        sums.append(cov.covering_sum)
    ratios = [b / a for a, b in zip(sums, sums[1:])]
    assert all(r == pytest.approx(2.0) for r in ratios)


def test_grid_covering_singleton():
    pt = C.singleton([0.25, 0.5], spacetime=True)
    box = S.ParabolicBoxFamily(1)
    for delta in (0.5, 0.125):
        cov = H.build_grid_covering(pt, box, delta, eta=1.0)
        assert cov.count == 1
        assert cov.covering_sum <= delta
        assert H.verify_covering(cov, pt, probes=10, seed=0).ok


def test_estimate_measure_riesz_segment():
    seg = C.segment(3)
    fam = S.GBallFamily(K.riesz(3, 2))
    est = H.estimate_measure(seg, fam, eta=1.0, probes=64)
    # kernel balls of parameter rho are metric balls of radius rho here,
    # so the pitch-r grid gives sum 1 at every level (segment length 1)
    assert est.uniform_bound == pytest.approx(1.0, abs=1e-9)
    assert not est.divergent


def test_estimate_measure_slice_box():
    sl = C.slice_set(2)
    est = H.estimate_measure(sl, S.ParabolicBoxFamily(2), eta=2.0, probes=32)
    assert est.uniform_bound is not None
    assert est.uniform_bound <= 1.0 + 1e-9
    sums = [r.covering_sum for r in est.rows]
    assert max(sums) - min(sums) < 1e-12


def test_estimate_measure_empty_set():
    est = H.estimate_measure(C.empty_set(2, spacetime=True),
                             S.ParabolicBoxFamily(1), eta=1.0)
    assert all(r.covering_sum == 0.0 for r in est.rows)


def test_estimate_measure_monotone_best():
    vs = C.vertical_segment()
    est = H.estimate_measure(vs, S.ParabolicBoxFamily(1), eta=1.0,
                             delta_schedule=[2.0 ** -k for k in range(1, 9)],
                             probes=16)
    # rows are delta-descending, so best sums are nondecreasing down the list
    bests = [r.best_sum for r in est.rows]
    assert all(b >= a - 1e-15 for a, b in zip(bests, bests[1:]))
    assert est.divergent and est.uniform_bound is None


def _random_heat_ball_covering(n, rng, count=12):
    fam = S.GBallFamily(K.gauss_weierstrass(n))
    centers = rng.uniform(-1, 1, size=(count, n + 1))
    rhos = rng.uniform(0.05, 0.8, size=count)
    return H.ListCovering(fam, centers, rhos, eta=1.0)


def test_transform_covering_exact_factors():
    rng = np.random.default_rng(8)
    for n in (1, 2, 3):
        for _ in range(100):
            cov = _random_heat_ball_covering(n, rng)
            out = H.transform_covering(cov, H.heat_ball_to_box(n))
            factor = (2.0 * math.sqrt(n)) ** n
            assert out.covering_sum <= factor * cov.covering_sum * (1 + 1e-12)
            assert out.covering_sum >= factor * cov.covering_sum * (1 - 1e-12)


def test_transform_covering_box_to_ball():
    rng = np.random.default_rng(9)
    for n in (1, 2, 3):
        fam = S.ParabolicBoxFamily(n)
        centers = rng.uniform(-1, 1, size=(20, n + 1))
        rhos = rng.uniform(0.05, 0.5, size=20)
        cov = H.ListCovering(fam, centers, rhos, eta=float(n))
        out = H.transform_covering(cov, H.box_to_heat_ball(n), check_probes=64,
                                   seed=5)
        factor = 2.0 ** (n / 2.0)
        assert out.covering_sum == pytest.approx(factor * cov.covering_sum, rel=1e-12)
        assert out.eta == 1.0


def test_transform_identity():
    rng = np.random.default_rng(10)
    ker = K.gauss_weierstrass(1)
    cov = _random_heat_ball_covering(1, rng)
    ident = H.rescale_kernel_ball(1.0, ker)
    out = H.transform_covering(cov, ident)
    assert out.covering_sum == cov.covering_sum


def test_transform_coverage_preserved():
    # transformed covering still covers the same probes as the source
    rng = np.random.default_rng(12)
    sl = C.slice_set(1)
    cov = H.build_grid_covering(sl, S.GBallFamily(K.gauss_weierstrass(1)),
                                delta=0.25, eta=1.0)
    assert H.verify_covering(cov, sl, probes=300, seed=3).ok
    out = H.transform_covering(cov, H.heat_ball_to_box(1))
    assert H.verify_covering(out, sl, probes=300, seed=3).ok


def test_transform_witness_violation_raises():
    rng = np.random.default_rng(13)
    cov = _random_heat_ball_covering(2, rng)
    bad = H.ComparisonParams(
        eta=1.0, eta_tilde=2.0, kappa=1e-3,
        target_family=S.ParabolicBoxFamily(2),
        shift=lambda rho: np.zeros(3), name="bad")
    with pytest.raises(ComparisonError):
        H.transform_covering(cov, bad, check_probes=64, seed=1)


def test_pgp_composition_constants():
    # composing ball->box->diameter gauge realizes (2n)^n; box->ball gives
    # (2/n)^(n/2) against the diameter gauge
    for n in (1, 2, 3):
        ball_to_box = (2.0 * math.sqrt(n)) ** n
        diam_scale = float(n) ** (n / 2.0)
        lower_factor = ball_to_box * diam_scale
        assert lower_factor == pytest.approx((2.0 * n) ** n, rel=1e-12)
        upper_factor = 2.0 ** (n / 2.0) / diam_scale
        assert upper_factor == pytest.approx((2.0 / n) ** (n / 2.0), rel=1e-12)
    assert (2.0 * 1.0) ** -1 == 0.5
    assert (2.0 / 1.0) ** 0.5 == math.sqrt(2.0)


def test_mp_from_mnp_scaling():
    sl = C.slice_set(2)
    est = H.estimate_measure(sl, S.ParabolicBoxFamily(2), eta=2.0, probes=0,
                             delta_schedule=[0.5, 0.25])
    for n, scale in [(1, 1.0), (2, 2.0), (4, 16.0)]:
        out = H.mp_from_mnp(est, n)
        for r_in, r_out in zip(est.rows, out.rows):
            assert r_out.covering_sum == pytest.approx(scale * r_in.covering_sum)
            assert r_out.correction == pytest.approx((1 + r_in.delta) ** n)


def test_divergence_flag_rule():
    assert H._divergence_flag([1, 2, 4, 8, 16])
    assert not H._divergence_flag([1, 2, 4, 8])  # only 3 consecutive jumps
    assert not H._divergence_flag([1, 1.2, 1.4, 1.6, 1.8])


def test_grid_covering_export_guard():
    sl = C.slice_set(2)
    cov = H.build_grid_covering(sl, S.ParabolicBoxFamily(2), 2.0 ** -9, eta=2.0)
    with pytest.raises(ConfigurationError):
        cov.element_arrays(limit=1000)


def test_cantor_dust_pruned_covering():
    dust = C.cantor_dust(0.25, 4, 2)
    fam = S.MetricBallFamily(2)
    cov = H.build_grid_covering(dust, fam, delta=2.0 * 0.25 ** 4, eta=1.0,
                                rho=0.25 ** 4)
    # at pitch ratio^depth the kept tiles are exactly the 2^(2*depth) cells
    assert cov.count == (2 ** 4) ** 2
    assert H.verify_covering(cov, dust, probes=400, seed=7).ok


def test_measure_csv_and_records():
    sl = C.slice_set(1)
    est = H.estimate_measure(sl, S.ParabolicBoxFamily(1), eta=1.0, probes=0,
                             delta_schedule=[0.5, 0.25])
    csv = est.to_csv()
    assert csv.splitlines()[0] == "delta,covering_sum,count"
    assert len(est.to_records()) == 2
