import math

import numpy as np
import pytest

from greenpolar import capacity as cap
from greenpolar import catalog as C
from greenpolar import hausdorff as H
from greenpolar import kernels as K
from greenpolar import shapes as S


def test_single_atom_potential():
    nu = cap.atoms([[0.0, 0.0, 0.0]], [1.0])
    ker = K.riesz(3, 2)
    assert cap.potential(ker, nu, [2.0, 0.0, 0.0]) == 0.5


def test_empty_measure_potential():
    nu = cap.empty_measure(3)
    assert cap.potential(K.riesz(3, 2), nu, [1.0, 1.0, 1.0]) == 0.0


def _sphere_atoms(n_band: int, n_phi: int):
    # equal-area bands: uniform z midpoints, uniform azimuth
    z = (np.arange(n_band) + 0.5) / n_band * 2.0 - 1.0
    phi = (np.arange(n_phi) + 0.5) / n_phi * 2.0 * math.pi
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    r = np.sqrt(1.0 - zz ** 2)
    pts = np.stack([r * np.cos(pp), r * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    w = np.full(pts.shape[0], 1.0 / pts.shape[0])
    return cap.atoms(pts, w, name="unit-sphere")


def test_sphere_potential_matches_point_charge_outside():
    # oracle: unit mass on the unit sphere has Newtonian potential 1/|x| outside
    nu = _sphere_atoms(48, 96)
    ker = K.riesz(3, 2)
    val = cap.potential(ker, nu, [2.0, 0.0, 0.0])
    assert val == pytest.approx(0.5, abs=1e-3)
    val = cap.potential(ker, nu, [0.0, 3.0, 0.0])
    assert val == pytest.approx(1.0 / 3.0, abs=1e-3)


def test_potential_linearity_and_monotonicity():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(40, 3))
    w = rng.uniform(0.1, 1.0, size=40)
    nu = cap.atoms(pts, w)
    ker = K.riesz(3, 1)
    grid = rng.normal(size=(25, 3)) * 2.0
    base = cap.potential_grid(ker, nu, grid)
    scaled = cap.potential_grid(ker, nu.scaled(3.0), grid)
    assert np.allclose(scaled, 3.0 * base, rtol=1e-13)
    bigger = cap.atoms(pts, w + 0.5)
    assert np.all(cap.potential_grid(ker, bigger, grid) >= base)


def test_potential_at_atom_is_inf():
    nu = cap.atoms([[0.0, 0.0, 0.0]], [1.0])
    assert cap.potential(K.riesz(3, 2), nu, [0.0, 0.0, 0.0]) == math.inf


def test_cell_quadrature_levels_guard():
    nu = cap.lebesgue_cells(C.slice_set(1), 4)
    with pytest.raises(ValueError):
        nu.quadrature_atoms(levels=2)


def test_ball_mass_bound_randomized():
    rng = np.random.default_rng(101)
    violations = 0
    for _ in range(100):
        n = int(rng.integers(3, 6))
        beta = float(rng.choice([1.0, 2.0]))
        ker = K.riesz(n, beta)
        nu = cap.atoms(rng.normal(size=(50, n)), rng.uniform(0, 1, size=50))
        x = rng.normal(size=n)
        rho = float(rng.uniform(0.05, 2.0))
        rep = cap.check_ball_mass_bound(ker, nu, x, rho)
        violations += 0 if rep.ok else 1
    assert violations == 0


def test_ball_mass_bound_atom_at_center():
    ker = K.riesz(3, 2)
    nu = cap.atoms([[1.0, 0.0, 0.0]], [2.0])
    rep = cap.check_ball_mass_bound(ker, nu, [1.0, 0.0, 0.0], 0.5)
    assert rep.ok and math.isinf(rep.potential_at_center)


def test_ball_mass_bound_support_outside_ball():
    ker = K.riesz(3, 2)
    nu = cap.atoms([[5.0, 0.0, 0.0]], [1.0])
    rep = cap.check_ball_mass_bound(ker, nu, [0.0, 0.0, 0.0], 0.1)
    assert rep.mass_in_ball == 0.0 and rep.ok


def _slice_certificate(n: int, per_axis: int = 24):
    sl = C.slice_set(n)
    ker = K.gauss_weierstrass(n, normalized=True)
    nu = cap.lebesgue_cells(sl, per_axis)
    spatial_lo = np.full(n, -0.25)
    spatial_hi = np.full(n, 1.25)
    times = np.geomspace(0.05, 4.0, 9)
    pieces = []
    for t in times:
        g = cap.grid_box(spatial_lo, spatial_hi, 9)
        pieces.append(np.column_stack([g, np.full(g.shape[0], t)]))
    grid = np.concatenate(pieces)
    return cap.capacity_lower_bound(ker, sl, nu, grid)


def test_slice_capacity_certificate():
    for n in (1, 2):
        cert = _slice_certificate(n)
        # semigroup mass one: the unit-density slice has potential <= 1
        assert cert.analytic_bound == pytest.approx(1.0)
        assert cert.grid_sup <= 1.0
        assert cert.mass == pytest.approx(1.0, rel=1e-12)
        assert cert.lower_bound >= 1.0 - 1e-9


def test_vertical_segment_capacity_certificate():
    vs = C.vertical_segment()
    ker = K.gauss_weierstrass(1)  # unnormalized heat kernel
    nu = cap.lebesgue_cells(vs, 256)
    xs = np.linspace(-0.5, 0.5, 11)
    ts = np.linspace(0.05, 2.0, 40)
    grid = np.stack(np.meshgrid(xs, ts, indexing="ij"), axis=-1).reshape(-1, 2)
    cert = cap.capacity_lower_bound(ker, vs, nu, grid)
    # analytic: integral of (r-s)^(-1/2) over a unit time window is at most 2
    assert cert.analytic_bound == pytest.approx(2.0)
    assert cert.grid_sup <= 2.0
    assert cert.lower_bound >= 0.5 - 1e-6
    # closed form at the worst grid point: 2 (sqrt(r) - sqrt(r-1)) <= 2
    worst = 2.0 * (math.sqrt(1.0) - math.sqrt(0.0))
    assert cert.sup_bound == pytest.approx(worst)


def test_singleton_riesz_certificate_is_degenerate():
    pt = C.singleton([0.0, 0.0, 0.0])
    ker = K.riesz(3, 2)
    nu = cap.atoms([[0.0, 0.0, 0.0]], [1.0])
    grid = np.concatenate([np.zeros((1, 3)), np.ones((1, 3))])
    cert = cap.capacity_lower_bound(ker, pt, nu, grid)
    assert cert.lower_bound == 0.0
    assert cert.diagnostic is not None


def test_certificate_margin_used_without_analytic_bound():
    ker = K.riesz(3, 2)
    seg = C.segment(3, k=2)
    nu = cap.lebesgue_cells(seg, 12)
    grid = cap.grid_box([-0.5, -0.5, -1.0], [1.5, 1.5, 1.0], [7, 7, 5])
    cert = cap.capacity_lower_bound(ker, seg, nu, grid, margin=0.5)
    assert cert.analytic_bound is None
    assert cert.sup_bound == pytest.approx(cert.grid_sup + 0.5)
    assert cert.lower_bound == pytest.approx(cert.mass / cert.sup_bound)


def test_certificate_soundness_denser_grid():
    # re-evaluating on a 10x denser grid never exceeds sup_bound
    cert = _slice_certificate(1)
    sl = C.slice_set(1)
    ker = K.gauss_weierstrass(1, normalized=True)
    nu = cap.lebesgue_cells(sl, 24)
    xs = np.linspace(-0.25, 1.25, 90)
    ts = np.geomspace(0.05, 4.0, 90)
    grid = np.stack(np.meshgrid(xs, ts, indexing="ij"), axis=-1).reshape(-1, 2)
    dense = cap.potential_grid(ker, nu, grid)
    assert float(dense.max()) <= cert.sup_bound


def test_check_cap_le_measure_paths():
    cert = _slice_certificate(1)
    est = H.estimate_measure(C.slice_set(1), S.ParabolicBoxFamily(1), eta=1.0,
                             probes=16)
    # convert the box bound into a kernel-ball bound for the same kernel
    ker = K.gauss_weierstrass(1, normalized=True)
    chain = H.box_to_heat_ball(1)
    rescale = H.rescale_kernel_ball((4 * math.pi) ** 0.5, ker)
    ball_ub = est.uniform_bound * chain.kappa * rescale.kappa
    synthetic = H.MeasureEstimate(family_name="kernel-ball", eta=1.0,
                                  set_name="slice(1)")
    synthetic.rows = [H.MeasureRow(0.5, ball_ub, 0)]
    synthetic.finalize()
    rep = cap.check_cap_le_measure(cert, synthetic)
    assert rep.status == "pass"
    divergent = H.estimate_measure(C.vertical_segment(), S.ParabolicBoxFamily(1),
                                   eta=1.0, probes=0)
    rep2 = cap.check_cap_le_measure(cert, divergent)
    assert rep2.status == "inconclusive"


def test_certificate_record_fields():
    cert = _slice_certificate(1)
    rec = cert.to_record()
    assert rec["set"] == "slice(n=1)"
    assert rec["lower_bound"] == cert.lower_bound
