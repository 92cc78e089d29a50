import json
import math
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oseenspec import analysis, operators, solver, specfun
from oseenspec.grids import Field, ModeSpec, make_grid, quadrature

EIGHT_PI = 8 * math.pi

with open(os.path.join(os.path.dirname(__file__), "golden_bounds.json")) as fh:
    GOLDEN = json.load(fh)


def golden_value(table, alpha, k):
    for entry in GOLDEN[table]:
        if entry["alpha"] == alpha and entry["k"] == k:
            return entry["value"]
    raise KeyError((table, alpha, k))


@pytest.fixture(scope="module")
def sigma_ladder():
    # k = 1 spectral bounds across the four sweep decades, shared below
    out = {}
    for b in (1e2, 1e3, 1e4, 1e5):
        out[b] = analysis.spectral_bound(ModeSpec(alpha=EIGHT_PI * b, k=1))
    return out


@pytest.fixture(scope="module")
def psi_1e2():
    return analysis.pseudospectral_bound(ModeSpec(alpha=EIGHT_PI * 1e2, k=1))


def test_sigma_selfadjoint_ground_values():
    r1 = analysis.spectral_bound(ModeSpec(alpha=0.0, k=1))
    r2 = analysis.spectral_bound(ModeSpec(alpha=0.0, k=2))
    assert abs(r1.sigma_bound - 1.5) < 2e-3
    assert abs(r2.sigma_bound - 1.0) < 2e-3
    assert r1.converged and r2.converged


def test_sigma_golden_ladder(sigma_ladder):
    for b, res in sigma_ladder.items():
        ref = golden_value("sigma", EIGHT_PI * b, 1)
        assert res.converged
        assert abs(res.sigma_bound - ref) / ref < 1e-2


def test_sigma_golden_k2_and_k3():
    for alpha, k in ((EIGHT_PI * 1e3, 2), (0.0, 3)):
        res = analysis.spectral_bound(ModeSpec(alpha=alpha, k=k))
        ref = golden_value("sigma", alpha, k)
        assert res.converged
        assert abs(res.sigma_bound - ref) / ref < 1e-2


def test_sigma_monotone_in_beta(sigma_ladder):
    vals = [sigma_ladder[b].sigma_bound for b in (1e2, 1e3, 1e4, 1e5)]
    for lo, hi in zip(vals, vals[1:]):
        assert hi >= 0.98 * lo


def test_sigma_symmetry(sigma_ladder):
    # the bound is even under alpha -> -alpha and k -> -k separately
    base1 = sigma_ladder[1e3].sigma_bound
    base2 = analysis.spectral_bound(ModeSpec(alpha=EIGHT_PI * 1e3, k=2)).sigma_bound
    for k, base in ((1, base1), (2, base2)):
        neg_a = analysis.spectral_bound(ModeSpec(alpha=-EIGHT_PI * 1e3, k=k))
        neg_k = analysis.spectral_bound(ModeSpec(alpha=EIGHT_PI * 1e3, k=-k))
        assert abs(neg_a.sigma_bound - base) <= 1e-10 * base
        assert abs(neg_k.sigma_bound - base) <= 1e-10 * base


def test_sigma_explicit_grid_is_respected():
    grid = make_grid(300, 30.0)
    res = analysis.spectral_bound(ModeSpec(alpha=0.0, k=1), grid)
    assert res.grid_n in (600, 1200)
    assert abs(res.sigma_bound - 1.5) < 2e-3


def test_psi_selfadjoint_delegates_to_sigma():
    res = analysis.pseudospectral_bound(ModeSpec(alpha=0.0, k=1))
    assert res.lambda_star == 0.0
    assert res.psi_bound == res.sigma_bound
    assert abs(res.psi_bound - 1.5) < 2e-3


def test_psi_golden_value(psi_1e2):
    ref = golden_value("psi", EIGHT_PI * 1e2, 1)
    assert psi_1e2.converged
    assert abs(psi_1e2.psi_bound - ref) / ref < 1e-2


def test_psi_lambda_star_in_unit_band(psi_1e2):
    # the resolvent peak sits at nu = lambda/beta inside (0, 1)
    assert 0.0 < psi_1e2.lambda_star / 1e2 < 1.0


def test_psi_scan_endpoints_exceed_interior(psi_1e2):
    mode = ModeSpec(alpha=EIGHT_PI * 1e2, k=1)
    matrix = analysis._mode_matrix(mode, make_grid(600, 30.0))
    for edge in (-0.2 * 1e2, 1.2 * 1e2):
        smin = solver.smallest_singular_value(matrix, edge)
        assert smin > 2.0 * psi_1e2.psi_bound


def test_psi_below_sigma(sigma_ladder, psi_1e2):
    assert psi_1e2.psi_bound <= sigma_ladder[1e2].sigma_bound + 1e-6


def test_psi_rejects_tiny_scan():
    with pytest.raises(ValueError):
        analysis.pseudospectral_bound(ModeSpec(alpha=EIGHT_PI * 10, k=1),
                                      lambda_points=4)


def test_combined_bounds_at_zero_alpha():
    # minimum over k sits at k = 2 (value 1.0, against 1.5 at k = 1 and 3);
    # higher k only grow, so k_max = 3 already exhibits the attainment
    res = analysis.combined_bounds(0.0, k_max=3)
    assert res.mode.k == 2
    assert abs(res.sigma_bound - 1.0) < 2e-3
    assert res.psi_bound == res.sigma_bound
    assert res.lambda_star == 0.0


def test_combined_attainment_moves_to_k1():
    # beta_k grows with k, so for alpha >= 8 pi 1e2 the k = 1 mode is lowest
    s1 = analysis.spectral_bound(ModeSpec(alpha=EIGHT_PI * 1e2, k=1))
    s2 = analysis.spectral_bound(ModeSpec(alpha=EIGHT_PI * 1e2, k=2))
    assert s1.sigma_bound < s2.sigma_bound


def test_combined_rejects_bad_kmax():
    with pytest.raises(ValueError):
        analysis.combined_bounds(0.0, k_max=0)


def test_numerical_range_bound_selfadjoint_case():
    # frozen at n = 600: 1.1648075306747117; positive and below the
    # spectral value 1.5, as a numerical-range bound must be
    val = analysis.numerical_range_bound(ModeSpec(alpha=0.0, k=1))
    assert 0.0 < val <= 1.5
    assert abs(val - 1.1648075306747117) < 1e-2


def test_range_golden_table(sigma_ladder):
    for b in (1e2, 1e3, 1e4, 1e5):
        mode = ModeSpec(alpha=EIGHT_PI * b, k=1)
        grid = analysis.sigma_grid(mode)
        val = analysis.numerical_range_bound(mode, make_grid(1200, grid.r_max))
        ref = golden_value("range", EIGHT_PI * b, 1)
        assert abs(val - ref) / ref < 1e-2
        # the certified bound sits below the spectral value
        assert val <= sigma_ladder[b].sigma_bound + 2e-2


def test_sigma_grid_policy():
    # wall pushed out once 4.4 |beta|^{1/4} passes the default 30
    assert analysis.sigma_grid(ModeSpec(alpha=EIGHT_PI * 1e2, k=1)).r_max == 30.0
    g = analysis.sigma_grid(ModeSpec(alpha=EIGHT_PI * 1e5, k=1))
    assert_allclose(g.r_max, 4.4 * 1e5 ** 0.25, rtol=1e-12)


def test_quasimode_norm_identity():
    # ||u|| = r1^{-1/2} ||eta|| with ||eta||^2 = 1/630
    grid = make_grid(800, 12.0)
    r1 = 1e3 ** (1.0 / 6.0)
    x = r1 * (grid.nodes - r1)
    eta = np.where((x > 0) & (x < 1), x ** 2 * (x - 1.0) ** 2, 0.0)
    u = Field(grid, eta)
    assert_allclose(u.norm(), r1 ** -0.5 / math.sqrt(630.0), rtol=1e-3)


def test_quasimode_orthogonality_and_frozen_ratio():
    grid = make_grid(800, 12.0)
    v, ratio = analysis.quasimode(1e3, grid)
    chi = Field(grid, grid.nodes ** 1.5 * specfun.g(grid.nodes))
    overlap = abs(quadrature(v, chi)) / (v.norm() * chi.norm())
    assert overlap <= 1e-6
    assert abs(ratio - 214.74928) / 214.74928 < 1e-2


def test_quasimode_certifies_resolvent_at_its_shift():
    # s_min at the quasimode's shift is below the quasimode ratio
    grid = make_grid(800, 12.0)
    v, ratio = analysis.quasimode(1e3, grid)
    r1 = 1e3 ** (1.0 / 6.0)
    lam_q = 1e3 * specfun.sigma(r1)
    matrix = operators.assemble_L1(ModeSpec(alpha=EIGHT_PI * 1e3, k=1), grid)
    assert solver.smallest_singular_value(matrix, lam_q) <= ratio


def test_quasimode_guards():
    with pytest.raises(ValueError):
        analysis.quasimode(0.5, make_grid(800, 12.0))
    with pytest.raises(ValueError):
        # support reaches past r_max for beta = 1e12 (r1 = 100)
        analysis.quasimode(1e12, make_grid(2000, 40.0))
    with pytest.raises(ValueError):
        # h = 0.1 is far above 1/(20 r1)
        analysis.quasimode(1e3, make_grid(120, 12.0))


def test_fit_loglog_recovers_exact_line():
    xs = np.log([10.0, 100.0, 1000.0, 10000.0])
    pts = [(x, 0.5 * x - 1.0) for x in xs]
    fit = analysis.fit_loglog(pts)
    assert abs(fit.slope - 0.5) < 1e-12
    assert abs(fit.intercept + 1.0) < 1e-12
    assert fit.max_residual < 1e-12


def test_fit_loglog_needs_points():
    with pytest.raises(ValueError):
        analysis.fit_loglog([(1.0, 1.0)])


def test_scaling_sweep_guards():
    with pytest.raises(ValueError):
        analysis.scaling_sweep([1.0, 2.0, 3.0], 1, "sigma")
    with pytest.raises(ValueError):
        analysis.scaling_sweep([5.0, 5.0, 5.0, 5.0], 1, "sigma")
    with pytest.raises(ValueError):
        analysis.scaling_sweep([1.0, 2.0, 4.0, 8.0], 1, "slope")


def test_sweep_point_psi_row():
    pt = analysis.sweep_point(ModeSpec(alpha=0.0, k=1), "psi", n=300)
    assert pt.quantity == "psi"
    assert pt.lambda_star == 0.0
    assert abs(pt.value - 1.5) < 2e-3
    with pytest.raises(ValueError):
        analysis.sweep_point(ModeSpec(alpha=0.0, k=1), "spectrum")
