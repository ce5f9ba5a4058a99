"""Acceptance suite: every criterion at its stated tolerance, one
pass/fail line per criterion on stdout (run with pytest -s or -v to see
them)."""

import time

import numpy as np
import pytest

import mesofick as mf
from mesofick.cli import fit_loglog
from conftest import P1, smooth_positive_gain

SWEEP_EPS = (1 / 25, 1 / 50, 1 / 100, 1 / 200)


def announce(num, detail):
    print(f"ACCEPTANCE {num}: PASS - {detail}")


@pytest.fixture(scope="module")
def sweep_reports():
    start = time.perf_counter()
    reports = {}
    for eps in SWEEP_EPS:
        params = mf.ModelParams(epsilon=eps, **P1)
        reports[eps] = mf.outer_solve(params, mf.Grid(eps, 20))
    return reports, time.perf_counter() - start


def test_criterion_1_fixed_point_residual(p1_params, p1_grid, p1_kernel):
    start = time.perf_counter()
    report = mf.outer_solve(p1_params, p1_grid, p1_kernel)
    elapsed = time.perf_counter() - start
    assert report.residual_fixed_point < 1e-10
    assert elapsed < 10.0
    announce(1, f"residual {report.residual_fixed_point:.3e} < 1e-10 "
                f"in {elapsed:.2f}s")


def test_criterion_2_fick_limit(sweep_reports):
    reports, elapsed = sweep_reports
    sups = [reports[eps].sup_diff_m0 for eps in SWEEP_EPS]
    assert all(b < a for a, b in zip(sups, sups[1:])), sups
    slope, _ = fit_loglog(SWEEP_EPS, sups)
    assert 0.8 <= slope <= 1.2
    assert elapsed < 120.0
    announce(2, f"sup diffs {['%.3e' % s for s in sups]} strictly "
                f"decreasing, slope {slope:.3f} in [0.8, 1.2], "
                f"{elapsed:.1f}s")


def test_criterion_3_outer_contraction(sweep_reports):
    reports, _ = sweep_reports
    trace = reports[1 / 200].trace
    ratios = trace.alpha_ratios()
    assert len(ratios) >= 1
    assert all(r <= 0.9 for r in ratios), ratios
    announce(3, f"{len(ratios)} ratios, all <= 0.9; history "
                f"{['%.4f' % r for r in ratios]}; min {min(ratios):.4f}")


def test_criterion_4_quadratic_inner_convergence(sweep_reports):
    reports, _ = sweep_reports
    norms = reports[1 / 50].trace.inner_norms[0]
    assert len(norms) >= 3
    lx = np.log(norms[:-1])
    ly = np.log(norms[1:])
    q = float(np.polyfit(lx, ly, 1)[0])
    assert q >= 1.8
    announce(4, f"first inner solve norms {['%.3e' % v for v in norms]}, "
                f"fitted exponent q = {q:.3f} >= 1.8")


def test_criterion_5_boundary_map_jacobian():
    eps_list = (1 / 25, 1 / 50, 1 / 100)
    deviations = []
    for eps in eps_list:
        params = mf.ModelParams(epsilon=eps, **P1)
        grid = mf.Grid(eps, 20)
        jac = mf.estimate_jacobian(params, grid, mf.build_kernel(grid),
                                   (P1["mu_minus"], P1["mu_plus"]))
        assert jac.determinant > 0.0
        deviations.append(jac.deviation)
    assert all(b < a for a, b in zip(deviations, deviations[1:]))
    slope, _ = fit_loglog(eps_list, deviations)
    assert slope >= 0.8
    announce(5, f"deviations {['%.3e' % d for d in deviations]} "
                f"decreasing, exponent {slope:.3f} >= 0.8, det > 0")


def test_criterion_6_shooting(p1_params, p1_grid, p1_kernel):
    report = mf.shoot(p1_params, p1_grid, p1_kernel, (0.8, 0.7))
    err_left = abs(report.m.values[0] - 0.8)
    err_right = abs(report.m.values[-1] - 0.7)
    assert err_left < 1e-8
    assert err_right < 1e-8
    assert report.shoot_steps <= 5
    announce(6, f"boundary errors ({err_left:.2e}, {err_right:.2e}) < 1e-8 "
                f"in {report.shoot_steps} quasi-Newton steps")


def test_criterion_7_resolvent_oracle_equivalence(coarse_grid,
                                                  coarse_kernel):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        p = smooth_positive_gain(rng, coarse_grid.n_nodes,
                                 rng.uniform(0.3, 0.9))
        gain = mf.GainField(gain=mf.Field(p, coarse_grid),
                            gain_slope=mf.Field(np.zeros_like(p),
                                                coarse_grid),
                            lambda_observed=float(np.max(p)))
        g = mf.Field(rng.uniform(-1.0, 1.0, coarse_grid.n_nodes),
                     coarse_grid)
        series = mf.resolvent(coarse_kernel, gain, g,
                              mf.NeumannSeries(1e-13))
        direct = mf.resolvent(coarse_kernel, gain, g, mf.DirectSolve())
        worst = max(worst, float(np.max(np.abs(series.values
                                               - direct.values))))
    assert worst <= 1e-10
    announce(7, f"max series/direct gap over 50 instances = {worst:.3e} "
                f"<= 1e-10")


def test_criterion_8_closed_form_consistency(p1_params, p1_grid):
    j = mf.current(**P1)
    m0 = mf.solve_macroscopic(p1_params, p1_grid)
    h_quad = mf.auxiliary_field(p1_params, p1_grid, m0, j)
    closed = np.arctanh(m0.values) / P1["beta"] - m0.values
    gap_h = float(np.max(np.abs(h_quad.values - closed)))
    assert gap_h <= 1e-8

    step = 1e-5
    d_minus, d_plus = mf.boundary_derivatives_m0(p1_params, p1_grid, m0)
    worst_rel = 0.0
    for which, analytic in (("mu_minus", d_minus), ("mu_plus", d_plus)):
        dm = step if which == "mu_minus" else 0.0
        dp = step if which == "mu_plus" else 0.0
        up = mf.solve_macroscopic(
            p1_params.with_boundary(0.8 + dm, 0.7 + dp), p1_grid)
        dn = mf.solve_macroscopic(
            p1_params.with_boundary(0.8 - dm, 0.7 - dp), p1_grid)
        fd = (up.values - dn.values) / (2 * step)
        scale = np.maximum(np.abs(analytic.values), 1e-3)
        worst_rel = max(worst_rel,
                        float(np.max(np.abs(fd - analytic.values) / scale)))
    assert worst_rel <= 1e-4
    announce(8, f"h0 quadrature gap {gap_h:.3e} <= 1e-8; boundary "
                f"derivative FD gap {worst_rel:.3e} <= 1e-4")


def test_criterion_9_trivial_instance(coarse_grid, coarse_kernel):
    params = mf.ModelParams(beta=1.25, mu_minus=0.75, mu_plus=0.75,
                            epsilon=1 / 25)
    report = mf.outer_solve(params, coarse_grid, coarse_kernel)
    assert report.j == 0.0
    assert report.trace.outer_iterations == 1
    spread = float(np.max(report.m.values) - np.min(report.m.values))
    assert spread <= 1e-13
    mass_err = float(np.max(np.abs(coarse_kernel.row_mass() - 1.0)))
    assert mass_err <= 1e-12
    announce(9, f"j = 0 exactly, constant profile (spread {spread:.1e}), "
                f"1 outer iteration, kernel mass error {mass_err:.1e}")


def test_criterion_10_paper_constants(p1_params):
    tc = mf.theory_constants(p1_params)
    assert 0.0 < tc.gain_bound < 1.0
    assert tc.eps_inner_max > 0.0
    assert tc.eps_outer_max > 0.0
    inside_inner = p1_params.epsilon < tc.eps_inner_max
    inside_outer = p1_params.epsilon < tc.eps_outer_max
    assert inside_inner and inside_outer
    # regression pins (first computed values, frozen)
    assert tc.gain_bound == pytest.approx(0.4782870949928076, rel=1e-12)
    assert tc.resolvent_bound == pytest.approx(1.9167630135317695,
                                               rel=1e-12)
    assert tc.eps_inner_max == pytest.approx(0.0545397221113647, rel=1e-12)
    assert tc.eps_outer_max == pytest.approx(0.2932003964522419, rel=1e-12)
    assert tc.alpha == pytest.approx(3.84865836664406, rel=1e-12)
    announce(10, f"gain bound {tc.gain_bound:.4f} in (0,1), "
                 f"eps_inner_max {tc.eps_inner_max:.4f}, eps_outer_max "
                 f"{tc.eps_outer_max:.4f}, run inside proven regime: "
                 f"{inside_inner and inside_outer}")
