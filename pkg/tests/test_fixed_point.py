import numpy as np
import pytest

import mesofick as mf
from mesofick.errors import IterationLimitError, WindowViolationError


class TestInnerSolve:
    def test_exact_fixed_point_returns_immediately(self, p1_params,
                                                   coarse_grid,
                                                   coarse_kernel):
        mu = 0.75
        h = mf.Field.full(coarse_grid, mf.h_tilde(1.25, mu))
        m_init = mf.Field.full(coarse_grid, mu)
        record = []
        out = mf.inner_solve(p1_params, coarse_kernel, h, m_init, (mu, mu),
                             record=record)
        assert np.max(np.abs(out.values - mu)) <= 1e-13
        assert len(record) == 1
        assert record[0][0] <= 1e-13      # first correction already zero

    def test_first_correction_scale(self, p1_params, p1_grid, p1_kernel):
        tc = mf.theory_constants(p1_params)
        j = mf.current(1.25, 0.8, 0.7)
        m0 = mf.solve_macroscopic(p1_params, p1_grid)
        h0 = mf.auxiliary_field(p1_params, p1_grid, m0, j)
        record = []
        mf.inner_solve(p1_params, p1_kernel, h0, m0, (0.8, 0.7),
                       record=record)
        phi1 = record[0][0]
        assert phi1 <= tc.resolvent_bound * tc.first_step_scale \
            * p1_params.epsilon

    def test_quadratic_decay(self, p1_params, p1_grid, p1_kernel):
        tc = mf.theory_constants(p1_params)
        j = mf.current(1.25, 0.8, 0.7)
        m0 = mf.solve_macroscopic(p1_params, p1_grid)
        h0 = mf.auxiliary_field(p1_params, p1_grid, m0, j)
        record = []
        mf.inner_solve(p1_params, p1_kernel, h0, m0, (0.8, 0.7),
                       record=record)
        norms = [r[0] for r in record]
        assert len(norms) >= 3
        quad_const = tc.resolvent_bound * tc.newton_scale
        for prev, nxt in zip(norms, norms[1:]):
            if quad_const * prev * prev < 1e-12:
                continue   # next correction sits at the series floor
            assert nxt <= quad_const * prev * prev

    def test_window_violation_detected(self, p1_params, coarse_grid,
                                       coarse_kernel):
        hi = p1_params.window[1]
        m_init = mf.Field.full(coarse_grid, hi + 0.01)
        h = mf.Field.full(coarse_grid, 0.0)
        with pytest.raises(WindowViolationError):
            mf.inner_solve(p1_params, coarse_kernel, h, m_init,
                           (hi + 0.01, hi + 0.01))

    def test_iteration_cap_raises_with_trace(self, p1_grid, p1_kernel):
        params = mf.ModelParams(beta=1.25, mu_minus=0.8, mu_plus=0.7,
                                epsilon=1 / 50, max_inner=1)
        j = mf.current(1.25, 0.8, 0.7)
        m0 = mf.solve_macroscopic(params, p1_grid)
        h0 = mf.auxiliary_field(params, p1_grid, m0, j)
        with pytest.raises(IterationLimitError) as info:
            mf.inner_solve(params, p1_kernel, h0, m0, (0.8, 0.7),
                           record=[])
        assert info.value.trace is not None
        assert len(info.value.trace) == 1


class TestOuterSolve:
    def test_equal_boundaries_trivial(self, coarse_grid, coarse_kernel):
        params = mf.ModelParams(beta=1.25, mu_minus=0.75, mu_plus=0.75,
                                epsilon=1 / 25)
        report = mf.outer_solve(params, coarse_grid, coarse_kernel)
        assert report.j == 0.0
        assert report.trace.outer_iterations == 1
        assert np.max(np.abs(report.m.values - 0.75)) <= 1e-13
        assert np.max(np.abs(report.h.values
                             - mf.h_tilde(1.25, 0.75))) <= 1e-13
        assert report.residual_fixed_point <= 1e-13

    def test_converged_residual(self, p1_params, p1_report):
        assert report_converged(p1_report, p1_params)

    def test_outer_contraction(self, p1_report):
        ratios = p1_report.trace.alpha_ratios()
        assert len(ratios) >= 2
        assert all(r <= 0.9 for r in ratios)

    def test_strictly_decreasing_increments(self, p1_report):
        d = p1_report.trace.outer_alpha_dm
        assert all(b < a for a, b in zip(d, d[1:]))

    def test_window_invariant(self, p1_params, p1_report):
        lo, hi = p1_params.window
        assert np.all(p1_report.m.values > lo)
        assert np.all(p1_report.m.values < hi)
        assert all(lam < 1.0 for step in p1_report.trace.lambda_history
                   for lam in step)

    def test_drift_bound(self, p1_params, p1_report):
        tc = p1_report.constants
        bound = 4.0 * np.exp(2.0 * tc.alpha) * tc.resolvent_bound \
            * tc.newton_scale * p1_params.epsilon
        assert p1_report.sup_diff_m0 <= bound
        assert p1_report.sup_diff_m0 <= 0.05 * 1.0   # far below window size

    def test_h_update_inequality(self, p1_params, p1_report):
        tr = p1_report.trace
        c_const = 2.0 * p1_report.j / (p1_params.delta_prime
                                       * (2.0 - p1_params.delta_prime))
        bound = c_const / (p1_params.beta * p1_report.constants.alpha)
        for dh, dm in zip(tr.outer_alpha_dh, tr.outer_alpha_dm):
            if dm > 0.0:
                assert dh <= bound * dm

    def test_achieved_boundary_is_profile_endpoints(self, p1_report):
        assert p1_report.achieved_boundary[0] == p1_report.m.values[0]
        assert p1_report.achieved_boundary[1] == p1_report.m.values[-1]
        assert p1_report.boundary_drift() > 0.0

    def test_drift_vanishes_with_epsilon(self):
        drifts = []
        for eps in (1 / 25, 1 / 50, 1 / 100):
            params = mf.ModelParams(beta=1.25, mu_minus=0.8, mu_plus=0.7,
                                    epsilon=eps)
            grid = mf.Grid(eps, 20)
            drifts.append(mf.outer_solve(params, grid).sup_diff_m0)
        assert drifts[0] > drifts[1] > drifts[2]

    def test_direct_method_agrees_with_series(self, p1_params, p1_grid,
                                              p1_kernel, p1_report):
        report = mf.outer_solve(p1_params, p1_grid, p1_kernel,
                                method=mf.DirectSolve())
        assert np.max(np.abs(report.m.values
                             - p1_report.m.values)) <= 1e-10


def report_converged(report, params):
    return (report.residual_fixed_point < params.outer_tol
            and report.trace.outer_sup_dm[-1] < params.outer_tol)


class TestResidual:
    def test_exact_constant_solution(self, coarse_grid, coarse_kernel):
        params = mf.ModelParams(beta=1.25, mu_minus=0.75, mu_plus=0.75,
                                epsilon=1 / 25)
        mu = 0.75
        m = mf.Field.full(coarse_grid, mu)
        h = mf.Field.full(coarse_grid, mf.h_tilde(1.25, mu))
        r_fp, r_flux = mf.residual(params, coarse_kernel, m, h, (mu, mu))
        assert r_fp <= 1e-14
        assert r_flux <= 1e-14

    def test_flux_residual_refines_with_grid(self):
        params = mf.ModelParams(beta=1.25, mu_minus=0.8, mu_plus=0.7,
                                epsilon=1 / 25)
        fluxes, spacings = [], []
        for npu in (10, 20, 40):
            grid = mf.Grid(1 / 25, npu)
            report = mf.outer_solve(params, grid)
            fluxes.append(report.residual_flux)
            spacings.append(grid.spacing)
        order = np.polyfit(np.log(spacings), np.log(fluxes), 1)[0]
        assert order >= 1.0


class TestTheoryConstantsFlags:
    def test_p1_inside_proven_regime(self, p1_params):
        tc = mf.theory_constants(p1_params)
        assert p1_params.epsilon < tc.eps_inner_max
        assert p1_params.epsilon < tc.eps_outer_max
