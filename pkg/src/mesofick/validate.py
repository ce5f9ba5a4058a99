"""Self-check suite run by the ``validate`` command: exercises the core
invariants of every module on a configured instance and reports a
pass/fail table.
"""

import numpy as np

from .fixed_point import outer_solve
from .grid_kernel import Field, KernelWeights, build_kernel
from .linop import DirectSolve, GainField, NeumannSeries, resolvent
from .macroscopic import auxiliary_field, boundary_derivatives_m0, \
    current, solve_macroscopic
from .errors import MesofickError


def _corrupted(kernel):
    """Negative-control hook: break the mass normalization of one row."""
    band = kernel.band.copy()
    band[band.shape[0] // 2] *= 1.01
    return KernelWeights(grid=kernel.grid, band=band,
                         a_minus=kernel.a_minus, a_plus=kernel.a_plus)


def check_kernel_mass(params, grid, kernel):
    worst = float(np.max(np.abs(kernel.row_mass() - 1.0)))
    return worst <= 1e-12, f"max |row mass - 1| = {worst:.3e}"


def check_constant_fixed_point(params, grid, kernel):
    mu = params.mu_minus
    p = params.with_boundary(mu, mu)
    report = outer_solve(p, grid, kernel)
    dev = float(np.max(np.abs(report.m.values - mu)))
    ok = (dev <= 1e-12 and report.j == 0.0
          and report.trace.outer_iterations == 1)
    return ok, (f"constant deviation {dev:.3e}, j = {report.j}, "
                f"{report.trace.outer_iterations} outer iteration(s)")


def check_resolvent_oracle(params, grid, kernel, seed=0, n_cases=5):
    rng = np.random.default_rng(seed)
    n = grid.n_nodes
    worst = 0.0
    for _ in range(n_cases):
        lam = rng.uniform(0.3, 0.9)
        smooth = rng.standard_normal(n)
        for _ in range(3):      # crude smoothing to keep p field-like
            smooth[1:-1] = 0.25 * smooth[:-2] + 0.5 * smooth[1:-1] \
                + 0.25 * smooth[2:]
        p = lam * (0.55 + 0.45 * np.tanh(smooth))
        g = rng.uniform(-1.0, 1.0, n)
        gain = GainField(gain=Field(p, grid),
                         gain_slope=Field(np.zeros(n), grid),
                         lambda_observed=float(np.max(p)))
        gf = Field(g, grid)
        series = resolvent(kernel, gain, gf, NeumannSeries(1e-13))
        direct = resolvent(kernel, gain, gf, DirectSolve())
        worst = max(worst, float(np.max(np.abs(series.values
                                               - direct.values))))
    return worst <= 1e-10, f"max series/direct gap = {worst:.3e}"


def check_h_consistency(params, grid, kernel):
    j = current(params.beta, params.mu_minus, params.mu_plus)
    m0 = solve_macroscopic(params, grid)
    h_quad = auxiliary_field(params, grid, m0, j)
    h_closed = np.arctanh(m0.values) / params.beta - m0.values
    worst = float(np.max(np.abs(h_quad.values - h_closed)))
    return worst <= 1e-8, f"max quadrature/closed-form gap = {worst:.3e}"


def check_boundary_derivatives(params, grid, kernel, step=1e-5):
    m0 = solve_macroscopic(params, grid)
    d_minus, d_plus = boundary_derivatives_m0(params, grid, m0)
    worst = 0.0
    for which, analytic in (("mu_minus", d_minus), ("mu_plus", d_plus)):
        up = solve_macroscopic(
            params.with_boundary(
                params.mu_minus + (step if which == "mu_minus" else 0.0),
                params.mu_plus + (step if which == "mu_plus" else 0.0)),
            grid)
        dn = solve_macroscopic(
            params.with_boundary(
                params.mu_minus - (step if which == "mu_minus" else 0.0),
                params.mu_plus - (step if which == "mu_plus" else 0.0)),
            grid)
        fd = (up.values - dn.values) / (2.0 * step)
        scale = np.maximum(np.abs(analytic.values), 1e-3)
        worst = max(worst, float(np.max(np.abs(fd - analytic.values)
                                        / scale)))
    return worst <= 1e-4, f"max relative FD gap = {worst:.3e}"


CHECKS = [
    ("kernel-mass", check_kernel_mass),
    ("constant-fixed-point", check_constant_fixed_point),
    ("resolvent-oracle", check_resolvent_oracle),
    ("h0-consistency", check_h_consistency),
    ("boundary-derivative", check_boundary_derivatives),
]


def run_checks(params, grid, seed=0, corrupt_kernel=False):
    """Run every check; returns (all_passed, rows).

    ``corrupt_kernel`` is a negative-control hook that breaks the kernel
    normalization so the mass check must fail.
    """
    kernel = build_kernel(grid)
    if corrupt_kernel:
        kernel = _corrupted(kernel)
    rows = []
    for name, fn in CHECKS:
        try:
            if fn is check_resolvent_oracle:
                ok, detail = fn(params, grid, kernel, seed=seed)
            else:
                ok, detail = fn(params, grid, kernel)
        except MesofickError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append((name, ok, detail))
    return all(ok for _, ok, _ in rows), rows
