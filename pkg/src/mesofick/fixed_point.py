"""Two-level constructive scheme for the coupled stationary system.

Inner level: functional Newton corrections at frozen auxiliary field,
each correction obtained by applying the resolvent of the linearized
operator to the current residual (quadratically convergent while the
iterate stays in the admissible window).  Outer level: recompute the
auxiliary field from the new magnetization by quadrature and repeat; the
outer map contracts in the weighted norm for small epsilon, starting from
the diffusive limit profile.

Delta masses act on the running iterate's own endpoint values throughout,
so the converged profile carries boundary values that drift by O(epsilon)
from the prescribed pair; the shooting module removes that drift.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ContractionLossError, IterationLimitError, \
    WindowViolationError
from .grid_kernel import Field, build_kernel
from .linop import NeumannSeries, _newton_values, alpha_norm, sup_norm
from .macroscopic import TheoryConstants, auxiliary_field, current, \
    solve_macroscopic, susceptibility, theory_constants

__all__ = [
    "IterationTrace", "SolverReport", "inner_solve", "outer_solve",
    "residual", "theory_constants",
]


@dataclass
class IterationTrace:
    """Norm history of one outer solve."""

    outer_sup_dm: list = dc_field(default_factory=list)
    outer_alpha_dm: list = dc_field(default_factory=list)
    outer_sup_dh: list = dc_field(default_factory=list)
    outer_alpha_dh: list = dc_field(default_factory=list)
    inner_norms: list = dc_field(default_factory=list)      # per outer step
    lambda_history: list = dc_field(default_factory=list)   # per outer step
    outer_iterations: int = 0
    inner_iterations: int = 0

    def alpha_ratios(self):
        """Consecutive ratios of the weighted outer increments."""
        d = self.outer_alpha_dm
        return [d[i + 1] / d[i] for i in range(len(d) - 1) if d[i] > 0.0]

    def to_dict(self):
        ratios = self.alpha_ratios()
        return {
            "outer_iterations": self.outer_iterations,
            "inner_iterations": self.inner_iterations,
            "outer_sup_dm": list(self.outer_sup_dm),
            "outer_alpha_dm": list(self.outer_alpha_dm),
            "outer_sup_dh": list(self.outer_sup_dh),
            "outer_alpha_dh": list(self.outer_alpha_dh),
            "inner_norms": [list(v) for v in self.inner_norms],
            "lambda_history": [list(v) for v in self.lambda_history],
            "alpha_ratio_history": ratios,
            "min_alpha_ratio": min(ratios) if ratios else None,
            "max_alpha_ratio": max(ratios) if ratios else None,
        }


@dataclass
class SolverReport:
    """Converged pair with residuals, drift metrics and diagnostics."""

    m: Field
    h: Field
    m0: Field
    j: float
    prescribed_boundary: tuple
    achieved_boundary: tuple
    residual_fixed_point: float
    residual_flux: float
    sup_diff_m0: float
    alpha_diff_m0: float
    trace: IterationTrace
    constants: TheoryConstants
    shoot_steps: int = None

    def boundary_drift(self):
        """Sup distance between achieved and prescribed boundary values."""
        return max(abs(self.achieved_boundary[0] - self.prescribed_boundary[0]),
                   abs(self.achieved_boundary[1] - self.prescribed_boundary[1]))

    def to_dict(self):
        out = {
            "j": self.j,
            "prescribed_boundary": list(self.prescribed_boundary),
            "achieved_boundary": list(self.achieved_boundary),
            "boundary_drift": self.boundary_drift(),
            "residual_fixed_point": self.residual_fixed_point,
            "residual_flux": self.residual_flux,
            "sup_diff_m0": self.sup_diff_m0,
            "alpha_diff_m0": self.alpha_diff_m0,
            "trace": self.trace.to_dict(),
            "constants": self.constants.to_dict(),
        }
        if self.shoot_steps is not None:
            out["shoot_steps"] = self.shoot_steps
        return out


def _window_check(params, values, where):
    lo, hi = params.window
    if np.any(values <= lo) or np.any(values >= hi):
        raise WindowViolationError(
            f"left admissible region ({lo:.6f}, {hi:.6f}) during {where}")


def _tanh_state(params, kernel, m_values, h_values, b_left, b_right):
    """tanh of the effective field and the gain, sharing one convolution."""
    conv = kernel.apply(m_values, b_left, b_right)
    t = np.tanh(params.beta * (conv + h_values))
    p = params.beta * (1.0 - t * t)
    return t, p


def _apply_resolvent(kernel, p, g_values, method):
    lam = float(np.max(p))
    if lam >= 1.0:
        raise ContractionLossError(
            "loss of the contraction regime: observed gain bound is "
            f"{lam:.6f} >= 1 (profile escaped the admissible window)")
    return _newton_values(kernel, p, g_values, method), lam


def inner_solve(params, kernel, h, m_init, boundary,
                method=NeumannSeries(), record=None):
    """Newton corrections at frozen h until the newest correction's sup
    norm falls below inner_tol.  ``boundary`` supplies the delta-mass
    values of the initial iterate; corrections shift them along with the
    endpoint nodes.  ``record``, if given, collects (phi_norm, lambda)
    pairs for diagnostics.
    """
    m = m_init.values.copy()
    b_left, b_right = float(boundary[0]), float(boundary[1])
    h_values = h.values
    _window_check(params, m, "inner iteration start")

    for _ in range(params.max_inner):
        t, p = _tanh_state(params, kernel, m, h_values, b_left, b_right)
        residual_values = t - m
        phi, lam = _apply_resolvent(kernel, p, residual_values, method)
        norm = float(np.max(np.abs(phi)))
        if record is not None:
            record.append((norm, lam))
        m = m + phi
        b_left += phi[0]
        b_right += phi[-1]
        _window_check(params, m, "inner iteration")
        if norm < params.inner_tol:
            return Field(m, m_init.grid)

    raise IterationLimitError(
        f"inner Newton failed to reach {params.inner_tol} within "
        f"{params.max_inner} corrections", trace=record)


def residual(params, kernel, m, h, boundary):
    """Residuals of the converged pair.

    First component: sup defect of the coupled system (magnetization
    equation plus the quadrature definition of h).  Second: sup defect of
    the flux form on interior nodes, with central differences inside and
    second-order one-sided stencils at the endpoints.
    """
    grid = m.grid
    j = current(params.beta, params.mu_minus, params.mu_plus)
    t, _ = _tanh_state(params, kernel, m.values, h.values,
                       boundary[0], boundary[1])
    r_m = float(np.max(np.abs(m.values - t)))
    h_of_m = auxiliary_field(params, grid, m, j)
    r_h = float(np.max(np.abs(h.values - h_of_m.values)))

    dm = np.empty_like(m.values)
    v = m.values
    s = grid.spacing
    dm[1:-1] = (v[2:] - v[:-2]) / (2.0 * s)
    dm[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * s)
    dm[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * s)
    # derivative of the nonlocal average: the delta-mass terms cancel the
    # integration-by-parts boundary terms, leaving the tent-only part
    conv_dm = kernel.apply(dm, 0.0, 0.0)
    flux = -dm + susceptibility(params.beta, v) * conv_dm - j * params.epsilon
    return r_m + r_h, float(np.max(np.abs(flux[1:-1])))


def outer_solve(params, grid, kernel=None, method=NeumannSeries()):
    """Iterate magnetization updates and auxiliary-field recomputations
    from the diffusive limit profile until the outer increment's sup norm
    falls below outer_tol."""
    if kernel is None:
        kernel = build_kernel(grid)
    constants = theory_constants(params)
    alpha = constants.alpha
    j = current(params.beta, params.mu_minus, params.mu_plus)

    m0 = solve_macroscopic(params, grid)
    h = auxiliary_field(params, grid, m0, j)
    drift_cap = params.delta - params.delta_prime

    trace = IterationTrace()
    m_prev = m0
    h_prev = h
    converged = False
    for _ in range(params.max_outer):
        inner_record = []
        m_next = inner_solve(params, kernel, h_prev, m_prev,
                             (m_prev.values[0], m_prev.values[-1]),
                             method=method, record=inner_record)
        h_next = auxiliary_field(params, grid, m_next, j)

        diff_m = Field(m_next.values - m_prev.values, grid)
        diff_h = Field(h_next.values - h_prev.values, grid)
        trace.outer_sup_dm.append(sup_norm(diff_m))
        trace.outer_alpha_dm.append(alpha_norm(diff_m, alpha))
        trace.outer_sup_dh.append(sup_norm(diff_h))
        trace.outer_alpha_dh.append(alpha_norm(diff_h, alpha))
        trace.inner_norms.append([r[0] for r in inner_record])
        trace.lambda_history.append([r[1] for r in inner_record])
        trace.outer_iterations += 1
        trace.inner_iterations += len(inner_record)

        if float(np.max(np.abs(m_next.values - m0.values))) >= drift_cap:
            raise WindowViolationError(
                "outer iterate drifted from the limit profile by more than "
                f"{drift_cap:.6f}")

        m_prev, h_prev = m_next, h_next
        if trace.outer_sup_dm[-1] < params.outer_tol:
            converged = True
            break

    if not converged:
        raise IterationLimitError(
            f"outer iteration failed to reach {params.outer_tol} within "
            f"{params.max_outer} steps", trace=trace)

    achieved = (float(m_prev.values[0]), float(m_prev.values[-1]))
    r_fp, r_flux = residual(params, kernel, m_prev, h_prev, achieved)
    diff0 = Field(m_prev.values - m0.values, grid)
    return SolverReport(
        m=m_prev, h=h_prev, m0=m0, j=j,
        prescribed_boundary=(params.mu_minus, params.mu_plus),
        achieved_boundary=achieved,
        residual_fixed_point=r_fp, residual_flux=r_flux,
        sup_diff_m0=sup_norm(diff0), alpha_diff_m0=alpha_norm(diff0, alpha),
        trace=trace, constants=constants)
