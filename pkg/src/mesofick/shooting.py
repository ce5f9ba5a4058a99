"""Boundary map from prescribed to achieved endpoint magnetizations, its
finite-difference Jacobian, and the quasi-Newton inversion that makes the
converged profile meet prescribed boundary values.

The map is the identity up to O(epsilon), so the inversion starts from
the target pair with an identity Jacobian and only refreshes it by finite
differences when a step fails to reduce the defect.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IterationLimitError, TargetRangeError
from .fixed_point import outer_solve
from .macroscopic import spinodal

__all__ = ["BoundaryMapSample", "Jacobian2", "boundary_map",
           "estimate_jacobian", "shoot"]


@dataclass
class BoundaryMapSample:
    """One evaluation of the boundary map."""

    input_pair: tuple
    output_pair: tuple
    report: object


@dataclass
class Jacobian2:
    """Finite-difference Jacobian of the boundary map."""

    matrix: np.ndarray
    determinant: float
    deviation: float        # max |entry - identity entry|

    @classmethod
    def from_matrix(cls, matrix):
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix=matrix,
                   determinant=float(np.linalg.det(matrix)),
                   deviation=float(np.max(np.abs(matrix - np.eye(2)))))


def _check_pair(params, pair, margin=0.0):
    lo = spinodal(params.beta)
    for mu in pair:
        if not lo + margin < mu < 1.0 - margin:
            raise TargetRangeError(
                f"boundary value {mu} outside the admissible interval "
                f"({lo:.6f}, 1)")


def boundary_map(params, grid, kernel, pair):
    """Run the full solve with the given input pair and return the
    achieved endpoint values."""
    _check_pair(params, pair)
    p = params.with_boundary(*pair)
    report = outer_solve(p, grid, kernel)
    return BoundaryMapSample(input_pair=(float(pair[0]), float(pair[1])),
                             output_pair=report.achieved_boundary,
                             report=report)


def estimate_jacobian(params, grid, kernel, pair, step=1e-4):
    """Central finite differences of the boundary map in each input
    coordinate; the step is halved automatically (up to 8 times) while a
    perturbed pair would leave the admissible interval."""
    lo = spinodal(params.beta)
    for _ in range(8):
        ok = all(lo < mu - step and mu + step < 1.0 for mu in pair)
        if ok:
            break
        step *= 0.5
    else:
        raise TargetRangeError(
            "perturbed pair leaves the admissible interval even after "
            "step reduction; use a smaller step or move the pair inward")

    cols = []
    for i in range(2):
        shift = np.zeros(2)
        shift[i] = step
        plus = boundary_map(params, grid, kernel, tuple(pair + shift))
        minus = boundary_map(params, grid, kernel, tuple(pair - shift))
        cols.append((np.asarray(plus.output_pair)
                     - np.asarray(minus.output_pair)) / (2.0 * step))
    matrix = np.column_stack(cols)
    return Jacobian2.from_matrix(matrix)


def shoot(params, grid, kernel, target_pair):
    """Quasi-Newton inversion of the boundary map.

    Starts from the target itself with an identity Jacobian; a
    finite-difference refresh happens only after a step that fails to
    reduce the sup defect.  Returns the final report, whose achieved
    boundary matches the target within shoot_tol.
    """
    target = np.asarray(target_pair, dtype=float)
    _check_pair(params, tuple(target))

    pair = target.copy()
    sample = boundary_map(params, grid, kernel, tuple(pair))
    defect = np.asarray(sample.output_pair) - target
    norm = float(np.max(np.abs(defect)))
    jac = np.eye(2)
    steps = 0

    while norm >= params.shoot_tol:
        if steps >= params.max_shoot:
            raise IterationLimitError(
                f"shooting failed to reach {params.shoot_tol} within "
                f"{params.max_shoot} steps (defect {norm:.3e})")
        candidate = pair - np.linalg.solve(jac, defect)
        _check_pair(params, tuple(candidate))
        new_sample = boundary_map(params, grid, kernel, tuple(candidate))
        new_defect = np.asarray(new_sample.output_pair) - target
        new_norm = float(np.max(np.abs(new_defect)))
        steps += 1
        if new_norm >= norm:
            jac = estimate_jacobian(params, grid, kernel, tuple(pair)).matrix
            candidate = pair - np.linalg.solve(jac, defect)
            _check_pair(params, tuple(candidate))
            new_sample = boundary_map(params, grid, kernel, tuple(candidate))
            new_defect = np.asarray(new_sample.output_pair) - target
            new_norm = float(np.max(np.abs(new_defect)))
            steps += 1
        pair, sample, defect, norm = candidate, new_sample, new_defect, new_norm

    report = sample.report
    report.shoot_steps = steps
    return report
