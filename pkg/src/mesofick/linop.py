"""Linearized nonlocal operator around an iterate, its resolvent by
Neumann series or direct sparse solve, and the plain/weighted sup norms.

The operator multiplies a field by the local gain (derivative of tanh at
the current effective field) and convolves with the kernel; while the
observed gain stays below 1 the resolvent is a convergent geometric
series, which is also how the direct solve's matrix is assembled (the
boundary-mass columns fold onto the endpoint nodes, matching the series
semantics where each term supplies its own endpoint values).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import backend
from .errors import ContractionLossError, GridMismatchError
from .grid_kernel import Field

MAX_SERIES_TERMS = 100_000


@dataclass
class GainField:
    """Local gain of the linearization and its derivative, with the
    observed sup bound that controls the series."""

    gain: Field
    gain_slope: Field
    lambda_observed: float


@dataclass(frozen=True)
class NeumannSeries:
    """Resolvent by geometric series with an a-posteriori tail bound."""

    truncation_tol: float = 1e-13

    def __post_init__(self):
        if self.truncation_tol <= 0.0:
            raise ValueError("truncation_tol must be positive")


@dataclass(frozen=True)
class DirectSolve:
    """Resolvent by assembling and solving the sparse linear system."""


def gain(params, kernel, m, h, boundary):
    """Evaluate the linearization gain fields at the state (m, h), the
    delta masses acting on the given boundary pair."""
    if m.grid != h.grid or m.grid != kernel.grid:
        raise GridMismatchError("gain inputs on incompatible discretizations")
    conv = kernel.apply(m.values, boundary[0], boundary[1])
    u = params.beta * (conv + h.values)
    t = np.tanh(u)
    p = params.beta * (1.0 - t * t)
    return GainField(gain=Field(p, m.grid),
                     gain_slope=Field(p * t, m.grid),
                     lambda_observed=float(np.max(p)))


def apply_linearized(kernel, gain_field, f, f_left, f_right):
    """Apply the gain-weighted convolution; endpoint delta masses pick up
    the gain at the endpoint nodes times the supplied boundary values."""
    if f.grid != kernel.grid:
        raise GridMismatchError("field and kernel on incompatible "
                                "discretizations")
    p = gain_field.gain.values
    out = kernel.apply(p * f.values, p[0] * f_left, p[-1] * f_right)
    return Field(out, kernel.grid)


def _series_values(kernel, p, g_values, truncation_tol):
    lam = float(np.max(p))
    tol_abs = truncation_tol * (1.0 - lam)
    out, terms, last = backend.neumann_resolvent(
        kernel.band, kernel.a_minus.values, kernel.a_plus.values,
        p, g_values, tol_abs, MAX_SERIES_TERMS)
    if last >= tol_abs and terms >= MAX_SERIES_TERMS:
        raise ContractionLossError(
            "resolvent series failed to reach its tail tolerance")
    return out


def _direct_values(kernel, p, g_values):
    n = kernel.grid.n_nodes
    half = kernel.half_bandwidth
    band = kernel.band
    rows = np.repeat(np.arange(n), band.shape[1])
    cols = rows + np.tile(np.arange(-half, half + 1), n)
    vals = band.ravel().copy()
    keep = (cols >= 0) & (cols < n)
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    vals = vals * p[cols]

    # boundary-mass columns folded onto the endpoint nodes
    all_rows = np.arange(n)
    rows = np.concatenate([rows, all_rows, all_rows])
    cols = np.concatenate([cols, np.zeros(n, dtype=int),
                           np.full(n, n - 1, dtype=int)])
    vals = np.concatenate([vals, kernel.a_minus.values * p[0],
                           kernel.a_plus.values * p[n - 1]])

    op = sp.coo_matrix((vals, (rows, cols)), shape=(n, n))
    system = (sp.identity(n, format="csc") - op.tocsc())
    return spsolve(system, g_values)


def _newton_values(kernel, p, g_values, method):
    """Solve (I - diag(p) W) f = g, the exact Jacobian system of the
    Newton corrections (gain applied at the evaluation point).

    Reuses the series machinery through the conjugation identity
    (I - pW)^{-1} g = g + p * (I - Wp)^{-1} (W g).
    """
    wg = kernel.apply(g_values, g_values[0], g_values[-1])
    if isinstance(method, DirectSolve):
        y = _direct_values(kernel, p, wg)
    else:
        y = _series_values(kernel, p, wg, method.truncation_tol)
    return g_values + p * y


def resolvent(kernel, gain_field, g, method=NeumannSeries()):
    """Solve (I - L) f = g for the gain-weighted convolution operator L."""
    if g.grid != kernel.grid:
        raise GridMismatchError("field and kernel on incompatible "
                                "discretizations")
    if gain_field.lambda_observed >= 1.0:
        raise ContractionLossError(
            "loss of the contraction regime: observed gain bound is "
            f"{gain_field.lambda_observed:.6f} >= 1 (profile escaped the "
            "admissible window)")
    p = gain_field.gain.values
    if isinstance(method, NeumannSeries):
        values = _series_values(kernel, p, g.values, method.truncation_tol)
    elif isinstance(method, DirectSolve):
        values = _direct_values(kernel, p, g.values)
    else:
        raise TypeError(f"unknown resolvent method {method!r}")
    return Field(values, kernel.grid)


def _values(f):
    return f.values if isinstance(f, Field) else np.asarray(f, dtype=float)


def sup_norm(f):
    """Largest absolute node value."""
    v = _values(f)
    return float(np.max(np.abs(v))) if v.size else 0.0


def alpha_norm(f, alpha):
    """Sup norm damped by exp(-alpha * epsilon * x); equals the sup norm
    at alpha = 0 and is never larger."""
    if not isinstance(f, Field):
        raise TypeError("alpha_norm needs a Field (grid coordinates)")
    weight = np.exp(-alpha * f.grid.epsilon * f.grid.x)
    return float(np.max(np.abs(f.values) * weight))
