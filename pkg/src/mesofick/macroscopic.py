"""Closed-form macroscopic objects: thermodynamic functions, the steady
current, the diffusive limit profile and its auxiliary field, analytic
boundary derivatives, and the sufficient-condition constants used as
solver diagnostics.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import BracketError, DomainError, RegimeError
from .grid_kernel import Field, build_kernel

__all__ = [
    "ModelParams", "TheoryConstants", "spinodal", "mean_field_magnetization",
    "susceptibility", "entropy", "free_energy_density", "current", "h_tilde",
    "solve_macroscopic", "auxiliary_field", "boundary_derivatives_m0",
    "free_energy", "theory_constants",
]


def spinodal(beta):
    """Magnetization separating the metastable and unstable regions."""
    if beta <= 1.0:
        raise DomainError("subcritical temperature: requires beta > 1")
    return math.sqrt(1.0 - 1.0 / beta)


def mean_field_magnetization(beta, tol=1e-12):
    """Positive root of m = tanh(beta*m), found by bisection."""
    if beta <= 1.0:
        raise DomainError("subcritical temperature: the only root is 0")
    lo, hi = spinodal(beta), 1.0
    flo = lo - math.tanh(beta * lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fmid = mid - math.tanh(beta * mid)
        if (fmid > 0.0) == (flo > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def susceptibility(beta, m):
    """Mobility coefficient beta*(1 - m^2)."""
    val = beta * (1.0 - np.asarray(m, dtype=float) ** 2)
    return val if val.ndim else float(val)


def entropy(m):
    """Binary mixing entropy; continuous limit value 0 at m = +-1."""
    m = np.asarray(m, dtype=float)
    if np.any(np.abs(m) > 1.0):
        raise DomainError("entropy defined for |m| <= 1")
    plus = (1.0 + m) / 2.0
    minus = (1.0 - m) / 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -np.where(plus > 0.0, plus * np.log(plus), 0.0) \
            - np.where(minus > 0.0, minus * np.log(minus), 0.0)
    return s if s.ndim else float(s)


def free_energy_density(beta, m):
    """Double-well bulk density -m^2/2 - S(m)/beta."""
    m = np.asarray(m, dtype=float)
    val = -0.5 * m ** 2 - entropy(m) / beta
    return val if val.ndim else float(val)


def current(beta, mu_minus, mu_plus):
    """Steady current carried between boundary magnetizations, per unit
    epsilon; positive when mu_minus > mu_plus inside the admissible window."""
    return ((1.0 - beta) * (mu_minus - mu_plus)
            + (beta / 3.0) * (mu_minus ** 3 - mu_plus ** 3))


def h_tilde(beta, mu_minus):
    """Integration constant of the auxiliary field, pinned at the left
    boundary: arctanh(mu)/beta - mu."""
    if abs(mu_minus) >= 1.0:
        raise DomainError("boundary magnetization must satisfy |mu| < 1")
    return math.atanh(mu_minus) / beta - mu_minus


@dataclass(frozen=True)
class ModelParams:
    """Physical and algorithmic parameters of one solve.

    ``delta_prime`` defaults to half the distance delta between the
    boundary data and the edges of the admissible window (spinodal, 1).
    """

    beta: float
    mu_minus: float
    mu_plus: float
    epsilon: float
    delta_prime: float = None
    inner_tol: float = 1e-12
    outer_tol: float = 1e-10
    shoot_tol: float = 1e-8
    max_inner: int = 40
    max_outer: int = 200
    max_shoot: int = 20

    def __post_init__(self):
        if self.beta <= 1.0:
            raise DomainError("beta must exceed the critical value 1")
        m_star = spinodal(self.beta)
        for name, mu in (("mu_minus", self.mu_minus), ("mu_plus", self.mu_plus)):
            if not m_star < mu < 1.0:
                raise DomainError(
                    f"{name}={mu} outside the admissible window "
                    f"({m_star:.6f}, 1)")
        if not 0.0 < self.epsilon <= 0.5:
            raise DomainError("epsilon must lie in (0, 1/2]")
        delta = self.delta
        if delta <= 0.0:
            raise DomainError("boundary data leave no admissible margin")
        if self.delta_prime is None:
            object.__setattr__(self, "delta_prime", delta / 2.0)
        if not 0.0 < self.delta_prime < delta:
            raise DomainError(
                f"delta_prime must lie in (0, {delta}), got {self.delta_prime}")
        for name in ("inner_tol", "outer_tol", "shoot_tol"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be positive")

    @property
    def m_star(self):
        return spinodal(self.beta)

    @property
    def delta(self):
        return min(min(self.mu_minus, self.mu_plus) - self.m_star,
                   1.0 - max(self.mu_minus, self.mu_plus))

    @property
    def window(self):
        """Open interval the iterates must stay inside."""
        return (self.m_star + self.delta_prime, 1.0 - self.delta_prime)

    def with_boundary(self, mu_minus, mu_plus):
        """Copy with replaced boundary data; delta_prime is re-derived."""
        return replace(self, mu_minus=float(mu_minus), mu_plus=float(mu_plus),
                       delta_prime=None)


@dataclass(frozen=True)
class TheoryConstants:
    """Sufficient-condition constants reported as diagnostics.

    gain_bound < 1 guarantees the resolvent series converges for every
    admissible iterate; eps_inner_max / eps_outer_max are the largest
    epsilon for which quadratic inner convergence and outer contraction
    are certified.
    """

    m_star: float
    field_bound: float          # sup bound on |J*m + h| over the window
    gain_bound: float           # sup bound on the linearization gain
    resolvent_bound: float      # 1 / (1 - gain_bound)
    first_step_scale: float     # first inner correction per unit epsilon
    slope_bound: float          # bound on the gain derivative
    newton_scale: float         # max(first_step_scale, slope_bound)
    eps_inner_max: float
    alpha: float                # decay rate of the weighted norm
    eps_outer_max: float

    def to_dict(self):
        return {k: getattr(self, k) for k in (
            "m_star", "field_bound", "gain_bound", "resolvent_bound",
            "first_step_scale", "slope_bound", "newton_scale",
            "eps_inner_max", "alpha", "eps_outer_max")}


def theory_constants(params):
    """Evaluate the closed-form sufficient constants for ``params``.

    Raises if the gain bound reaches 1 (delta_prime too small or boundary
    data too close to the spinodal).
    """
    beta = params.beta
    dp = params.delta_prime
    m_star = params.m_star
    j = current(beta, params.mu_minus, params.mu_plus)

    lo, hi = m_star + dp, 1.0 - dp
    zeta = max(abs(hi - j / susceptibility(beta, lo)),
               abs(lo - j / susceptibility(beta, hi)))
    gain_bound = beta / math.cosh(beta * zeta) ** 2
    if gain_bound >= 1.0:
        raise RegimeError(
            "sufficient gain bound >= 1: enlarge delta_prime or move the "
            "boundary data away from the spinodal")
    u_bar = 1.0 / (1.0 - gain_bound)

    a = beta * j / (1.0 - susceptibility(beta, params.mu_plus))
    b = gain_bound
    c = max(a, b)
    if c > 0.0:
        eps_inner_max = min(1.0 / (2.0 * u_bar ** 2 * c ** 2),
                            (params.delta - dp) / (2.0 * u_bar * c))
    else:
        eps_inner_max = math.inf

    alpha_floor = 8.0 * j * u_bar / (dp * (2.0 - dp))
    alpha = 1.05 * alpha_floor if alpha_floor > 0.0 else 1.0

    first = math.log((1.0 + gain_bound) / gain_bound) / alpha
    second = math.inf if 2.0 * alpha > 700.0 else \
        0.5 * math.exp(2.0 * alpha) * eps_inner_max
    eps_outer_max = min(first, second)

    return TheoryConstants(
        m_star=m_star, field_bound=zeta, gain_bound=gain_bound,
        resolvent_bound=u_bar, first_step_scale=a, slope_bound=b,
        newton_scale=c, eps_inner_max=eps_inner_max, alpha=alpha,
        eps_outer_max=eps_outer_max)


def _profile_equation(beta, mu_minus, m):
    """Antiderivative expression whose level sets give the limit profile."""
    return ((1.0 - beta) * (mu_minus - m)
            + (beta / 3.0) * (mu_minus ** 3 - m ** 3))


def solve_macroscopic(params, grid):
    """Diffusive limit profile: inverts the strictly monotone cubic level
    equation at every node by safeguarded Newton iteration."""
    beta = params.beta
    mu_m, mu_p = params.mu_minus, params.mu_plus
    if mu_m == mu_p:
        return Field.full(grid, mu_m)
    j = current(beta, mu_m, mu_p)
    targets = j * params.epsilon * grid.x

    lo_b, hi_b = min(mu_m, mu_p), max(mu_m, mu_p)
    g_at_lo = _profile_equation(beta, mu_m, lo_b)
    g_at_hi = _profile_equation(beta, mu_m, hi_b)
    top, bot = max(g_at_lo, g_at_hi), min(g_at_lo, g_at_hi)
    # the exact roots at the endpoints sit on the bracket edge; allow the
    # few-ulp rounding of j*eps*x before declaring the data inconsistent
    slack = 1e-12 * max(1.0, abs(top), abs(bot))
    if np.any(targets > top + slack) or np.any(targets < bot - slack):
        raise BracketError("inconsistent current/boundary data: profile "
                           "values not bracketed by the boundary pair")
    targets = np.clip(targets, bot, top)

    # G decreases in m, so G - target changes sign from hi to lo
    lo = np.full(grid.n_nodes, lo_b)
    hi = np.full(grid.n_nodes, hi_b)
    m = mu_m + (mu_p - mu_m) * params.epsilon * grid.x  # affine initial guess
    for _ in range(200):
        g = _profile_equation(beta, mu_m, m) - targets
        done = np.abs(g) < 1e-15
        if np.all(done):
            break
        # maintain the bracket: G - target is positive below the root
        above = g > 0.0
        lo = np.where(above, np.maximum(lo, m), lo)
        hi = np.where(~above, np.minimum(hi, m), hi)
        dg = -(1.0 - susceptibility(beta, m))
        step = np.where(done, 0.0, g / dg)
        m_new = m - step
        outside = (m_new < lo) | (m_new > hi)
        m_new = np.where(outside, 0.5 * (lo + hi), m_new)
        if np.max(np.abs(m_new - m)) < 1e-15:
            m = m_new
            break
        m = m_new
    return Field(m, grid)


def auxiliary_field(params, grid, m, j):
    """Auxiliary magnetic field by cumulative trapezoid quadrature of the
    inverse susceptibility along the profile."""
    chi = susceptibility(params.beta, m.values)
    if np.any(chi <= 0.0):
        raise RegimeError("profile left the admissible window: "
                          "susceptibility vanished")
    integrand = 1.0 / chi
    steps = 0.5 * grid.spacing * (integrand[1:] + integrand[:-1])
    integral = np.concatenate(([0.0], np.cumsum(steps)))
    h0 = h_tilde(params.beta, params.mu_minus)
    return Field(h0 - j * params.epsilon * integral, grid)


def boundary_derivatives_m0(params, grid, m0):
    """Analytic sensitivities of the limit profile to the two boundary
    magnetizations (attenuation ratios of the non-degenerate cubic)."""
    beta = params.beta
    denom = 1.0 - susceptibility(beta, m0.values)
    ex = params.epsilon * grid.x
    d_minus = (1.0 - susceptibility(beta, params.mu_minus)) / denom * (1.0 - ex)
    d_plus = (1.0 - susceptibility(beta, params.mu_plus)) / denom * ex
    return Field(d_minus, grid), Field(d_plus, grid)


def free_energy(params, grid, m, boundary, kernel=None):
    """Trapezoidal evaluation of the nonlocal free energy with the
    exterior interaction carried by the boundary masses."""
    v = m.values
    if np.any(np.abs(v) >= 1.0):
        raise DomainError("free energy requires |m| < 1 on all nodes")
    if kernel is None:
        kernel = build_kernel(grid)
    h = grid.spacing
    tw = np.full(grid.n_nodes, h)
    tw[0] = tw[-1] = 0.5 * h

    bulk = np.sum(tw * free_energy_density(params.beta, v))

    diff_sq = (v[:, None] - v[None, :]) ** 2
    cols = np.arange(grid.n_nodes)[None, :] \
        - np.arange(grid.n_nodes)[:, None] + kernel.half_bandwidth
    inband = (cols >= 0) & (cols < kernel.band.shape[1])
    w = np.zeros_like(diff_sq)
    w[inband] = kernel.band[np.nonzero(inband)[0], cols[inband]]
    interaction = -0.5 * np.sum(tw[:, None] * w * diff_sq)

    b_left, b_right = boundary
    cross = 0.5 * np.sum(tw * (kernel.a_minus.values * (v - b_left) ** 2
                               + kernel.a_plus.values * (v - b_right) ** 2))
    return float(bulk + interaction + cross)
