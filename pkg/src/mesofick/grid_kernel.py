"""Uniform grid on [0, 1/epsilon], field storage, and the nonlocal
convolution with the unit tent kernel including its boundary delta masses.

The kernel is a probability kernel: for every node, the banded quadrature
row plus the two boundary masses sums to one.  Rows are trapezoid weights
of the tent restricted to the domain, rescaled per row so that the unit
mass holds to machine precision; constants are then reproduced exactly and
affine functions are reproduced on the bulk (the weights are symmetric
about the diagonal there).
"""

from dataclasses import dataclass, field

import numpy as np

from . import backend
from .errors import DomainError, GridMismatchError

MIN_NODES_PER_UNIT = 8


@dataclass(frozen=True)
class Grid:
    """Uniform nodes on [0, 1/epsilon] with the last node exactly at the
    right endpoint; spacing is 1/nodes_per_unit up to rounding."""

    epsilon: float
    nodes_per_unit: int = 20

    def __post_init__(self):
        if not 0.0 < self.epsilon:
            raise DomainError("epsilon must be positive")
        if 1.0 / self.epsilon < 2.0:
            raise DomainError(
                "domain shorter than 2 interaction ranges: the boundary "
                "masses would overlap (need 1/epsilon >= 2)")
        if self.nodes_per_unit < MIN_NODES_PER_UNIT:
            raise DomainError(
                f"nodes_per_unit must be >= {MIN_NODES_PER_UNIT} to resolve "
                "the kernel band")

    @property
    def length(self):
        return 1.0 / self.epsilon

    @property
    def n_nodes(self):
        return int(round(self.length * self.nodes_per_unit)) + 1

    @property
    def spacing(self):
        return self.length / (self.n_nodes - 1)

    @property
    def x(self):
        x = np.linspace(0.0, self.length, self.n_nodes)
        x.flags.writeable = False
        return x


@dataclass
class Field:
    """Real values attached to the nodes of a grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise GridMismatchError(
                f"field has {self.values.shape} values for a grid of "
                f"{self.grid.n_nodes} nodes")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field contains non-finite values")

    @classmethod
    def full(cls, grid, value):
        return cls(np.full(grid.n_nodes, float(value)), grid)

    def copy(self):
        return Field(self.values.copy(), self.grid)


def tent_kernel(x, y):
    """Unit tent: 1 - |y - x| on |y - x| <= 1, zero outside."""
    return np.maximum(0.0, 1.0 - np.abs(np.asarray(y, dtype=float) - x))


def boundary_weights(grid):
    """Closed-form masses carried by the exterior delta terms.

    Left mass: (1 - x)^2 / 2 for x in [0, 1], zero beyond; right mass is
    the mirror image at the right endpoint.
    """
    x = grid.x
    a_minus = np.where(x < 1.0, 0.5 * (1.0 - x) ** 2, 0.0)
    d = grid.length - x
    a_plus = np.where(d < 1.0, 0.5 * (1.0 - d) ** 2, 0.0)
    return Field(a_minus, grid), Field(a_plus, grid)


@dataclass
class KernelWeights:
    """Banded quadrature rows for the tent convolution plus the two
    boundary mass fields.  Immutable after construction."""

    grid: Grid
    band: np.ndarray = field(repr=False)
    a_minus: Field = field(repr=False)
    a_plus: Field = field(repr=False)

    @property
    def half_bandwidth(self):
        return (self.band.shape[1] - 1) // 2

    def row_mass(self):
        """Row sums including boundary masses; all equal 1 by construction."""
        return self.band.sum(axis=1) + self.a_minus.values + self.a_plus.values

    def apply(self, values, f_left, f_right):
        """Convolution on raw arrays; hot path used by the solvers."""
        return backend.band_convolve(self.band, self.a_minus.values,
                                     self.a_plus.values, values,
                                     float(f_left), float(f_right))


def build_kernel(grid):
    """Assemble the banded trapezoid quadrature of the tent kernel.

    Each row i holds spacing-weighted tent values at the nodes within one
    interaction range of node i, with half weights at the domain endpoints;
    the row (boundary masses included) is then rescaled by its mass so
    normalization is exact.
    """
    n = grid.n_nodes
    h = grid.spacing
    half = grid.nodes_per_unit
    bw = 2 * half + 1
    x = grid.x

    offsets = np.arange(-half, half + 1)
    # tent sampled at uniform offsets; identical for every row
    tent_row = np.maximum(0.0, 1.0 - np.abs(offsets) * h)
    band = np.tile(tent_row * h, (n, 1))

    rows = np.arange(n)[:, None]
    cols = rows + offsets[None, :]
    inside = (cols >= 0) & (cols <= n - 1)
    band[~inside] = 0.0
    # trapezoid half-weights where the band reaches the domain endpoints
    band[cols == 0] *= 0.5
    band[cols == n - 1] *= 0.5

    a_minus, a_plus = boundary_weights(grid)
    mass = band.sum(axis=1) + a_minus.values + a_plus.values
    band /= mass[:, None]
    am = Field(a_minus.values / mass, grid)
    ap = Field(a_plus.values / mass, grid)

    band.flags.writeable = False
    am.values.flags.writeable = False
    ap.values.flags.writeable = False
    return KernelWeights(grid=grid, band=band, a_minus=am, a_plus=ap)


def convolve(kernel, f, f_left, f_right):
    """Nonlocal average of f, the delta masses acting on the prescribed
    exterior values ``f_left`` and ``f_right``."""
    if f.grid != kernel.grid:
        raise GridMismatchError("field and kernel built on incompatible "
                                "discretizations")
    return Field(kernel.apply(f.values, f_left, f_right), kernel.grid)
