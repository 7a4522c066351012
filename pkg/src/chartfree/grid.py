"""Uniform grids on charts, boundary ghost rules, and central difference stencils.

Boundary conditions per axis:

    periodic   one ghost cell wraps around: index -1 -> n-1, index n -> 0.
               Grid points cover [lo, hi) with n * spacing spanning the
               interval; the point at hi is identified with the one at lo.
    neumann    one ghost cell copies the wall value: index -1 -> 0,
               index n -> n-1.  Grid points include both endpoints,
               (n - 1) * spacing spans the interval.

Fields are stored flat in row-major order with axis 0 slowest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Chart

BC_KINDS = ("periodic", "neumann")

_PAD_MODE = {"periodic": "wrap", "neumann": "edge"}


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    chart: Chart
    n: tuple[int, ...]
    spacing: tuple[float, ...]
    bc: tuple[str, ...]

    def __post_init__(self):
        d = self.chart.dim
        if not (len(self.n) == len(self.spacing) == len(self.bc) == d):
            raise GridError("n, spacing, bc must all have one entry per axis")
        for ax in range(d):
            if self.n[ax] < 4:
                raise GridError(f"axis {ax}: need at least 4 points for the stencils")
            if self.bc[ax] not in BC_KINDS:
                raise GridError(f"axis {ax}: unknown bc {self.bc[ax]!r}")
            lo, hi = self.chart.bounds[ax]
            span = hi - lo
            cells = self.n[ax] if self.bc[ax] == "periodic" else self.n[ax] - 1
            if not math.isclose(self.spacing[ax] * cells, span, rel_tol=1e-9):
                raise GridError(
                    f"axis {ax}: spacing {self.spacing[ax]} * {cells} does not span "
                    f"({lo}, {hi})"
                )

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def npoints(self) -> int:
        return int(np.prod(self.n))

    def axis_coords(self, axis: int) -> np.ndarray:
        lo, _ = self.chart.bounds[axis]
        return lo + self.spacing[axis] * np.arange(self.n[axis], dtype=np.float64)

    def coord_mesh(self) -> list[np.ndarray]:
        """Per-axis coordinate arrays broadcastable to the grid shape."""
        out = []
        for ax in range(self.chart.dim):
            c = self.axis_coords(ax)
            shape = [1] * self.chart.dim
            shape[ax] = self.n[ax]
            out.append(c.reshape(shape))
        return out


def make_grid(chart: Chart, n, bc) -> GridSpec:
    """Build a GridSpec deriving the spacing from the chart bounds."""
    n = tuple(int(v) for v in np.atleast_1d(n))
    bc = tuple(bc) if not isinstance(bc, str) else (bc,) * chart.dim
    spacing = []
    for ax in range(chart.dim):
        lo, hi = chart.bounds[ax]
        cells = n[ax] if bc[ax] == "periodic" else n[ax] - 1
        spacing.append((hi - lo) / cells)
    return GridSpec(chart, n, tuple(spacing), bc)


@dataclass
class ScalarField:
    """Grid-sampled scalar values, flat row-major, one per grid point."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.values.size != self.grid.npoints:
            raise GridError(
                f"field has {self.values.size} values, grid has {self.grid.npoints} points"
            )

    @property
    def nd(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy())


def ghost_index(grid: GridSpec, axis: int, index: int) -> int:
    """Resolve an index one step outside the axis to its in-domain source."""
    n = grid.n[axis]
    if 0 <= index < n:
        return index
    if grid.bc[axis] == "periodic":
        if index == -1:
            return n - 1
        if index == n:
            return 0
    else:
        if index == -1:
            return 0
        if index == n:
            return n - 1
    raise GridError(f"index {index} outside the one-ghost range for n={n}")


def _padded(values_nd: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    pad = [(0, 0)] * values_nd.ndim
    pad[axis] = (1, 1)
    return np.pad(values_nd, pad, mode=_PAD_MODE[grid.bc[axis]])


def _shifted(p: np.ndarray, axis: int, offset: int) -> np.ndarray:
    sl = [slice(None)] * p.ndim
    sl[axis] = slice(1 + offset, p.shape[axis] - 1 + offset)
    return p[tuple(sl)]


def d1_nd(values_nd: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    p = _padded(values_nd, grid, axis)
    return (_shifted(p, axis, 1) - _shifted(p, axis, -1)) / (2.0 * grid.spacing[axis])


def d2_nd(values_nd: np.ndarray, grid: GridSpec, axis: int) -> np.ndarray:
    p = _padded(values_nd, grid, axis)
    return (_shifted(p, axis, 1) - 2.0 * _shifted(p, axis, 0) + _shifted(p, axis, -1)) / (
        grid.spacing[axis] ** 2
    )


def d1(field: ScalarField, axis: int) -> ScalarField:
    """Central first difference (M(+D) - M(-D)) / (2 D) with ghost cells at the edges."""
    return ScalarField(field.grid, d1_nd(field.nd, field.grid, axis).reshape(-1))


def d2(field: ScalarField, axis: int) -> ScalarField:
    """Central second difference (M(+D) - 2 M + M(-D)) / D^2 with ghost cells."""
    return ScalarField(field.grid, d2_nd(field.nd, field.grid, axis).reshape(-1))
