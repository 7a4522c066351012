"""Orthogonally invariant features of a pair of scalar fields.

For fields (psi1, psi2) on any supported chart the feature batch holds, per
grid point, the seven columns

    psi1, <d psi1, d psi1>, lap psi1, psi2, <d psi2, d psi2>, lap psi2,
    <d psi1, d psi2>

where lap is the Laplace-Beltrami operator |g|^(-1/2) d_mu(|g|^(1/2) g^(mu mu) d_mu .)
and <.,.> the metric inner product of gradients.  These are the only spatial
quantities the learned operator ever sees, which is what makes one model
usable across charts, dimensions, and curvatures.

The Laplacian is evaluated in split form: the derivative-of-coefficient part
is analytic per chart, only the field derivatives are numerical:

    lap psi = sum_axis  c1_axis * d1(psi) + c2_axis * d2(psi)

with c2_axis = g^(axis axis) and c1_axis = |g|^(-1/2) d_axis(|g|^(1/2) g^(axis axis)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    WARPED_KINDS,
    ChartError,
    warp_derivative,
    warp_second_derivative,
)
from .grid import GridSpec, ScalarField, d1_nd, d2_nd

FEATURE_NAMES = ("psi1", "inner11", "lap1", "psi2", "inner22", "lap2", "inner12")


def operator_coefficients(grid: GridSpec):
    """Per-axis (c1, c2, g_inv) arrays, broadcastable to the grid shape.

    c1/c2 are the split-form Laplacian coefficients, g_inv the inverse metric
    diagonal used by gradient inner products (c2 == g_inv for all charts here).
    """
    chart = grid.chart
    mesh = grid.coord_mesh()
    out = []
    if chart.kind in ("cartesian1d", "cartesian2d", "cartesian3d"):
        for _ in range(chart.dim):
            out.append((0.0, 1.0, 1.0))
    elif chart.kind in WARPED_KINDS:
        for ax in range(chart.dim):
            fp = warp_derivative(mesh[ax], chart.lam)
            fpp = warp_second_derivative(mesh[ax], chart.lam)
            inv = 1.0 / fp**2
            out.append((-fpp / fp**3, inv, inv))
    elif chart.kind == "sphere_geographic":
        theta = mesh[0]
        r2 = chart.radius**2
        sin2 = np.sin(theta) ** 2
        out.append((np.cos(theta) / (np.sin(theta) * r2), 1.0 / r2, 1.0 / r2))
        out.append((0.0, 1.0 / (r2 * sin2), 1.0 / (r2 * sin2)))
    elif chart.kind == "sphere_stereographic":
        rho = mesh[0]
        r = chart.radius
        conf = (r**2 + rho**2) ** 2 / (4.0 * r**4)
        out.append((conf / rho, conf, conf))
        out.append((0.0, conf / rho**2, conf / rho**2))
    else:
        raise ChartError(f"unsupported chart kind {chart.kind!r}")
    return out


def laplace_beltrami(f: ScalarField) -> ScalarField:
    coeffs = operator_coefficients(f.grid)
    v = f.nd
    out = np.zeros_like(v)
    for ax, (c1, c2, _) in enumerate(coeffs):
        out += c1 * d1_nd(v, f.grid, ax) + c2 * d2_nd(v, f.grid, ax)
    return ScalarField(f.grid, out.reshape(-1))


def inner_product(f1: ScalarField, f2: ScalarField) -> ScalarField:
    if f1.grid != f2.grid:
        raise ChartError("inner_product: fields live on different grids")
    coeffs = operator_coefficients(f1.grid)
    v1, v2 = f1.nd, f2.nd
    out = np.zeros_like(v1)
    for ax, (_, _, ginv) in enumerate(coeffs):
        # gradients multiplied first so the result is bitwise symmetric in
        # (f1, f2)
        out += ginv * (d1_nd(v1, f1.grid, ax) * d1_nd(v2, f1.grid, ax))
    return ScalarField(f1.grid, out.reshape(-1))


@dataclass
class FeatureBatch:
    """The seven invariant feature columns over a grid.

    columns has shape (7, npoints) in FEATURE_NAMES order.  With N input
    fields the general count is N(N+5)/2; everything here is fixed at N = 2.
    """

    grid: GridSpec
    columns: np.ndarray = field(repr=False)

    def column(self, name: str) -> np.ndarray:
        return self.columns[FEATURE_NAMES.index(name)]

    def rows(self) -> np.ndarray:
        """(npoints, 7) row-major matrix, the model input layout."""
        return np.ascontiguousarray(self.columns.T)


def build_features(psi1: ScalarField, psi2: ScalarField) -> FeatureBatch:
    if psi1.grid != psi2.grid:
        raise ChartError("build_features: fields live on different grids")
    grid = psi1.grid
    coeffs = operator_coefficients(grid)
    v1, v2 = psi1.nd, psi2.nd

    g1 = [d1_nd(v1, grid, ax) for ax in range(grid.chart.dim)]
    g2 = [d1_nd(v2, grid, ax) for ax in range(grid.chart.dim)]

    lap1 = np.zeros_like(v1)
    lap2 = np.zeros_like(v2)
    in11 = np.zeros_like(v1)
    in22 = np.zeros_like(v1)
    in12 = np.zeros_like(v1)
    for ax, (c1, c2, ginv) in enumerate(coeffs):
        lap1 += c1 * g1[ax] + c2 * d2_nd(v1, grid, ax)
        lap2 += c1 * g2[ax] + c2 * d2_nd(v2, grid, ax)
        in11 += ginv * (g1[ax] * g1[ax])
        in22 += ginv * (g2[ax] * g2[ax])
        in12 += ginv * (g1[ax] * g2[ax])

    cols = np.stack([
        v1.reshape(-1), in11.reshape(-1), lap1.reshape(-1),
        v2.reshape(-1), in22.reshape(-1), lap2.reshape(-1),
        in12.reshape(-1),
    ])
    return FeatureBatch(grid, cols)
