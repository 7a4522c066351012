"""Coordinate charts, analytic metrics, warp maps, and the sphere embedding.

Every chart in scope has a diagonal metric, so metric data is carried as
per-axis arrays rather than full tensors.  Supported chart kinds:

    cartesian1d / cartesian2d / cartesian3d   flat, identity metric
    warped1d / warped2d                       flat, coordinate y with
                                              x = f(y) = (y/2)(1 + (y/lam)^2)
                                              applied per axis
    sphere_geographic                         (theta, phi) on a radius-R sphere,
                                              ds^2 = R^2 (dtheta^2 + sin^2 theta dphi^2)
    sphere_stereographic                      (rho, phi) polar stereographic
                                              projection from the pole,
                                              ds^2 = [4R^4/(R^2+rho^2)^2] (drho^2 + rho^2 dphi^2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CHART_DIMS = {
    "cartesian1d": 1,
    "warped1d": 1,
    "cartesian2d": 2,
    "warped2d": 2,
    "cartesian3d": 3,
    "sphere_geographic": 2,
    "sphere_stereographic": 2,
}

WARPED_KINDS = ("warped1d", "warped2d")
SPHERE_KINDS = ("sphere_geographic", "sphere_stereographic")


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    """A coordinate system with per-axis bounds and warp/curvature parameters.

    lam is the warp length scale (warped kinds only); radius is the sphere
    radius (sphere kinds only).  bounds are closed coordinate intervals,
    one (lo, hi) pair per axis.
    """

    kind: str
    bounds: tuple[tuple[float, float], ...]
    lam: float | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind not in CHART_DIMS:
            raise ChartError(f"unknown chart kind {self.kind!r}")
        if len(self.bounds) != self.dim:
            raise ChartError(
                f"{self.kind} needs {self.dim} bound pairs, got {len(self.bounds)}"
            )
        for lo, hi in self.bounds:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ChartError(f"bad bound interval ({lo}, {hi})")
        if self.kind in WARPED_KINDS:
            if self.lam is None or self.lam <= 0:
                raise ChartError("warped charts need lam > 0")
        if self.kind in SPHERE_KINDS:
            if self.radius is None or self.radius <= 0:
                raise ChartError("sphere charts need radius > 0")
        if self.kind == "sphere_geographic":
            lo, hi = self.bounds[0]
            if not (0.0 < lo and hi < math.pi):
                raise ChartError("theta bounds must lie strictly inside (0, pi)")
        if self.kind == "sphere_stereographic":
            lo, _ = self.bounds[0]
            if lo <= 0.0:
                raise ChartError("stereographic rho bounds must be strictly positive")

    @property
    def dim(self) -> int:
        return CHART_DIMS[self.kind]


@dataclass(frozen=True)
class MetricSample:
    """Diagonal metric at one point: covariant components, their inverses,
    and sqrt(det g)."""

    g_diag: tuple[float, ...]
    g_inv_diag: tuple[float, ...]
    sqrt_det_g: float


def warp_forward(y, lam: float):
    """Physical coordinate x of warped coordinate y: x = (y/2)(1 + (y/lam)^2)."""
    y = np.asarray(y, dtype=np.float64)
    return (y / 2.0) * (1.0 + (y / lam) ** 2)


def warp_inverse(x, lam: float):
    """Inverse of warp_forward via the closed-form real root of y^3 + lam^2 y = 2 lam^2 x.

    Evaluated on |x| and reflected through the map's odd symmetry, which keeps
    the cube-root argument away from the cancellation-prone negative branch.
    """
    x = np.asarray(x, dtype=np.float64)
    w = 2.0 * np.abs(x) / lam
    arg = np.sqrt(3.0) * np.sqrt(27.0 * w**2 + 4.0) + 9.0 * w
    # arg >= 2 sqrt(3) for w >= 0; anything else means the caller fed a
    # non-real input through.
    if np.any(arg <= 0.0) or not np.all(np.isfinite(arg)):
        raise ChartError("warp_inverse: cube-root argument out of branch")
    theta = np.cbrt(arg)
    y = lam * (theta / (2.0 ** (1.0 / 3.0) * 3.0 ** (2.0 / 3.0))
               - (2.0 / 3.0) ** (1.0 / 3.0) / theta)
    return np.copysign(y, x)


def warp_derivative(y, lam: float):
    """dx/dy = 1/2 + 3 y^2 / (2 lam^2); strictly positive."""
    y = np.asarray(y, dtype=np.float64)
    return 0.5 + 1.5 * (y / lam) ** 2


def warp_second_derivative(y, lam: float):
    """d2x/dy2 = 3 y / lam^2."""
    y = np.asarray(y, dtype=np.float64)
    return 3.0 * y / lam**2


def metric_diag(chart: Chart, coords) -> list[np.ndarray]:
    """Covariant diagonal metric components at coords.

    coords is a sequence of per-axis coordinate arrays (broadcastable against
    each other).  Returns one array per axis.
    """
    coords = [np.asarray(c, dtype=np.float64) for c in coords]
    if len(coords) != chart.dim:
        raise ChartError(f"expected {chart.dim} coordinate arrays, got {len(coords)}")
    if chart.kind in ("cartesian1d", "cartesian2d", "cartesian3d"):
        return [np.ones_like(c) for c in coords]
    if chart.kind in WARPED_KINDS:
        return [warp_derivative(c, chart.lam) ** 2 for c in coords]
    if chart.kind == "sphere_geographic":
        theta = coords[0]
        r2 = chart.radius**2
        return [np.full_like(theta, r2), r2 * np.sin(theta) ** 2]
    if chart.kind == "sphere_stereographic":
        rho = coords[0]
        r = chart.radius
        conf = 4.0 * r**4 / (r**2 + rho**2) ** 2
        return [conf, conf * rho**2]
    raise ChartError(f"unsupported chart kind {chart.kind!r}")


def metric_at(chart: Chart, point) -> MetricSample:
    """Pointwise metric sample; point must lie within the chart bounds."""
    point = tuple(float(p) for p in np.atleast_1d(point))
    if len(point) != chart.dim:
        raise ChartError(f"point has {len(point)} coords, chart is {chart.dim}d")
    for p, (lo, hi) in zip(point, chart.bounds):
        if not (lo <= p <= hi):
            raise ChartError(f"coordinate {p} outside bounds ({lo}, {hi})")
    g = [float(gi) for gi in metric_diag(chart, [np.float64(p) for p in point])]
    g_inv = [1.0 / gi for gi in g]
    sqrt_det = math.sqrt(math.prod(g))
    return MetricSample(tuple(g), tuple(g_inv), sqrt_det)


def geo_to_stereo(theta, radius: float):
    """Polar angle to stereographic radius: rho = R tan(theta/2)."""
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(theta <= 0.0) or np.any(theta >= math.pi):
        raise ChartError("theta must lie strictly inside (0, pi)")
    return radius * np.tan(theta / 2.0)


def stereo_to_geo(rho, radius: float):
    """Exact inverse of geo_to_stereo: theta = 2 atan(rho/R)."""
    rho = np.asarray(rho, dtype=np.float64)
    if np.any(rho <= 0.0):
        raise ChartError("rho must be strictly positive")
    return 2.0 * np.arctan(rho / radius)


def geo_stereo_map(point, direction: str, radius: float):
    """Map (polar, azimuth) between geographic and stereographic charts.

    direction is "geo_to_stereo" or "stereo_to_geo"; the azimuthal angle is
    shared by both charts.
    """
    a, phi = point
    if direction == "geo_to_stereo":
        return (geo_to_stereo(a, radius), phi)
    if direction == "stereo_to_geo":
        return (stereo_to_geo(a, radius), phi)
    raise ChartError(f"unknown direction {direction!r}")


def embed_sphere(theta, phi, radius: float):
    """Ambient Cartesian position: (R sin(theta) sin(phi), R sin(theta) cos(phi), R cos(theta))."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    s = np.sin(theta)
    return (radius * s * np.sin(phi), radius * s * np.cos(phi), radius * np.cos(theta))
