"""Forward-Euler time stepping, trajectory recording, cross-chart resampling,
and mean-square-error comparison.

A right-hand side is either the exact reference formula of a named system or
a trained network; both are evaluated through the invariant feature batch, so
the integrator itself never touches coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import models
from .features import FeatureBatch, build_features
from .geometry import (
    SPHERE_KINDS,
    WARPED_KINDS,
    ChartError,
    geo_to_stereo,
    stereo_to_geo,
    warp_forward,
    warp_inverse,
)
from .grid import GridSpec, ScalarField
from .learn import Mlp, forward


class EngineError(RuntimeError):
    pass


class StepRejected(EngineError):
    def __init__(self, max_rhs: float, location: int, step: int | None = None):
        where = f" at step {step}" if step is not None else ""
        super().__init__(
            f"non-finite state{where}; max |rhs| {max_rhs:g} at flat index {location}"
        )
        self.max_rhs = max_rhs
        self.location = location
        self.step = step


@dataclass
class ReferenceRhs:
    """Exact right-hand side of a named system, evaluated on raw fields."""

    system: str
    params: object = None

    def __post_init__(self):
        if self.params is None:
            self.params = models.default_params(self.system)

    def evaluate(self, batch: FeatureBatch):
        return models.reference_rhs_values(self.system, batch, self.params)


@dataclass
class LearnedRhs:
    """Trained network as the right-hand side.

    normalization records the per-field scale the training data was divided
    by; the model must be driven with fields in those normalized units.
    """

    model: Mlp
    normalization: tuple[float, float] = (1.0, 1.0)

    def evaluate(self, batch: FeatureBatch):
        out = forward(self.model, batch.rows())
        return out[:, 0], out[:, 1]


@dataclass
class Trajectory:
    """Time-ordered snapshots of the field pair on one grid."""

    grid: GridSpec
    times: np.ndarray
    states: np.ndarray = field(repr=False)  # (n_times, 2, npoints)
    source: str = "reference"  # or "learned"
    system: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        if np.any(np.diff(self.times) <= 0):
            raise EngineError("times must be strictly increasing")
        if self.states.shape != (len(self.times), 2, self.grid.npoints):
            raise EngineError("states shape does not match times/grid")

    def snapshot(self, k: int) -> tuple[ScalarField, ScalarField]:
        return (ScalarField(self.grid, self.states[k, 0].copy()),
                ScalarField(self.grid, self.states[k, 1].copy()))

    def index_of(self, t: float) -> int:
        hits = np.nonzero(np.isclose(self.times, t, rtol=1e-9, atol=1e-9))[0]
        if len(hits) == 0:
            raise EngineError(f"time {t} not recorded in trajectory")
        return int(hits[0])

    def scaled(self, factors: tuple[float, float]) -> "Trajectory":
        """New trajectory with each field divided by its factor."""
        out = self.states / np.asarray(factors, dtype=np.float64).reshape(1, 2, 1)
        return Trajectory(self.grid, self.times.copy(), out, self.source, self.system)


def euler_step(state, rhs, dt: float):
    """One forward-Euler step: state + dt * rhs(features(state))."""
    f1, f2 = state
    batch = build_features(f1, f2)
    r1, r2 = rhs.evaluate(batch)
    n1 = f1.values + dt * np.asarray(r1).reshape(-1)
    n2 = f2.values + dt * np.asarray(r2).reshape(-1)
    if not (np.all(np.isfinite(n1)) and np.all(np.isfinite(n2))):
        mag = np.abs(np.stack([r1, r2]))
        mag = np.where(np.isfinite(mag), mag, np.inf)
        loc = int(np.argmax(mag) % f1.values.size)
        raise StepRejected(float(mag.max()), loc)
    return ScalarField(f1.grid, n1), ScalarField(f2.grid, n2)


def rollout(ic, rhs, dt: float, t_final: float, snapshot_stride: int = 1,
            source: str = "reference", system: str = "") -> Trajectory:
    """Integrate from ic to t_final, recording every snapshot_stride-th step."""
    if dt <= 0 or t_final < dt or snapshot_stride < 1:
        raise EngineError("need dt > 0, t_final >= dt, stride >= 1")
    n_steps = int(round(t_final / dt))
    f1, f2 = ic
    times = [0.0]
    states = [np.stack([f1.values.copy(), f2.values.copy()])]
    for step in range(1, n_steps + 1):
        try:
            f1, f2 = euler_step((f1, f2), rhs, dt)
        except StepRejected as e:
            raise StepRejected(e.max_rhs, e.location, step) from None
        if step % snapshot_stride == 0:
            times.append(step * dt)
            states.append(np.stack([f1.values.copy(), f2.values.copy()]))
    return Trajectory(f1.grid, np.array(times), np.stack(states), source, system)


def _axis_physical(chart, axis: int, coords):
    """Physical position along one axis (flat charts: Cartesian x; spheres:
    geographic angles)."""
    if chart.kind in WARPED_KINDS:
        return warp_forward(coords, chart.lam)
    if chart.kind == "sphere_stereographic" and axis == 0:
        return 2.0 * np.arctan(np.asarray(coords) / chart.radius)
    return np.asarray(coords, dtype=np.float64)


def _to_physical(grid: GridSpec, mesh):
    return [_axis_physical(grid.chart, ax, m) for ax, m in enumerate(mesh)]


def _from_physical(chart, phys):
    if chart.kind in WARPED_KINDS:
        return [warp_inverse(p, chart.lam) for p in phys]
    if chart.kind == "sphere_stereographic":
        return [geo_to_stereo(phys[0], chart.radius), phys[1]]
    return list(phys)


def _compatible(src, dst):
    flat = ("cartesian1d", "warped1d", "cartesian2d", "warped2d", "cartesian3d")
    if src.kind in flat and dst.kind in flat:
        return src.dim == dst.dim
    if src.kind in SPHERE_KINDS and dst.kind in SPHERE_KINDS:
        return src.radius == dst.radius
    return False


def resample(src: ScalarField, dst: GridSpec) -> ScalarField:
    """Field values at dst grid points via analytic chart maps plus
    piecewise-multilinear interpolation on the source grid.

    Cell weights are taken in physical coordinates, so the transfer is exact
    for fields linear in physical position even when the source grid is
    nonuniform there (warped and stereographic charts).  Periodic source axes
    wrap; Neumann axes clamp to the wall value.  A destination point falling
    outside the source grid by more than one cell on a non-periodic axis is
    an error.
    """
    if src.grid == dst:
        return ScalarField(dst, src.values.copy())
    if not _compatible(src.grid.chart, dst.chart):
        raise ChartError(
            f"cannot resample between {src.grid.chart.kind} and {dst.chart.kind}"
        )
    sgrid = src.grid
    dim = sgrid.chart.dim

    dst_mesh = [np.broadcast_to(m, dst.shape).reshape(-1) for m in dst.coord_mesh()]
    src_coords = _from_physical(sgrid.chart, _to_physical(dst, dst_mesh))

    lo_idx, fracs = [], []
    for ax in range(dim):
        origin = sgrid.chart.bounds[ax][0]
        step = sgrid.spacing[ax]
        pos = (src_coords[ax] - origin) / step
        n = sgrid.n[ax]
        if sgrid.bc[ax] == "periodic":
            pos = np.mod(pos, n)
            i0 = np.minimum(np.floor(pos).astype(np.int64), n - 1)
        else:
            if np.any(pos < -1.0 - 1e-9) or np.any(pos > n + 1e-9):
                raise EngineError(
                    f"destination point outside source grid on axis {ax}"
                )
            pos = np.clip(pos, 0.0, n - 1.0)
            i0 = np.minimum(np.floor(pos).astype(np.int64), n - 2)
        # weights in physical position; identical to pos - i0 on charts that
        # are uniform in physical coordinates
        p_here = _axis_physical(sgrid.chart, ax, origin + pos * step)
        p_lo = _axis_physical(sgrid.chart, ax, origin + i0 * step)
        p_hi = _axis_physical(sgrid.chart, ax, origin + (i0 + 1) * step)
        frac = np.clip((p_here - p_lo) / (p_hi - p_lo), 0.0, 1.0)
        lo_idx.append(i0)
        fracs.append(frac)

    values = src.nd
    out = np.zeros(dst.npoints)
    for corner in range(2**dim):
        weight = np.ones(dst.npoints)
        idx = []
        for ax in range(dim):
            hi = (corner >> ax) & 1
            if hi:
                step = lo_idx[ax] + 1
                if sgrid.bc[ax] == "periodic":
                    step = np.mod(step, sgrid.n[ax])
                idx.append(step)
                weight = weight * fracs[ax]
            else:
                idx.append(lo_idx[ax])
                weight = weight * (1.0 - fracs[ax])
        out += weight * values[tuple(idx)]
    return ScalarField(dst, out)


@dataclass
class MseRecord:
    field: str
    time: float
    mse: float
    max_abs_dev: float


def mse_compare(true_traj: Trajectory, learned_traj: Trajectory, at_times,
                field_names=("psi1", "psi2")) -> list[MseRecord]:
    """Resample learned snapshots onto the true grid and report per-field,
    per-time mean squared deviation plus the maximum absolute deviation."""
    records = []
    for t in at_times:
        ti = true_traj.index_of(t)
        li = learned_traj.index_of(t)
        for f in range(2):
            ref = true_traj.states[ti, f]
            moved = resample(
                ScalarField(learned_traj.grid, learned_traj.states[li, f]),
                true_traj.grid,
            ).values
            dev = moved - ref
            records.append(MseRecord(field_names[f], float(t),
                                     float(np.mean(dev**2)),
                                     float(np.max(np.abs(dev)))))
    return records
