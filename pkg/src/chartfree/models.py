"""Reference right-hand sides, their parameters, and initial-condition scenarios.

All three reaction-diffusion systems (plus the heat sanity model) consume only
the invariant feature columns, never grid coordinates.  That restriction is
what lets the same right-hand side, learned or exact, run unchanged on every
chart.

The chemotaxis system is the only one whose spatial operator is not a bare
Laplacian.  Its drift divergence div(c(B) grad Phi(A)) expands by the chain
rule into feature columns:

    c'(B) Phi'(A) <dA,dB> + c(B) [Phi''(A) <dA,dA> + Phi'(A) lap A]

with c(B) = chi0 B / (1 + B/B_h), Phi(A) = ln(1 + A/K_i).  The expansion is
validated against a direct split-product discretization in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Chart, geo_to_stereo
from .grid import GridSpec, ScalarField, make_grid
from .features import FeatureBatch


class ModelError(ValueError):
    pass


class UnphysicalStateError(ModelError):
    pass


@dataclass(frozen=True)
class FhnParams:
    eps: float = 0.02
    beta: float = 0.0
    gamma: float = 0.5


@dataclass(frozen=True)
class BarkleyParams:
    eps: float = 0.02
    a: float = 0.75
    b: float = 0.02

    def __post_init__(self):
        if self.a == 0:
            raise ModelError("Barkley parameter a must be nonzero")


@dataclass(frozen=True)
class PksParams:
    alpha: float = 1.5e-4
    d_b: float = 0.55
    chi0: float = 4.8
    b_h: float = 1.3
    k_i: float = 0.27
    a_max: float = 30.0
    b_max: float = 1.0

    def __post_init__(self):
        if self.k_i <= 0 or self.b_h <= 0:
            raise ModelError("PKS parameters K_i and B_h must be positive")


def fhn_rhs(batch: FeatureBatch, p: FhnParams):
    """Excitable-medium pair: dtV = lap V + V - V^3/3 - W, dtW = eps (V + beta - gamma W)."""
    v = batch.column("psi1")
    w = batch.column("psi2")
    dtv = batch.column("lap1") + v - v**3 / 3.0 - w
    dtw = p.eps * (v + p.beta - p.gamma * w)
    return dtv, dtw


def barkley_rhs(batch: FeatureBatch, p: BarkleyParams):
    """dtU = lap U + U(1-U)(U - (V+b)/a)/eps, dtV = U - V."""
    u = batch.column("psi1")
    v = batch.column("psi2")
    dtu = batch.column("lap1") + u * (1.0 - u) * (u - (v + p.b) / p.a) / p.eps
    dtv = u - v
    return dtu, dtv


def pks_rhs(batch: FeatureBatch, p: PksParams):
    """Chemoattractant A and bacterial density B in raw (unnormalized) units."""
    a = batch.column("psi1")
    b = batch.column("psi2")
    if np.any(a <= -p.k_i):
        raise UnphysicalStateError("chemoattractant below -K_i; log argument nonpositive")
    dta = batch.column("lap1") - (a / (1.0 + a)) * (b / (1.0 + b))
    c = p.chi0 * b / (1.0 + b / p.b_h)
    c_prime = p.chi0 / (1.0 + b / p.b_h) ** 2
    phi_p = 1.0 / (p.k_i + a)
    phi_pp = -1.0 / (p.k_i + a) ** 2
    drift = (c_prime * phi_p * batch.column("inner12")
             + c * (phi_pp * batch.column("inner11") + phi_p * batch.column("lap1")))
    dtb = p.alpha * b + p.d_b * batch.column("lap2") - drift
    return dta, dtb


def heat_rhs(batch: FeatureBatch):
    """Plain diffusion of the first field; conservation sanity model."""
    return batch.column("lap1")


@dataclass(frozen=True)
class GaussianSpec:
    """One localized bump: amplitude * exp(-sum_axis (c - center)^2 / (2 width)).

    width is the variance-like denominator half; it is not squared again.
    """

    amplitude: float
    center: tuple[float, ...]
    width: tuple[float, ...]

    def __post_init__(self):
        if len(self.center) != len(self.width):
            raise ModelError("center and width must have the same arity")
        if any(w <= 0 for w in self.width):
            raise ModelError("widths must be positive")


def gaussian_field(grid: GridSpec, specs, offset: float = 0.0, coords=None) -> ScalarField:
    """Sum of Gaussian bumps plus a uniform offset, evaluated per grid point.

    coords may override the evaluation coordinates (per-axis broadcastable
    arrays) when the bump parameters live in a different chart than the grid.
    """
    mesh = grid.coord_mesh() if coords is None else coords
    out = np.full(grid.shape, float(offset))
    for s in specs:
        if len(s.center) != grid.chart.dim:
            raise ModelError("gaussian arity does not match grid dimension")
        expo = np.zeros(grid.shape)
        for ax in range(grid.chart.dim):
            expo = expo + (mesh[ax] - s.center[ax]) ** 2 / (2.0 * s.width[ax])
        out = out + s.amplitude * np.exp(-expo)
    return ScalarField(grid, out.reshape(-1))


def _g(amplitude, center, width) -> GaussianSpec:
    center = tuple(np.atleast_1d(center).astype(float))
    width = tuple(np.atleast_1d(width).astype(float))
    return GaussianSpec(float(amplitude), center, width)


@dataclass(frozen=True)
class IcMember:
    """One initial condition of a scenario: bumps and offsets for both fields."""

    specs1: tuple[GaussianSpec, ...]
    offset1: float
    specs2: tuple[GaussianSpec, ...]
    offset2: float


@dataclass(frozen=True)
class Scenario:
    name: str
    system: str
    chart: Chart
    bc: tuple[str, ...]
    default_n: tuple[int, ...]
    members: tuple[IcMember, ...]
    # reference pre-evolution applied after sampling the bumps, used by the
    # spiral/scroll scenarios to reach a developed pattern before testing
    transient: tuple[float, float] | None = None  # (t_total, dt)
    stereo_coords: bool = False  # bump parameters given in (rho, phi)


def _pks_sweep(a0_fracs, b1_fracs, b2_fracs, a_max=30.0, b_max=1.0):
    members = []
    for a0 in a0_fracs:
        for b1 in b1_fracs:
            for b2 in b2_fracs:
                members.append(IcMember(
                    specs1=(),
                    offset1=a_max * a0,
                    specs2=(_g(b_max * b1, -50.0, 5.0), _g(b_max * b2, 50.0, 5.0)),
                    offset2=0.0,
                ))
    return tuple(members)


_FLAT_1D_200 = Chart("cartesian1d", ((-100.0, 100.0),))
_FLAT_1D_100 = Chart("cartesian1d", ((-50.0, 50.0),))
_THETA_MIN = 2.0 * math.atan(0.25)

SCENARIOS: dict[str, Scenario] = {}


def _register(s: Scenario):
    SCENARIOS[s.name] = s


_register(Scenario(
    name="fhn_train_1d", system="fhn", chart=_FLAT_1D_200,
    bc=("periodic",), default_n=(200,),
    members=(IcMember(
        specs1=(_g(2.0, 40.0, 10.0), _g(-2.0, -40.0, 10.0)), offset1=0.0,
        specs2=(_g(1.0, 0.0, 10.0),), offset2=0.0,
    ),),
))

_register(Scenario(
    name="barkley_train_1d", system="barkley", chart=_FLAT_1D_100,
    bc=("periodic",), default_n=(200,),
    members=(IcMember(
        specs1=(_g(0.9, 22.0, 4.0), _g(0.5, -8.0, 4.0), _g(0.8, -28.0, 2.0)),
        offset1=0.0,
        specs2=(_g(0.5, 0.0, 4.0), _g(0.9, 20.0, 2.0), _g(0.7, -24.0, 2.0)),
        offset2=0.0,
    ),),
))

_register(Scenario(
    name="pks_train_1d", system="pks", chart=_FLAT_1D_200,
    bc=("periodic",), default_n=(200,),
    members=_pks_sweep(
        (0.0, 0.25, 0.5, 0.75, 1.0),
        (1.0 / 3.0, 2.0 / 3.0, 1.0),
        (0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0),
    ),
))

# reduced sweep bracketing the test condition (A0 = 5/6 max, B1 = 0.7, B2 = 0.4)
_register(Scenario(
    name="pks_train_1d_desk", system="pks", chart=_FLAT_1D_200,
    bc=("periodic",), default_n=(200,),
    members=_pks_sweep(
        (0.5, 0.75, 1.0),
        (2.0 / 3.0, 1.0),
        (1.0 / 3.0, 2.0 / 3.0),
    ),
))

_register(Scenario(
    name="pks_test_1d", system="pks", chart=_FLAT_1D_200,
    bc=("periodic",), default_n=(200,),
    members=(IcMember(
        specs1=(), offset1=30.0 * 5.0 / 6.0,
        specs2=(_g(0.7, 10.0, 5.0), _g(0.4, -60.0, 6.0)), offset2=0.0,
    ),),
))

_register(Scenario(
    name="fhn_test_2d", system="fhn",
    chart=Chart("cartesian2d", ((-100.0, 100.0), (-100.0, 100.0))),
    bc=("periodic", "periodic"), default_n=(200, 200),
    members=(IcMember(
        specs1=(_g(1.0, (0.0, 0.0), (15.0, 10.0)), _g(1.0, (0.0, 40.0), (8.0, 8.0))),
        offset1=0.0,
        specs2=(_g(1.0, (10.0, 0.0), (10.0, 25.0)),), offset2=0.0,
    ),),
    transient=(800.0, 0.1),
))

_register(Scenario(
    name="barkley_test_3d", system="barkley",
    chart=Chart("cartesian3d", ((-50.0, 50.0),) * 3),
    bc=("neumann",) * 3, default_n=(200, 200, 200),
    members=(IcMember(
        specs1=(_g(0.5, (0.0, 6.0, 0.0), (5.0, 6.0, 5.0)),
                _g(0.5, (0.0, 12.0, 6.0), (4.0, 5.0, 4.0))),
        offset1=0.0,
        specs2=(_g(0.8, (5.0, 6.0, 0.0), (5.0, 4.0, 4.0)),
                _g(0.7, (-7.0, 6.0, -7.0), (4.0, 4.0, 6.0))),
        offset2=0.0,
    ),),
    transient=(20.0, 0.01),
))

_register(Scenario(
    name="sphere_fhn_test", system="fhn",
    chart=Chart("sphere_geographic",
                ((_THETA_MIN, math.pi / 2.0), (0.0, math.pi / 2.0)),
                radius=200.0),
    bc=("neumann", "periodic"), default_n=(300, 200),
    members=(IcMember(
        specs1=(_g(1.0, (140.0, math.pi / 6.0), (15.0, 0.15)),
                _g(1.0, (160.0, math.pi / 4.0), (10.0, 0.1))),
        offset1=0.0,
        specs2=(_g(1.0, (150.0, math.pi / 4.0), (10.0, 0.2)),), offset2=0.0,
    ),),
    transient=(200.0, 0.1),
    stereo_coords=True,
))

_register(Scenario(
    name="heat_train_1d", system="heat", chart=_FLAT_1D_200,
    bc=("periodic",), default_n=(200,),
    members=(IcMember(
        specs1=(_g(1.0, 0.0, 50.0),), offset1=0.0, specs2=(), offset2=0.0,
    ),),
))


def scenario_grid(name: str, n=None) -> GridSpec:
    """Grid for a scenario's native chart, at its default or a caller resolution."""
    sc = SCENARIOS[name]
    return make_grid(sc.chart, sc.default_n if n is None else n, sc.bc)


def scenario_member_ic(name: str, grid: GridSpec, member: int):
    """Sample one scenario member's bumps on a grid over the native chart."""
    sc = SCENARIOS[name]
    if grid.chart != sc.chart:
        raise ModelError(f"scenario {name} is defined on chart {sc.chart.kind}")
    m = sc.members[member]
    coords = None
    if sc.stereo_coords:
        mesh = grid.coord_mesh()
        coords = [geo_to_stereo(mesh[0], sc.chart.radius), mesh[1]]
    f1 = gaussian_field(grid, m.specs1, m.offset1, coords)
    f2 = gaussian_field(grid, m.specs2, m.offset2, coords)
    return f1, f2


def scenario_ic(name: str, grid: GridSpec | None = None, member: int = 0):
    """Initial state for a scenario, including any reference pre-evolution.

    Spiral/scroll scenarios integrate the exact system for the scenario's
    transient horizon and return the final state; plain scenarios return the
    sampled bumps directly.
    """
    if name not in SCENARIOS:
        raise ModelError(f"unknown scenario {name!r}")
    sc = SCENARIOS[name]
    if grid is None:
        grid = scenario_grid(name)
    f1, f2 = scenario_member_ic(name, grid, member)
    if sc.transient is not None:
        from .engine import ReferenceRhs, rollout

        t_total, dt = sc.transient
        nsteps = int(round(t_total / dt))
        traj = rollout((f1, f2), ReferenceRhs(sc.system), dt, t_total, nsteps)
        f1, f2 = traj.snapshot(len(traj.times) - 1)
    return f1, f2


SYSTEM_FIELDS = {
    "fhn": ("V", "W"),
    "barkley": ("U", "V"),
    "pks": ("A", "B"),
    "heat": ("u", "v"),
}


def default_params(system: str):
    if system == "fhn":
        return FhnParams()
    if system == "barkley":
        return BarkleyParams()
    if system == "pks":
        return PksParams()
    if system == "heat":
        return None
    raise ModelError(f"unknown system {system!r}")


def normalization(system: str, params=None) -> tuple[float, float]:
    """Per-field scale dividing raw values before training or comparison."""
    if system == "pks":
        p = params if params is not None else PksParams()
        return (p.a_max, p.b_max)
    return (1.0, 1.0)


def reference_rhs_values(system: str, batch: FeatureBatch, params):
    """Evaluate the exact right-hand side for a system on a feature batch."""
    if system == "fhn":
        return fhn_rhs(batch, params)
    if system == "barkley":
        return barkley_rhs(batch, params)
    if system == "pks":
        return pks_rhs(batch, params)
    if system == "heat":
        return heat_rhs(batch), np.zeros_like(batch.column("psi2"))
    raise ModelError(f"unknown system {system!r}")
