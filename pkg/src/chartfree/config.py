"""Experiment configuration: a plain-text sectioned key/value format.

Files look like

    [experiment]
    system = pks
    seed = 20240
    output_dir = runs/pks1d

    [chart]
    kind = cartesian1d
    bounds0 = -100 100

    [grid]
    n = 200
    bc = periodic

    [ic]
    scenario = pks_test_1d

    [integrator]
    dt = 0.1
    t_final = 500
    stride = 100

    [training]
    fraction = 0.02
    n_neurons = 32
    epochs = 500
    batch_size = 8192
    learning_rate = 5e-4

Unknown sections or keys are rejected.  Parsing then serializing yields a
canonical text whose SHA-256 prefix is the config hash embedded in every
output file.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass, replace

from .geometry import Chart
from .grid import GridSpec, make_grid
from .models import SCENARIOS

_KNOWN = {
    "experiment": {"system", "seed", "output_dir", "scale"},
    "chart": {"kind", "bounds0", "bounds1", "bounds2", "lambda", "radius"},
    "grid": {"n", "bc", "spacing"},
    "ic": {"scenario", "member"},
    "integrator": {"dt", "t_final", "stride"},
    "training": {"fraction", "n_neurons", "epochs", "batch_size", "learning_rate",
                 "average_tail"},
}

_TRAIN_DEFAULTS = {
    # fraction, n_neurons per system; learning rate and epochs are shared
    "fhn": (0.1, 64),
    "barkley": (0.05, 64),
    "pks": (0.02, 32),
    "heat": (0.1, 32),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    system: str
    seed: int
    output_dir: str
    scale: float
    chart_kind: str
    bounds: tuple[tuple[float, float], ...]
    lam: float | None
    radius: float | None
    n: tuple[int, ...]
    bc: tuple[str, ...]
    scenario: str
    member: int | None  # None means every member of the scenario
    dt: float
    t_final: float
    stride: int
    fraction: float
    n_neurons: int
    epochs: int
    batch_size: int
    learning_rate: float
    average_tail: int

    def make_chart(self) -> Chart:
        return Chart(self.chart_kind, self.bounds, lam=self.lam, radius=self.radius)

    def make_grid(self) -> GridSpec:
        return make_grid(self.make_chart(), self.n, self.bc)

    def config_hash(self) -> str:
        return hashlib.sha256(serialize(self).encode("utf-8")).hexdigest()[:16]


def _get(parser, section, key, default=None, required=False):
    if parser.has_option(section, key):
        return parser.get(section, key)
    if required:
        raise ConfigError(f"missing required key {key!r} in [{section}]")
    return default


def parse(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from None

    for section in parser.sections():
        if section not in _KNOWN:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _KNOWN[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")

    system = _get(parser, "experiment", "system", required=True)
    if system not in _TRAIN_DEFAULTS:
        raise ConfigError(f"unknown system {system!r}")
    seed = int(_get(parser, "experiment", "seed", required=True))
    output_dir = _get(parser, "experiment", "output_dir", required=True)
    scale = float(_get(parser, "experiment", "scale", "1.0"))

    kind = _get(parser, "chart", "kind", required=True)
    bounds = []
    for ax in range(3):
        raw = _get(parser, "chart", f"bounds{ax}")
        if raw is None:
            break
        lo, hi = raw.split()
        bounds.append((float(lo), float(hi)))
    lam = _get(parser, "chart", "lambda")
    radius = _get(parser, "chart", "radius")

    n = tuple(int(v) for v in _get(parser, "grid", "n", required=True).split())
    bc = tuple(_get(parser, "grid", "bc", required=True).split())
    spacing_raw = _get(parser, "grid", "spacing")

    scenario = _get(parser, "ic", "scenario", required=True)
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    member_raw = _get(parser, "ic", "member", "all")
    member = None if member_raw == "all" else int(member_raw)

    dt = float(_get(parser, "integrator", "dt", required=True))
    t_final = float(_get(parser, "integrator", "t_final", required=True))
    stride = int(_get(parser, "integrator", "stride", "1"))
    if dt <= 0 or t_final <= 0 or stride < 1:
        raise ConfigError("dt, t_final must be positive and stride >= 1")

    def_frac, def_neu = _TRAIN_DEFAULTS[system]
    fraction = float(_get(parser, "training", "fraction", repr(def_frac)))
    n_neurons = int(_get(parser, "training", "n_neurons", str(def_neu)))
    epochs = int(_get(parser, "training", "epochs", "2000"))
    batch_size = int(_get(parser, "training", "batch_size", "8192"))
    learning_rate = float(_get(parser, "training", "learning_rate", "5e-4"))
    average_tail = int(_get(parser, "training", "average_tail", "0"))

    cfg = ExperimentConfig(
        system=system, seed=seed, output_dir=output_dir, scale=scale,
        chart_kind=kind, bounds=tuple(bounds),
        lam=float(lam) if lam is not None else None,
        radius=float(radius) if radius is not None else None,
        n=n, bc=bc, scenario=scenario, member=member,
        dt=dt, t_final=t_final, stride=stride,
        fraction=fraction, n_neurons=n_neurons, epochs=epochs,
        batch_size=batch_size, learning_rate=learning_rate,
        average_tail=average_tail,
    )
    try:
        grid = cfg.make_grid()
    except ValueError as e:
        raise ConfigError(str(e)) from None
    if spacing_raw is not None:
        declared = tuple(float(v) for v in spacing_raw.split())
        if any(abs(a - b) > 1e-9 * max(1.0, abs(b))
               for a, b in zip(declared, grid.spacing)):
            raise ConfigError(
                f"declared spacing {declared} inconsistent with bounds/n/bc "
                f"(derived {grid.spacing})"
            )
    return cfg


def serialize(cfg: ExperimentConfig) -> str:
    out = io.StringIO()
    out.write("[experiment]\n")
    out.write(f"system = {cfg.system}\n")
    out.write(f"seed = {cfg.seed}\n")
    out.write(f"output_dir = {cfg.output_dir}\n")
    out.write(f"scale = {cfg.scale!r}\n\n")
    out.write("[chart]\n")
    out.write(f"kind = {cfg.chart_kind}\n")
    for ax, (lo, hi) in enumerate(cfg.bounds):
        out.write(f"bounds{ax} = {lo!r} {hi!r}\n")
    if cfg.lam is not None:
        out.write(f"lambda = {cfg.lam!r}\n")
    if cfg.radius is not None:
        out.write(f"radius = {cfg.radius!r}\n")
    out.write("\n[grid]\n")
    out.write(f"n = {' '.join(str(v) for v in cfg.n)}\n")
    out.write(f"bc = {' '.join(cfg.bc)}\n\n")
    out.write("[ic]\n")
    out.write(f"scenario = {cfg.scenario}\n")
    out.write(f"member = {'all' if cfg.member is None else cfg.member}\n\n")
    out.write("[integrator]\n")
    out.write(f"dt = {cfg.dt!r}\n")
    out.write(f"t_final = {cfg.t_final!r}\n")
    out.write(f"stride = {cfg.stride}\n\n")
    out.write("[training]\n")
    out.write(f"fraction = {cfg.fraction!r}\n")
    out.write(f"n_neurons = {cfg.n_neurons}\n")
    out.write(f"epochs = {cfg.epochs}\n")
    out.write(f"batch_size = {cfg.batch_size}\n")
    out.write(f"learning_rate = {cfg.learning_rate!r}\n")
    out.write(f"average_tail = {cfg.average_tail}\n")
    return out.getvalue()


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _scaled_n(n, scale):
    return tuple(max(8, int(round(v * scale))) for v in n)


def preset(name: str, scale: float = 1.0, out_root: str = "runs") -> dict[str, ExperimentConfig]:
    """Named experiment bundles reproducing the four study setups at desk scale.

    Returns stage configs keyed by role: "train" (data generation + fitting on
    the 1d training chart) plus one config per rollout chart.  scale
    multiplies grid resolutions and epoch counts; the time step is left
    unchanged, which keeps every preset on the stable side of the explicit
    stepping limit while snapshot times stay aligned across scales.
    """
    epochs = max(10, int(round(500 * scale)))
    if name == "fig2":
        train = ExperimentConfig(
            system="pks", seed=20240, output_dir=f"{out_root}/fig2", scale=scale,
            chart_kind="cartesian1d", bounds=((-100.0, 100.0),), lam=None, radius=None,
            n=_scaled_n((200,), scale), bc=("periodic",),
            scenario="pks_train_1d_desk", member=None,
            dt=0.1, t_final=500.0, stride=100,
            fraction=0.02, n_neurons=32, epochs=epochs, batch_size=8192,
            learning_rate=5e-4, average_tail=max(2, epochs // 10),
        )
        test = replace(train, scenario="pks_test_1d", member=0)
        warped = replace(test, chart_kind="warped1d", lam=100.0)
        return {"train": train, "true": test, "learned": test, "learned_alt": warped}
    if name == "fig3a":
        train = ExperimentConfig(
            system="fhn", seed=20240, output_dir=f"{out_root}/fig3a", scale=scale,
            chart_kind="cartesian1d", bounds=((-100.0, 100.0),), lam=None, radius=None,
            n=_scaled_n((200,), scale), bc=("periodic",),
            scenario="fhn_train_1d", member=0,
            dt=0.1, t_final=1000.0, stride=100,
            fraction=0.1, n_neurons=64, epochs=epochs, batch_size=8192,
            learning_rate=5e-4, average_tail=max(2, epochs // 10),
        )
        true2d = replace(
            train, chart_kind="cartesian2d",
            bounds=((-100.0, 100.0), (-100.0, 100.0)),
            n=_scaled_n((100, 100), scale), bc=("periodic", "periodic"),
            scenario="fhn_test_2d", t_final=15.0, stride=50,
        )
        warped2d = replace(true2d, chart_kind="warped2d", lam=100.0)
        return {"train": train, "true": true2d, "learned": warped2d}
    if name == "fig3b":
        train = ExperimentConfig(
            system="barkley", seed=20240, output_dir=f"{out_root}/fig3b", scale=scale,
            chart_kind="cartesian1d", bounds=((-50.0, 50.0),), lam=None, radius=None,
            n=_scaled_n((200,), scale), bc=("periodic",),
            scenario="barkley_train_1d", member=0,
            dt=0.01, t_final=200.0, stride=100,
            fraction=0.05, n_neurons=64, epochs=epochs, batch_size=8192,
            learning_rate=5e-4, average_tail=max(2, epochs // 10),
        )
        cube = replace(
            train, chart_kind="cartesian3d", bounds=((-50.0, 50.0),) * 3,
            n=_scaled_n((64, 64, 64), scale), bc=("neumann",) * 3,
            scenario="barkley_test_3d", t_final=1.5, stride=50,
        )
        return {"train": train, "true": cube, "learned": cube}
    if name == "fig4":
        theta_min = SCENARIOS["sphere_fhn_test"].chart.bounds[0][0]
        train = ExperimentConfig(
            system="fhn", seed=20240, output_dir=f"{out_root}/fig4", scale=scale,
            chart_kind="cartesian1d", bounds=((-100.0, 100.0),), lam=None, radius=None,
            n=_scaled_n((200,), scale), bc=("periodic",),
            scenario="fhn_train_1d", member=0,
            dt=0.1, t_final=1000.0, stride=100,
            fraction=0.1, n_neurons=64, epochs=epochs, batch_size=8192,
            learning_rate=5e-4, average_tail=max(2, epochs // 10),
        )
        geo = replace(
            train, chart_kind="sphere_geographic",
            bounds=((theta_min, math.pi / 2.0), (0.0, math.pi / 2.0)),
            radius=200.0, n=_scaled_n((150, 100), scale),
            bc=("neumann", "periodic"), scenario="sphere_fhn_test",
            t_final=15.0, stride=50,
        )
        stereo = replace(
            geo, chart_kind="sphere_stereographic",
            bounds=((50.0, 200.0), (0.0, math.pi / 2.0)),
        )
        return {"train": train, "true": geo, "learned": stereo}
    raise ConfigError(f"unknown preset {name!r}")
