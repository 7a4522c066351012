"""Command-line front end: generate reference data, train, roll out, compare,
verify, and run the bundled demo presets.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O
failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import fileio
from .config import ConfigError, ExperimentConfig, load, preset, serialize
from .engine import (
    EngineError,
    LearnedRhs,
    ReferenceRhs,
    Trajectory,
    mse_compare,
    resample,
    rollout,
)
from .grid import GridSpec, ScalarField
from .learn import Dataset, LearnError, MlpConfig, TrainConfig, subsample, time_targets, train
from .models import (
    SCENARIOS,
    SYSTEM_FIELDS,
    ModelError,
    normalization,
    scenario_grid,
    scenario_ic,
)

DATASET_COLUMNS = ("psi1", "inner11", "lap1", "psi2", "inner22", "lap2",
                   "inner12", "dpsi1_dt", "dpsi2_dt")


def _provenance(cfg: ExperimentConfig) -> dict[str, str]:
    return {
        "system": cfg.system,
        "scenario": cfg.scenario,
        "chart_kind": cfg.chart_kind,
        "grid_n": " ".join(str(v) for v in cfg.n),
        "dt": repr(cfg.dt),
        "config_hash": cfg.config_hash(),
        "seed": str(cfg.seed),
    }


def _members(cfg: ExperimentConfig):
    count = len(SCENARIOS[cfg.scenario].members)
    if cfg.member is None:
        return range(count)
    if not 0 <= cfg.member < count:
        raise ConfigError(f"scenario {cfg.scenario} has no member {cfg.member}")
    return [cfg.member]


def cmd_generate(cfg: ExperimentConfig) -> str:
    """Reference rollouts for every scenario member, forward-difference
    targets, subsampling, one dataset file plus exported trajectories."""
    sc = SCENARIOS[cfg.scenario]
    if sc.system != cfg.system:
        raise ConfigError(f"scenario {cfg.scenario} belongs to system {sc.system}")
    grid = cfg.make_grid()
    if grid.chart != sc.chart:
        raise ConfigError("generate requires the scenario's native chart")
    norms = normalization(cfg.system)
    fields = SYSTEM_FIELDS[cfg.system]
    os.makedirs(cfg.output_dir, exist_ok=True)
    chash = cfg.config_hash()

    parts = []
    for j in _members(cfg):
        ic = scenario_ic(cfg.scenario, grid, member=j)
        traj = rollout(ic, ReferenceRhs(cfg.system), cfg.dt, cfg.t_final,
                       snapshot_stride=1, system=cfg.system)
        traj = traj.scaled(norms)
        ds = time_targets(traj, cfg.dt)
        part = subsample(ds, cfg.fraction, cfg.seed + j)
        parts.append(part)
        fileio.save_trajectory(
            Trajectory(traj.grid, traj.times[::cfg.stride],
                       traj.states[::cfg.stride], traj.source, traj.system),
            cfg.output_dir, f"ref{j:02d}", field_names=fields,
            config_hash=chash, seed=cfg.seed, norms=norms,
        )
    merged = Dataset(
        np.concatenate([p.features for p in parts]),
        np.concatenate([p.targets for p in parts]),
        {**_provenance(cfg), "members": str(len(parts)),
         "subsample_fraction": repr(cfg.fraction)},
    )
    path = os.path.join(cfg.output_dir, "dataset.ds")
    fileio.write_dataset(path, merged, column_names=DATASET_COLUMNS)
    return path


def cmd_train(cfg: ExperimentConfig, dataset_path: str) -> str:
    ds = fileio.read_dataset(dataset_path)
    if ds.provenance.get("system") != cfg.system:
        raise ConfigError(
            f"dataset was generated for system {ds.provenance.get('system')!r}, "
            f"config says {cfg.system!r}"
        )
    mlp_cfg = MlpConfig(n_neurons=cfg.n_neurons, seed=cfg.seed)
    train_cfg = TrainConfig(learning_rate=cfg.learning_rate, epochs=cfg.epochs,
                            batch_size=cfg.batch_size, seed=cfg.seed,
                            average_tail_epochs=cfg.average_tail)
    mlp, losses = train(ds, mlp_cfg, train_cfg)
    os.makedirs(cfg.output_dir, exist_ok=True)
    ckpt = os.path.join(cfg.output_dir, "model.ckpt")
    fileio.write_checkpoint(ckpt, mlp, system=cfg.system, seed=cfg.seed,
                            normalization=normalization(cfg.system),
                            config_hash=cfg.config_hash())
    fileio.write_loss_log(os.path.join(cfg.output_dir, "loss.csv"), losses)
    return ckpt


def _scenario_state(cfg: ExperimentConfig, grid: GridSpec):
    """Initial state for cfg's grid: sampled (and pre-evolved) on the
    scenario's native chart, then transferred if cfg uses a different chart."""
    native = scenario_grid(cfg.scenario, n=cfg.n)
    ic = scenario_ic(cfg.scenario, native, member=cfg.member or 0)
    if native == grid:
        return ic
    return (resample(ic[0], grid), resample(ic[1], grid))


def cmd_rollout(cfg: ExperimentConfig, checkpoint: str | None, tag: str | None = None,
                ic_state=None) -> str:
    """Reference (checkpoint None) or learned rollout on the config grid.

    Exported snapshots are always in normalized field units.  ic_state lets
    in-process callers reuse an already computed initial state.
    """
    grid = cfg.make_grid()
    fields = SYSTEM_FIELDS[cfg.system]
    norms = normalization(cfg.system)
    if ic_state is None:
        ic_state = _scenario_state(cfg, grid)
    if checkpoint is None:
        tag = tag or "true"
        traj = rollout(ic_state, ReferenceRhs(cfg.system), cfg.dt, cfg.t_final,
                       snapshot_stride=cfg.stride, system=cfg.system)
        traj = traj.scaled(norms)
    else:
        tag = tag or "learned"
        header, mlp = fileio.read_checkpoint(checkpoint)
        if header["system"] != cfg.system:
            raise ConfigError(
                f"checkpoint is for system {header['system']!r}, config says "
                f"{cfg.system!r}"
            )
        ck_norms = tuple(float(v) for v in header["normalization"].split())
        scaled_ic = (
            ScalarField(grid, ic_state[0].values / ck_norms[0]),
            ScalarField(grid, ic_state[1].values / ck_norms[1]),
        )
        traj = rollout(scaled_ic, LearnedRhs(mlp, ck_norms), cfg.dt, cfg.t_final,
                       snapshot_stride=cfg.stride, source="learned",
                       system=cfg.system)
    os.makedirs(cfg.output_dir, exist_ok=True)
    fileio.save_trajectory(traj, cfg.output_dir, tag, field_names=fields,
                           config_hash=cfg.config_hash(), seed=cfg.seed,
                           norms=norms)
    return os.path.join(cfg.output_dir, tag)


def cmd_compare(true_prefix: str, learned_prefix: str, times, out_path: str) -> str:
    tdir, tpre = os.path.split(true_prefix)
    ldir, lpre = os.path.split(learned_prefix)
    true_traj = fileio.load_trajectory(tdir or ".", tpre)
    learned_traj = fileio.load_trajectory(ldir or ".", lpre)
    fields = SYSTEM_FIELDS.get(true_traj.system, ("psi1", "psi2"))
    records = mse_compare(true_traj, learned_traj, times, field_names=fields)
    header, _ = fileio.read_snapshot(
        os.path.join(tdir or ".", f"{tpre}_{fields[0]}_000000.snap"))
    fileio.write_report(out_path, records, config_hash=header["config_hash"],
                        seed=int(header["seed"]), system=true_traj.system)
    return out_path


def cmd_verify(cfg: ExperimentConfig, paths) -> list[str]:
    """Check that every file's embedded config hash and seed match cfg."""
    want_hash = cfg.config_hash()
    problems = []
    for path in paths:
        if path.endswith(".snap"):
            header, _ = fileio.read_snapshot(path)
        elif path.endswith(".ds"):
            header = fileio.read_dataset(path).provenance
        elif path.endswith(".ckpt"):
            header, _ = fileio.read_checkpoint(path)
        elif path.endswith(".report"):
            header, _ = fileio.read_report(path)
        else:
            problems.append(f"{path}: unknown file type")
            continue
        if header.get("config_hash") != want_hash:
            problems.append(f"{path}: config hash {header.get('config_hash')} "
                            f"!= {want_hash}")
        if header.get("seed") != str(cfg.seed):
            problems.append(f"{path}: seed {header.get('seed')} != {cfg.seed}")
    return problems


def cmd_demo(name: str, scale: float, out_root: str) -> str:
    """Run one preset end to end: generate, train, reference and learned
    rollouts, comparison report."""
    stages = preset(name, scale=scale, out_root=out_root)
    train_cfg = stages["train"]
    os.makedirs(train_cfg.output_dir, exist_ok=True)
    for role, cfg in stages.items():
        with open(os.path.join(train_cfg.output_dir, f"config_{role}.cfg"), "w",
                  encoding="utf-8") as fh:
            fh.write(serialize(cfg))

    dataset = cmd_generate(train_cfg)
    ckpt = cmd_train(train_cfg, dataset)

    true_cfg = stages["true"]
    grid_true = true_cfg.make_grid()
    ic_true = _scenario_state(true_cfg, grid_true)
    cmd_rollout(true_cfg, None, tag="true", ic_state=ic_true)

    compare_times = [true_cfg.t_final]
    if name == "fig2":
        compare_times = [100.0, 300.0, 500.0]

    reports = []
    for role in ("learned", "learned_alt"):
        if role not in stages:
            continue
        cfg = stages[role]
        grid = cfg.make_grid()
        if grid == grid_true:
            ic = ic_true
        else:
            ic = (resample(ic_true[0], grid), resample(ic_true[1], grid))
        tag = "learned" if role == "learned" else "learned_alt"
        cmd_rollout(cfg, ckpt, tag=tag, ic_state=ic)
        report = os.path.join(cfg.output_dir, f"report_{tag}.report")
        cmd_compare(os.path.join(true_cfg.output_dir, "true"),
                    os.path.join(cfg.output_dir, tag), compare_times, report)
        reports.append(report)

    for report in reports:
        _, records = fileio.read_report(report)
        for r in records:
            if r["metric"] == "mse":
                print(f"{os.path.basename(report)} {r['field']} t={r['time']:g} "
                      f"mse={r['value']:.3e}")
    return train_cfg.output_dir


def _build_parser():
    p = argparse.ArgumentParser(prog="chartfree")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="reference data and training dataset")
    g.add_argument("config")

    t = sub.add_parser("train", help="fit the operator network to a dataset")
    t.add_argument("config")
    t.add_argument("dataset")

    r = sub.add_parser("rollout", help="integrate reference or learned dynamics")
    r.add_argument("config")
    mode = r.add_mutually_exclusive_group(required=True)
    mode.add_argument("--checkpoint")
    mode.add_argument("--reference", action="store_true")
    r.add_argument("--tag", default=None)

    c = sub.add_parser("compare", help="MSE report between two trajectory sets")
    c.add_argument("--true-prefix", required=True)
    c.add_argument("--learned-prefix", required=True)
    c.add_argument("--times", required=True,
                   help="comma-separated times present in both trajectories")
    c.add_argument("--out", required=True)

    v = sub.add_parser("verify", help="check embedded config hashes and seeds")
    v.add_argument("config")
    v.add_argument("files", nargs="+")

    d = sub.add_parser("demo", help="run a named preset end to end")
    d.add_argument("name", choices=("fig2", "fig3a", "fig3b", "fig4"))
    d.add_argument("--scale", type=float, default=1.0)
    d.add_argument("--out", default="runs")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            path = cmd_generate(load(args.config))
            print(path)
        elif args.command == "train":
            print(cmd_train(load(args.config), args.dataset))
        elif args.command == "rollout":
            ckpt = None if args.reference else args.checkpoint
            print(cmd_rollout(load(args.config), ckpt, tag=args.tag))
        elif args.command == "compare":
            times = [float(s) for s in args.times.split(",")]
            print(cmd_compare(args.true_prefix, args.learned_prefix, times, args.out))
        elif args.command == "verify":
            problems = cmd_verify(load(args.config), args.files)
            for msg in problems:
                print(msg, file=sys.stderr)
            if problems:
                return 2
            print(f"{len(args.files)} files verified")
        elif args.command == "demo":
            print(cmd_demo(args.name, args.scale, args.out))
    except (ConfigError, ModelError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (EngineError, LearnError, FloatingPointError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"i/o failure: {e}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
