import os

import numpy as np
import pytest

from chartfree import fileio
from chartfree.cli import main

HEAT_CFG = """
[experiment]
system = heat
seed = 3
output_dir = {out}

[chart]
kind = cartesian1d
bounds0 = -100 100

[grid]
n = 64
bc = periodic

[ic]
scenario = heat_train_1d
member = 0

[integrator]
dt = 0.5
t_final = 10
stride = 5

[training]
fraction = 0.5
n_neurons = 8
epochs = 3
batch_size = 512
"""


def write_cfg(tmp_path, name, out):
    path = tmp_path / name
    path.write_text(HEAT_CFG.format(out=out))
    return str(path)


def test_full_pipeline_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "heat.cfg", out)

    assert main(["generate", cfg]) == 0
    dataset = out / "dataset.ds"
    assert dataset.exists()

    ds = fileio.read_dataset(dataset)
    # forward-Euler data makes the diffusion target equal the curvature column
    assert np.abs(ds.targets[:, 0] - ds.features[:, 2]).max() <= 1e-10
    assert np.all(ds.targets[:, 1] == 0.0)

    assert main(["train", cfg, str(dataset)]) == 0
    ckpt = out / "model.ckpt"
    assert ckpt.exists()
    assert len(fileio.read_loss_log(out / "loss.csv")) == 3

    assert main(["rollout", cfg, "--reference"]) == 0
    assert main(["rollout", cfg, "--checkpoint", str(ckpt)]) == 0
    assert (out / "true_u_000000.snap").exists()
    assert (out / "learned_u_000000.snap").exists()

    report = out / "cmp.report"
    assert main(["compare", "--true-prefix", str(out / "true"),
                 "--learned-prefix", str(out / "learned"),
                 "--times", "0,5,10", "--out", str(report)]) == 0
    header, records = fileio.read_report(report)
    times = {r["time"] for r in records}
    assert times == {0.0, 5.0, 10.0}
    at0 = [r for r in records if r["time"] == 0.0 and r["metric"] == "mse"]
    assert all(r["value"] == 0.0 for r in at0)  # same initial state

    files = [str(dataset), str(ckpt), str(out / "true_u_000000.snap"),
             str(report)]
    assert main(["verify", cfg] + files) == 0

    other = tmp_path / "other.cfg"
    other.write_text(HEAT_CFG.format(out=out).replace("seed = 3", "seed = 4"))
    assert main(["verify", str(other)] + files) == 2


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text(HEAT_CFG.format(out=tmp_path / "x") + "\nnope = 1\n")
    assert main(["generate", str(bad)]) == 2


def test_missing_file_exit_code(tmp_path):
    cfg = write_cfg(tmp_path, "heat.cfg", tmp_path / "y")
    assert main(["train", cfg, str(tmp_path / "missing.ds")]) == 4


def test_mismatched_system_exit_code(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "heat.cfg", out)
    assert main(["generate", cfg]) == 0
    fhn_cfg = tmp_path / "fhn.cfg"
    fhn_cfg.write_text(HEAT_CFG.format(out=out).replace(
        "system = heat", "system = fhn").replace(
        "scenario = heat_train_1d", "scenario = fhn_train_1d"))
    assert main(["train", str(fhn_cfg), str(out / "dataset.ds")]) == 2


def test_generate_rejects_wrong_chart(tmp_path):
    out = tmp_path / "run"
    cfg_text = HEAT_CFG.format(out=out).replace(
        "kind = cartesian1d", "kind = warped1d\nlambda = 100")
    cfg = tmp_path / "warp.cfg"
    cfg.write_text(cfg_text)
    assert main(["generate", str(cfg)]) == 2


def test_pipeline_rerun_is_byte_identical(tmp_path):
    out = tmp_path / "run"
    cfg = write_cfg(tmp_path, "heat.cfg", out)

    def run_all():
        assert main(["generate", cfg]) == 0
        assert main(["train", cfg, str(out / "dataset.ds")]) == 0
        assert main(["rollout", cfg, "--reference"]) == 0
        assert main(["compare", "--true-prefix", str(out / "true"),
                     "--learned-prefix", str(out / "true"),
                     "--times", "5", "--out", str(out / "self.report")]) == 0
        return {name: (out / name).read_bytes()
                for name in ("dataset.ds", "model.ckpt", "true_u_000001.snap",
                             "self.report")}

    first = run_all()
    second = run_all()
    assert first == second
