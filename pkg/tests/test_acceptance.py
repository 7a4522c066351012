"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The trained-model criteria share session fixtures that run the bundled desk
presets through the command-layer functions, so the file formats and the
learned operators are exercised exactly as a user would hit them.  Run with
`pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import math
import os

import numpy as np
import pytest

from chartfree import fileio
from chartfree.cli import cmd_generate, cmd_rollout, cmd_train, main
from chartfree.config import preset
from chartfree.engine import ReferenceRhs, mse_compare, resample, rollout
from chartfree.features import FEATURE_NAMES, build_features, laplace_beltrami
from chartfree.geometry import Chart, warp_forward
from chartfree.grid import ScalarField, d1, d2, make_grid
from chartfree.learn import MlpConfig, init_mlp, batch_loss, loss_and_gradient
from chartfree.models import PksParams, pks_rhs

SEED = 20240


def report(name, ok, detail):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


# --- shared trained-model pipelines -------------------------------------


@pytest.fixture(scope="session")
def pks_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("pks")
    stages = preset("fig2", out_root=str(root))
    train_cfg = stages["train"]
    dataset = cmd_generate(train_cfg)
    ckpt = cmd_train(train_cfg, dataset)

    true_cfg = stages["true"]
    cmd_rollout(true_cfg, None, tag="true")
    cmd_rollout(stages["learned"], ckpt, tag="learned")
    cmd_rollout(stages["learned_alt"], ckpt, tag="learned_alt")

    out = train_cfg.output_dir
    return {
        "dir": out,
        "dataset": dataset,
        "ckpt": ckpt,
        "true": fileio.load_trajectory(out, "true"),
        "learned": fileio.load_trajectory(out, "learned"),
        "learned_alt": fileio.load_trajectory(out, "learned_alt"),
        "train_cfg": train_cfg,
    }


@pytest.fixture(scope="session")
def fhn_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("fhn")
    stages = preset("fig3a", out_root=str(root))
    train_cfg = stages["train"]
    dataset = cmd_generate(train_cfg)
    ckpt = cmd_train(train_cfg, dataset)
    losses = fileio.read_loss_log(os.path.join(train_cfg.output_dir, "loss.csv"))

    cmd_rollout(stages["true"], None, tag="true")
    cmd_rollout(stages["learned"], ckpt, tag="learned")
    out = train_cfg.output_dir
    return {
        "ckpt": ckpt,
        "losses": losses,
        "true2d": fileio.load_trajectory(out, "true"),
        "learned2d": fileio.load_trajectory(out, "learned"),
        "stages": stages,
        "root": str(root),
    }


@pytest.fixture(scope="session")
def sphere_run(fhn_run, tmp_path_factory):
    root = tmp_path_factory.mktemp("sphere")
    stages = preset("fig4", out_root=str(root))
    cmd_rollout(stages["true"], None, tag="true")
    cmd_rollout(stages["learned"], fhn_run["ckpt"], tag="learned")
    out = stages["true"].output_dir
    return {
        "true": fileio.load_trajectory(out, "true"),
        "learned": fileio.load_trajectory(out, "learned"),
    }


@pytest.fixture(scope="session")
def barkley_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("barkley")
    stages = preset("fig3b", out_root=str(root))
    train_cfg = stages["train"]
    dataset = cmd_generate(train_cfg)
    ckpt = cmd_train(train_cfg, dataset)
    cmd_rollout(stages["true"], None, tag="true")
    cmd_rollout(stages["learned"], ckpt, tag="learned")
    out = train_cfg.output_dir
    return {
        "true": fileio.load_trajectory(out, "true"),
        "learned": fileio.load_trajectory(out, "learned"),
    }


# --- criterion 1: operator convergence ----------------------------------


def test_operator_convergence():
    half = 100.0

    def cart(n):
        g = make_grid(Chart("cartesian1d", ((-half, half),)), n, ("periodic",))
        x = g.axis_coords(0)
        k = 2 * np.pi / (2 * half)
        return g, x, k

    def cart_d1(n):
        g, x, k = cart(n)
        return ScalarField(g, np.sin(k * x)), k * np.cos(k * x)

    def cart_d2(n):
        g, x, k = cart(n)
        return ScalarField(g, np.sin(k * x)), -k * k * np.sin(k * x)

    def warped_lap(n):
        chart = Chart("warped1d", ((-half, half),), lam=half)
        g = make_grid(chart, n, ("periodic",))
        x = warp_forward(g.axis_coords(0), half)
        k = np.pi / half
        return ScalarField(g, np.cos(k * x)), -k * k * np.cos(k * x)

    def sphere_lap(n):
        theta_min = 2 * math.atan(0.25)
        chart = Chart("sphere_geographic",
                      ((theta_min, math.pi / 2), (0.0, math.pi / 2)),
                      radius=200.0)
        g = make_grid(chart, (n, max(8, n // 2)), ("neumann", "periodic"))
        mesh = g.coord_mesh()
        span = math.pi / 2 - theta_min
        # sin^4 profile: value and first three theta-derivatives vanish at
        # the walls, so the value-copy ghost rule stays second order there
        a = np.pi / span
        s = np.sin(a * (mesh[0] - theta_min))
        c = np.cos(a * (mesh[0] - theta_min))
        f_theta = s**4
        df = 4 * s**3 * c * a
        d2f = a * a * (12 * s**2 * c**2 - 4 * s**4)
        g_phi = np.cos(4 * mesh[1])
        field = f_theta * g_phi
        cot = np.cos(mesh[0]) / np.sin(mesh[0])
        expected = (cot * df * g_phi + d2f * g_phi
                    - 16.0 * f_theta * g_phi / np.sin(mesh[0]) ** 2) / 200.0**2
        return (ScalarField(g, np.broadcast_to(field, g.shape).reshape(-1).copy()),
                np.broadcast_to(expected, g.shape).reshape(-1))

    checks = [
        ("d1 cartesian", cart_d1, lambda f: d1(f, 0), 0),
        ("d2 cartesian", cart_d2, lambda f: d2(f, 0), 0),
        ("lap cartesian", cart_d2, laplace_beltrami, 0),
        # the warp's second derivative jumps across the periodic seam, so
        # the nodes whose stencils touch it carry a first-order chart
        # artifact; the operator's order is measured on the smooth region
        ("lap warped", warped_lap, laplace_beltrami, 2),
        ("lap sphere", sphere_lap, laplace_beltrami, 0),
    ]
    ratios = {}
    for name, make, op, trim in checks:
        errs = []
        for n in (100, 200):
            field, expected = make(n)
            err = np.abs(op(field).values - expected)
            if trim:
                err = err[trim:-trim]
            errs.append(err.max())
        ratios[name] = errs[0] / errs[1]
    ok = all(3.2 <= r <= 4.8 for r in ratios.values())
    detail = ", ".join(f"{k} ratio {v:.2f}" for k, v in ratios.items())
    report("operator-convergence", ok, detail)


# --- criterion 2: sphere eigenfunction ----------------------------------


def test_sphere_eigenfunction():
    theta_min = 2 * math.atan(0.25)
    chart = Chart("sphere_geographic",
                  ((theta_min, math.pi / 2), (0.0, math.pi / 2)), radius=200.0)
    g = make_grid(chart, (300, 200), ("neumann", "periodic"))
    theta = np.broadcast_to(g.coord_mesh()[0], g.shape)
    f = ScalarField(g, np.cos(theta).reshape(-1).copy())
    lap = laplace_beltrami(f).nd
    expected = -2.0 * np.cos(theta) / 200.0**2
    rel = np.abs(lap[1:-1] / expected[1:-1] - 1.0).max()
    report("sphere-eigenfunction", rel <= 1e-3, f"max interior rel err {rel:.2e}")


# --- criterion 3: feature chart invariance ------------------------------


def test_feature_chart_invariance():
    import sys

    sys.path.insert(0, os.path.dirname(__file__))
    from test_features import feature_pushforward_error

    coarse = [feature_pushforward_error(200, seed=s) for s in range(20)]
    fine = [feature_pushforward_error(400, seed=s) for s in range(20)]
    worst = max(coarse)
    ratio = np.mean(np.array(coarse) / np.array(fine))
    ok = worst <= 1e-2 and ratio >= 3.2
    report("feature-chart-invariance", ok,
           f"worst rel err {worst:.2e}, mean refinement ratio {ratio:.2f}")


# --- criterion 4: chemotaxis expansion oracle ---------------------------


def test_pks_expansion_oracle():
    import sys

    sys.path.insert(0, os.path.dirname(__file__))
    from test_models import expansion_vs_divergence_err

    ratios = [expansion_vs_divergence_err(64, seed=s)
              / expansion_vs_divergence_err(128, seed=s) for s in range(10)]
    ok = all(3.2 <= r <= 4.8 for r in ratios)
    report("pks-expansion-oracle", ok,
           f"ratios {min(ratios):.2f}..{max(ratios):.2f}")


# --- criterion 5: heat conservation -------------------------------------


def test_heat_conservation():
    g = make_grid(Chart("cartesian1d", ((-100.0, 100.0),)), 128, ("periodic",))
    rng = np.random.default_rng(SEED)
    ic = (ScalarField(g, 1.0 + 0.5 * rng.standard_normal(128)),
          ScalarField(g, np.zeros(128)))
    traj = rollout(ic, ReferenceRhs("heat"), 0.5, 500.0, snapshot_stride=100)
    sums = traj.states[:, 0].sum(axis=1)
    drift = np.abs(sums - sums[0]).max() / abs(sums[0])
    report("heat-conservation", drift <= 1e-10, f"relative drift {drift:.2e}")


# --- criterion 6: gradient check ----------------------------------------


def test_mlp_gradient_check():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for trial in range(10):
        mlp = init_mlp(MlpConfig(n_neurons=8, seed=int(rng.integers(1 << 31))))
        x = rng.uniform(-1, 1, (6, 7))
        y = rng.uniform(-1, 1, (6, 2))
        _, gw, gb = loss_and_gradient(mlp, x, y)
        h = 1e-6
        for params, grads in ((mlp.weights, gw), (mlp.biases, gb)):
            for p, gr in zip(params, grads):
                flat, gflat = p.reshape(-1), gr.reshape(-1)
                idx = rng.choice(flat.size, size=min(20, flat.size), replace=False)
                for i in idx:
                    orig = flat[i]
                    flat[i] = orig + h
                    lp = batch_loss(mlp, x, y)
                    flat[i] = orig - h
                    lm = batch_loss(mlp, x, y)
                    flat[i] = orig
                    fd = (lp - lm) / (2 * h)
                    worst = max(worst, abs(fd - gflat[i])
                                / max(1.0, abs(fd), abs(gflat[i])))
    report("mlp-gradient-check", worst <= 1e-6, f"worst rel err {worst:.2e}")


# --- criteria 7 and 8: 1d closed loop and cross-coordinate --------------


def _pooled_mse(true_traj, learned_traj, fields):
    recs = mse_compare(true_traj, learned_traj, true_traj.times,
                       field_names=fields)
    out = {}
    for f in fields:
        out[f] = float(np.mean([r.mse for r in recs if r.field == f]))
    return out, recs


def test_pks_closed_loop(pks_run):
    pooled, recs = _pooled_mse(pks_run["true"], pks_run["learned"], ("A", "B"))
    ok = pooled["A"] <= 1e-3 and pooled["B"] <= 1e-3
    report("pks-closed-loop", ok,
           f"MSE_A {pooled['A']:.2e}, MSE_B {pooled['B']:.2e} over t in [0,500]")


def test_pks_cross_coordinate(pks_run):
    recs_same = mse_compare(pks_run["true"], pks_run["learned"], [500.0],
                            field_names=("A", "B"))
    recs_cross = mse_compare(pks_run["true"], pks_run["learned_alt"], [500.0],
                             field_names=("A", "B"))
    same = {r.field: r.mse for r in recs_same}
    cross = {r.field: r.mse for r in recs_cross}
    ok = all(cross[f] <= 2.0 * same[f] for f in ("A", "B"))
    report("pks-cross-coordinate", ok,
           f"t=500 cross/same: A {cross['A']:.2e}/{same['A']:.2e}, "
           f"B {cross['B']:.2e}/{same['B']:.2e}")


def test_pks_positivity(pks_run):
    mins = []
    for j in range(12):
        traj = fileio.load_trajectory(pks_run["dir"], f"ref{j:02d}")
        mins.append(traj.states.min())
    worst = min(mins)
    report("pks-positivity", worst >= -1e-9,
           f"min field value over the training sweep {worst:.2e}")


# --- criterion 9: 2d dimension lift -------------------------------------


def test_fhn_dimension_lift_2d(fhn_run):
    recs = mse_compare(fhn_run["true2d"], fhn_run["learned2d"], [15.0],
                       field_names=("V", "W"))
    mse_v = [r.mse for r in recs if r.field == "V"][0]
    report("fhn-2d-lift", mse_v <= 5e-2, f"MSE_V {mse_v:.2e} at t=15")


def test_fhn_training_loss_profile(fhn_run):
    losses = fhn_run["losses"]
    tail = losses[50:]
    violations = int(np.sum(np.diff(tail) > 0))
    ok = violations < 0.05 * len(tail)
    report("fhn-loss-decrease", ok,
           f"{violations} non-decreasing epochs of {len(tail)} after epoch 50")


# --- criterion 10: curved surface ---------------------------------------


def test_sphere_fhn(sphere_run):
    recs = mse_compare(sphere_run["true"], sphere_run["learned"], [15.0],
                       field_names=("V", "W"))
    vals = {r.field: r.mse for r in recs}
    ok = vals["V"] <= 2e-2 and vals["W"] <= 1e-3
    report("sphere-fhn", ok,
           f"MSE_V {vals['V']:.2e}, MSE_W {vals['W']:.2e} at t=15")


# --- criterion 11: 3d dimension lift ------------------------------------


def test_barkley_dimension_lift_3d(barkley_run):
    recs = mse_compare(barkley_run["true"], barkley_run["learned"], [1.5],
                       field_names=("U", "V"))
    mse_u = [r.mse for r in recs if r.field == "U"][0]
    report("barkley-3d-lift", mse_u <= 2e-2, f"MSE_U {mse_u:.2e} at t=1.5")


# --- criterion 12: determinism ------------------------------------------


DET_CFG = """
[experiment]
system = pks
seed = 77
output_dir = {out}

[chart]
kind = cartesian1d
bounds0 = -100 100

[grid]
n = 64
bc = periodic

[ic]
scenario = pks_test_1d
member = 0

[integrator]
dt = 0.1
t_final = 5
stride = 10

[training]
fraction = 0.2
n_neurons = 8
epochs = 5
batch_size = 1024
average_tail = 2
"""


def test_pipeline_determinism(tmp_path):
    out = tmp_path / "det"
    cfg_path = tmp_path / "det.cfg"
    cfg_path.write_text(DET_CFG.format(out=out))

    def run_all():
        assert main(["generate", str(cfg_path)]) == 0
        assert main(["train", str(cfg_path), str(out / "dataset.ds")]) == 0
        assert main(["rollout", str(cfg_path), "--reference"]) == 0
        assert main(["rollout", str(cfg_path), "--checkpoint",
                     str(out / "model.ckpt")]) == 0
        assert main(["compare", "--true-prefix", str(out / "true"),
                     "--learned-prefix", str(out / "learned"),
                     "--times", "5", "--out", str(out / "det.report")]) == 0
        names = ["dataset.ds", "model.ckpt", "true_A_000000.snap",
                 "learned_A_000000.snap", "det.report"]
        return {n: (out / n).read_bytes() for n in names}

    first = run_all()
    second = run_all()
    same = all(first[k] == second[k] for k in first)
    report("pipeline-determinism", same,
           f"{len(first)} artifact kinds byte-identical across reruns")
