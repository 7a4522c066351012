"""Scratch: tail-average length sweep, averaging every minibatch iterate."""
import sys
import time
import numpy as np
import chartfree as cf
from chartfree.engine import ReferenceRhs, LearnedRhs, rollout, mse_compare
from chartfree.learn import (Dataset, Mlp, MlpConfig, TrainConfig, adam_step,
                             init_mlp, loss_and_gradient, subsample, time_targets)
from chartfree.models import normalization, scenario_ic, scenario_grid
from chartfree.prng import Stream


def build_data(members, seed):
    grid = scenario_grid("pks_train_1d_desk")
    norms = normalization("pks")
    parts = []
    for j in members:
        ic = scenario_ic("pks_train_1d_desk", grid, member=j)
        traj = rollout(ic, ReferenceRhs("pks"), 0.1, 500.0, snapshot_stride=1,
                       system="pks").scaled(norms)
        parts.append(subsample(time_targets(traj, 0.1), 0.02, seed + j))
    return Dataset(np.concatenate([p.features for p in parts]),
                   np.concatenate([p.targets for p in parts]))


def train_avg(data, mlp_cfg, cfg, tails):
    """tails: list of epoch counts; returns dict tail->Mlp averaged over all
    minibatch iterates of the last `tail` epochs, plus the final iterate."""
    mlp = init_mlp(mlp_cfg)
    shuffle_root = Stream(cfg.seed, "shuffle")
    x, y = data.features, data.targets
    acc = {t: None for t in tails}
    cnt = {t: 0 for t in tails}
    for epoch in range(cfg.epochs):
        perm = shuffle_root.split(str(epoch)).permutation(len(x))
        for start in range(0, len(x), cfg.batch_size):
            sel = perm[start:start + cfg.batch_size]
            _, gw, gb = loss_and_gradient(mlp, x[sel], y[sel])
            adam_step(mlp, gw, gb, cfg)
            for t in tails:
                if epoch >= cfg.epochs - t:
                    if acc[t] is None:
                        acc[t] = [p.copy() for p in mlp.weights + mlp.biases]
                    else:
                        for a, p in zip(acc[t], mlp.weights + mlp.biases):
                            a += p
                    cnt[t] += 1
    out = {}
    nl = len(mlp.weights)
    for t in tails:
        ws = [a / cnt[t] for a in acc[t][:nl]]
        bs = [a / cnt[t] for a in acc[t][nl:]]
        out[t] = Mlp(mlp.widths, ws, bs)
    return mlp, out


def closed_loop(mlp):
    norms = normalization("pks")
    test_grid = scenario_grid("pks_test_1d")
    ic = scenario_ic("pks_test_1d", test_grid)
    true_norm = rollout(ic, ReferenceRhs("pks"), 0.1, 500.0, snapshot_stride=100,
                        system="pks").scaled(norms)
    ic_norm = (cf.ScalarField(test_grid, ic[0].values / norms[0]),
               cf.ScalarField(test_grid, ic[1].values / norms[1]))
    learned = rollout(ic_norm, LearnedRhs(mlp, norms), 0.1, 500.0,
                      snapshot_stride=100, source="learned", system="pks")
    recs = mse_compare(true_norm, learned, true_norm.times, field_names=("A", "B"))
    return (max(r.mse for r in recs if r.field == "A"),
            max(r.mse for r in recs if r.field == "B"))


if __name__ == "__main__":
    lane = sys.argv[1]
    data = build_data(range(12), 20240)
    seeds = {"a": (20240, 777), "b": (9, 5), "c": (31, 101)}[lane]
    for seed in seeds:
        t0 = time.time()
        final, avgs = train_avg(data, MlpConfig(n_neurons=32, seed=seed),
                                TrainConfig(epochs=500, batch_size=8192, seed=seed),
                                tails=(5, 20, 50))
        msg = [f"seed={seed} {time.time()-t0:.0f}s"]
        fA, fB = closed_loop(final)
        msg.append(f"final A={fA:.2e}/B={fB:.2e}")
        for t, m in avgs.items():
            a, b = closed_loop(m)
            msg.append(f"tail{t} A={a:.2e}/B={b:.2e}")
        print("  ".join(msg), flush=True)
