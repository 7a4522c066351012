"""Scratch: does tail-averaging the Adam iterates stabilize the closed loop?"""
import sys
import time
import copy
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

def train_tail(data, mlp_cfg, cfg, tail_epochs):
    mlp = init_mlp(mlp_cfg)
    shuffle_root = Stream(cfg.seed, "shuffle")
    x, y = data.features, data.targets
    avg_w = avg_b = None
    count = 0
    for epoch in range(cfg.epochs):
        perm = shuffle_root.split(str(epoch)).permutation(len(x))
        for start in range(0, len(x), cfg.batch_size):
            sel = perm[start:start + cfg.batch_size]
            loss, gw, gb = loss_and_gradient(mlp, x[sel], y[sel])
            adam_step(mlp, gw, gb, cfg)
        if epoch >= cfg.epochs - tail_epochs:
            if avg_w is None:
                avg_w = [w.copy() for w in mlp.weights]
                avg_b = [b.copy() for b in mlp.biases]
            else:
                for a, w in zip(avg_w + avg_b, mlp.weights + mlp.biases):
                    a += w
            count += 1
    tail = Mlp(mlp.widths, [w / count for w in avg_w], [b / count for b in avg_b])
    return mlp, tail, loss

def closed_loop(mlp):
    norms = normalization("pks")
    test_grid = scenario_grid("pks_test_1d")
    ic = scenario_ic("pks_test_1d", test_grid)
    true_norm = rollout(ic, ReferenceRhs("pks"), 0.1, 500.0, snapshot_stride=100,
                        system="pks").scaled(norms)
    ic_norm = (cf.ScalarField(test_grid, ic[0].values / norms[0]),
               cf.ScalarField(test_grid, ic[1].values / norms[1]))
    learned = rollout(ic_norm, LearnedRhs(mlp, norms), 0.1, 500.0, snapshot_stride=100,
                      source="learned", system="pks")
    recs = mse_compare(true_norm, learned, true_norm.times, field_names=("A", "B"))
    return (max(r.mse for r in recs if r.field == "A"),
            max(r.mse for r in recs if r.field == "B"))

if __name__ == "__main__":
    lane = sys.argv[1]
    data = build_data(range(12), 20240)
    jobs = {
        "a": [(8192, 20240, 100), (8192, 777, 100)],
        "b": [(4096, 20240, 100), (2048, 20240, 100)],
        "c": [(8192, 9, 100), (4096, 777, 100)],
    }[lane]
    for bs, seed, tail_n in jobs:
        t0 = time.time()
        final, tail, loss = train_tail(
            data, MlpConfig(n_neurons=32, seed=seed),
            TrainConfig(epochs=500, batch_size=bs, seed=seed), tail_n)
        fA, fB = closed_loop(final)
        tA, tB = closed_loop(tail)
        print(f"bs={bs} seed={seed}: {time.time()-t0:.0f}s loss={loss:.1e} "
              f"final A={fA:.2e} B={fB:.2e} | tail{tail_n} A={tA:.2e} B={tB:.2e}",
              flush=True)
