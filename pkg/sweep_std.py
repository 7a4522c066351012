"""Scratch: input standardization effect on the PKS closed loop."""
import sys
import time
import numpy as np
import chartfree as cf
from chartfree.engine import ReferenceRhs, rollout, mse_compare, resample
from chartfree.learn import (Dataset, Mlp, MlpConfig, TrainConfig, adam_step,
                             init_mlp, loss_and_gradient, subsample, time_targets)
from chartfree.models import normalization, scenario_ic, scenario_grid
from chartfree.features import build_features
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


def train_std(data, mlp_cfg, cfg):
    shift = data.features.mean(axis=0)
    scale = data.features.std(axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    x = (data.features - shift) / scale
    y = data.targets
    mlp = init_mlp(mlp_cfg)
    shuffle_root = Stream(cfg.seed, "shuffle")
    loss = None
    for epoch in range(cfg.epochs):
        perm = shuffle_root.split(str(epoch)).permutation(len(x))
        for start in range(0, len(x), cfg.batch_size):
            sel = perm[start:start + cfg.batch_size]
            loss, gw, gb = loss_and_gradient(mlp, x[sel], y[sel])
            adam_step(mlp, gw, gb, cfg)
    return mlp, shift, scale, loss


class StdRhs:
    def __init__(self, mlp, shift, scale):
        self.mlp, self.shift, self.scale = mlp, shift, scale

    def evaluate(self, batch):
        from chartfree.learn import forward
        x = (batch.rows() - self.shift) / self.scale
        out = forward(self.mlp, x)
        return out[:, 0], out[:, 1]


def closed_loop(rhs):
    norms = normalization("pks")
    test_grid = scenario_grid("pks_test_1d")
    ic = scenario_ic("pks_test_1d", test_grid)
    true_norm = rollout(ic, ReferenceRhs("pks"), 0.1, 500.0, snapshot_stride=100,
                        system="pks").scaled(norms)
    ic_norm = (cf.ScalarField(test_grid, ic[0].values / norms[0]),
               cf.ScalarField(test_grid, ic[1].values / norms[1]))
    learned = rollout(ic_norm, rhs, 0.1, 500.0, snapshot_stride=100,
                      source="learned", system="pks")
    recs = mse_compare(true_norm, learned, true_norm.times, field_names=("A", "B"))
    return (max(r.mse for r in recs if r.field == "A"),
            max(r.mse for r in recs if r.field == "B"))


if __name__ == "__main__":
    lane = sys.argv[1]
    data = build_data(range(12), 20240)
    jobs = {"a": [(8192, 20240), (8192, 777)],
            "b": [(8192, 9), (4096, 20240)]}[lane]
    for bs, seed in jobs:
        t0 = time.time()
        mlp, shift, scale, loss = train_std(
            data, MlpConfig(n_neurons=32, seed=seed),
            TrainConfig(epochs=500, batch_size=bs, seed=seed))
        mA, mB = closed_loop(StdRhs(mlp, shift, scale))
        print(f"std bs={bs} seed={seed}: {time.time()-t0:.0f}s loss={loss:.1e} "
              f"A={mA:.2e} B={mB:.2e}", flush=True)
