"""Scratch: zero-init of the output layer + iterate averaging."""
import sys, time
import numpy as np
from sweep_tail2 import build_data, closed_loop
from chartfree.learn import Mlp, MlpConfig, TrainConfig, adam_step, init_mlp, loss_and_gradient
from chartfree.prng import Stream

def train_avg_zinit(data, mlp_cfg, cfg, tails, zero_out=True):
    mlp = init_mlp(mlp_cfg)
    if zero_out:
        mlp.weights[-1][:] = 0.0
        mlp.biases[-1][:] = 0.0
    shuffle_root = Stream(cfg.seed, "shuffle")
    x, y = data.features, data.targets
    acc = {t: None for t in tails}; cnt = {t: 0 for t in tails}
    loss = None
    for epoch in range(cfg.epochs):
        perm = shuffle_root.split(str(epoch)).permutation(len(x))
        for start in range(0, len(x), cfg.batch_size):
            sel = perm[start:start + cfg.batch_size]
            loss, gw, gb = loss_and_gradient(mlp, x[sel], y[sel])
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
        out[t] = Mlp(mlp.widths, [a / cnt[t] for a in acc[t][:nl]],
                     [a / cnt[t] for a in acc[t][nl:]])
    return mlp, out, loss

if __name__ == "__main__":
    lane = sys.argv[1]
    data = build_data(range(12), 20240)
    seeds = {"a": (20240, 777), "b": (9, 5)}[lane]
    for seed in seeds:
        t0 = time.time()
        final, avgs, loss = train_avg_zinit(
            data, MlpConfig(n_neurons=32, seed=seed),
            TrainConfig(epochs=500, batch_size=8192, seed=seed), tails=(20, 50))
        msg = [f"zinit seed={seed} {time.time()-t0:.0f}s loss={loss:.1e}"]
        fA, fB = closed_loop(final)
        msg.append(f"final A={fA:.2e}")
        for t, m in avgs.items():
            a, b = closed_loop(m)
            msg.append(f"tail{t} A={a:.2e}/B={b:.2e}")
        print("  ".join(msg), flush=True)
