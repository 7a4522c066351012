"""Scratch: small batches + iterate averaging."""
import sys, time
import numpy as np
from sweep_tail2 import build_data, train_avg, closed_loop
from chartfree.learn import MlpConfig, TrainConfig

if __name__ == "__main__":
    lane = sys.argv[1]
    data = build_data(range(12), 20240)
    jobs = {"a": [(2048, 20240), (2048, 777)],
            "b": [(512, 20240), (1024, 777)]}[lane]
    for bs, seed in jobs:
        t0 = time.time()
        final, avgs = train_avg(data, MlpConfig(n_neurons=32, seed=seed),
                                TrainConfig(epochs=500, batch_size=bs, seed=seed),
                                tails=(20, 100))
        msg = [f"bs={bs} seed={seed} {time.time()-t0:.0f}s"]
        fA, fB = closed_loop(final)
        msg.append(f"final A={fA:.2e}")
        for t, m in avgs.items():
            a, b = closed_loop(m)
            msg.append(f"tail{t} A={a:.2e}/B={b:.2e}")
        print("  ".join(msg), flush=True)
