import sys, time
import numpy as np
from sweep_tail2 import build_data, closed_loop
from sweep_zinit import train_avg_zinit
from chartfree.learn import MlpConfig, TrainConfig

if __name__ == "__main__":
    lane = sys.argv[1]
    data = build_data(range(12), 20240)
    jobs = {"a": [(0.9, 0.9999, 20240), (0.9, 0.9999, 777)],
            "b": [(0.95, 0.9999, 20240), (0.9, 0.99999, 5)]}[lane]
    for b1, b2, seed in jobs:
        t0 = time.time()
        final, avgs, loss = train_avg_zinit(
            data, MlpConfig(n_neurons=32, seed=seed),
            TrainConfig(epochs=500, batch_size=8192, seed=seed,
                        beta1=b1, beta2=b2), tails=(50,), zero_out=False)
        fA, fB = closed_loop(final)
        aA, aB = closed_loop(avgs[50])
        print(f"b1={b1} b2={b2} seed={seed}: {time.time()-t0:.0f}s "
              f"final A={fA:.2e} tail50 A={aA:.2e}/B={aB:.2e}", flush=True)
