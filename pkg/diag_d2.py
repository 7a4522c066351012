import time
import numpy as np
from sweep_tail2 import build_data, closed_loop
from sweep_zinit import train_avg_zinit
from chartfree.learn import MlpConfig, TrainConfig

data = build_data(range(12), 20240)
for n in (64, 32):
    t0 = time.time()
    final, avgs, loss = train_avg_zinit(
        data, MlpConfig(n_neurons=n, seed=20240),
        TrainConfig(epochs=500, batch_size=8192, seed=20240), tails=(50,),
        zero_out=False)
    fA, fB = closed_loop(final)
    aA, aB = closed_loop(avgs[50])
    print(f"n={n}: {time.time()-t0:.0f}s loss={loss:.2e} final A={fA:.2e} "
          f"tail50 A={aA:.2e}/B={aB:.2e}", flush=True)
