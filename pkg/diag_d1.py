import time
import numpy as np
from sweep_tail2 import closed_loop
from sweep_zinit import train_avg_zinit
from chartfree.learn import Dataset, MlpConfig, TrainConfig, subsample, time_targets
from chartfree.models import normalization, scenario_ic, scenario_grid
from chartfree.engine import ReferenceRhs, rollout

t0 = time.time()
grid = scenario_grid("pks_train_1d")
norms = normalization("pks")
parts = []
for j in range(60):
    ic = scenario_ic("pks_train_1d", grid, member=j)
    traj = rollout(ic, ReferenceRhs("pks"), 0.1, 500.0, snapshot_stride=1,
                   system="pks").scaled(norms)
    parts.append(subsample(time_targets(traj, 0.1), 0.02, 20240 + j))
data = Dataset(np.concatenate([p.features for p in parts]),
               np.concatenate([p.targets for p in parts]))
print(f"gen60: {time.time()-t0:.0f}s rows={len(data)}", flush=True)
final, avgs, loss = train_avg_zinit(
    data, MlpConfig(n_neurons=32, seed=20240),
    TrainConfig(epochs=500, batch_size=8192, seed=20240), tails=(50,), zero_out=False)
fA, fB = closed_loop(final)
aA, aB = closed_loop(avgs[50])
print(f"full60: {time.time()-t0:.0f}s loss={loss:.2e} final A={fA:.2e} "
      f"tail50 A={aA:.2e}/B={aB:.2e}", flush=True)
