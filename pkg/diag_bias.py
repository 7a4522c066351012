"""Where does the averaged model's closed-loop drift come from?"""
import numpy as np
from sweep_tail2 import build_data, closed_loop
from sweep_zinit import train_avg_zinit
from chartfree.learn import MlpConfig, TrainConfig, forward
from chartfree.models import PksParams, normalization, scenario_ic, scenario_grid
from chartfree.engine import ReferenceRhs, LearnedRhs, rollout, mse_compare
import chartfree as cf

data = build_data(range(12), 20240)
final, avgs, loss = train_avg_zinit(
    data, MlpConfig(n_neurons=32, seed=5),
    TrainConfig(epochs=500, batch_size=8192, seed=5), tails=(50,), zero_out=False)
mlp = avgs[50]

# quiet-slice bias map: uniform A, uniform B -> net vs exact reaction
p = PksParams()
A = np.linspace(0.05, 0.95, 19)   # normalized
B = np.linspace(0.01, 0.08, 8)
rows = []
for a in A:
    for b in B:
        rows.append([a, 0.0, 0.0, b, 0.0, 0.0, 0.0])
rows = np.array(rows)
pred = forward(mlp, rows)
araw = rows[:, 0] * 30.0
braw = rows[:, 3]
true_dta = -(araw / (1 + araw)) * (braw / (1 + braw)) / 30.0
true_dtb = p.alpha * braw
errA = pred[:, 0] - true_dta
errB = pred[:, 1] - true_dtb
print(f"quiet-slice dtA bias: rms={np.sqrt((errA**2).mean()):.2e} max={np.abs(errA).max():.2e}")
print(f"quiet-slice dtB bias: rms={np.sqrt((errB**2).mean()):.2e} max={np.abs(errB).max():.2e}")

# error structure of the actual rollout at t=500
norms = normalization("pks")
test_grid = scenario_grid("pks_test_1d")
ic = scenario_ic("pks_test_1d", test_grid)
true_norm = rollout(ic, ReferenceRhs("pks"), 0.1, 500.0, snapshot_stride=100,
                    system="pks").scaled(norms)
ic_norm = (cf.ScalarField(test_grid, ic[0].values / norms[0]),
           cf.ScalarField(test_grid, ic[1].values / norms[1]))
learned = rollout(ic_norm, LearnedRhs(mlp, norms), 0.1, 500.0, snapshot_stride=100,
                  source="learned", system="pks")
for k in (10, 30, 50):
    errf = learned.states[k, 0] - true_norm.states[k, 0]
    mean, std = errf.mean(), errf.std()
    print(f"t={true_norm.times[k]:5.0f}: A err mean={mean:+.2e} std={std:.2e} "
          f"(uniform fraction {mean**2/ (mean**2+std**2):.2f})")
mA, mB = closed_loop(mlp)
print(f"closed loop: A={mA:.2e} B={mB:.2e}")
