"""Feasibility probe: can ANY 7-32-32-2 tanh net reach closed-loop 1e-3?
Long Adam run with cosine decay, far beyond the pinned budget."""
import time
import numpy as np
import torch
from sweep_tail2 import build_data, closed_loop
from chartfree.learn import Mlp

t0 = time.time()
data = build_data(range(12), 20240)
x = torch.tensor(data.features)
y = torch.tensor(data.targets)
torch.manual_seed(0)
net = torch.nn.Sequential(
    torch.nn.Linear(7, 32), torch.nn.Tanh(),
    torch.nn.Linear(32, 32), torch.nn.Tanh(),
    torch.nn.Linear(32, 2)).double()
opt = torch.optim.Adam(net.parameters(), lr=5e-4)
steps = 120_000
sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=steps)
n = len(x)
g = torch.Generator().manual_seed(1)
for step in range(steps):
    idx = torch.randint(0, n, (8192,), generator=g)
    opt.zero_grad()
    loss = torch.mean((net(x[idx]) - y[idx]) ** 2)
    loss.backward()
    opt.step()
    sched.step()
    if step % 20000 == 0:
        print(f"step {step} loss {loss.item():.3e} ({time.time()-t0:.0f}s)", flush=True)

with torch.no_grad():
    full = torch.mean((net(x) - y) ** 2).item()
print(f"final full loss {full:.3e}", flush=True)

ws, bs = [], []
for m in net:
    if isinstance(m, torch.nn.Linear):
        ws.append(m.weight.detach().numpy().T.copy())
        bs.append(m.bias.detach().numpy().copy())
mlp = Mlp((7, 32, 32, 2), ws, bs)
mA, mB = closed_loop(mlp)
print(f"torch-probe closed loop: A={mA:.3e} B={mB:.3e} ({time.time()-t0:.0f}s)")
