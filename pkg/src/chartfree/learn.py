"""Dataset assembly, the small fully connected network, and Adam training.

The network maps the 7 invariant features to the two field time derivatives:
affine -> tanh -> affine -> tanh -> affine, all float64.  Everything that
draws randomness (init, shuffling, subsampling) goes through named
counter-based streams, so a fixed seed reproduces training bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .prng import Stream


class LearnError(ValueError):
    pass


class TrainingDiverged(LearnError):
    def __init__(self, epoch: int):
        super().__init__(f"loss became non-finite at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class MlpConfig:
    n_neurons: int = 32
    n_inputs: int = 7
    n_outputs: int = 2
    seed: int = 0

    @property
    def layer_widths(self) -> tuple[int, ...]:
        return (self.n_inputs, self.n_neurons, self.n_neurons, self.n_outputs)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 5e-4
    epochs: int = 2000
    batch_size: int = 8192
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    seed: int = 0
    # when > 0, the returned weights are the mean over every minibatch
    # iterate of the last this-many epochs; constant-step Adam never settles,
    # and rolling the jittery final iterate out over thousands of steps is
    # erratic, while the averaged iterate is reliably smooth
    average_tail_epochs: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise LearnError("learning_rate > 0, epochs >= 1, batch_size >= 1 required")
        if not 0 <= self.average_tail_epochs <= self.epochs:
            raise LearnError("average_tail_epochs must be in [0, epochs]")


@dataclass
class Mlp:
    """Weights/biases per layer plus Adam moment state."""

    widths: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    m_w: list[np.ndarray] = field(default_factory=list)
    v_w: list[np.ndarray] = field(default_factory=list)
    m_b: list[np.ndarray] = field(default_factory=list)
    v_b: list[np.ndarray] = field(default_factory=list)
    step: int = 0

    def __post_init__(self):
        if not self.m_w:
            self.m_w = [np.zeros_like(w) for w in self.weights]
            self.v_w = [np.zeros_like(w) for w in self.weights]
            self.m_b = [np.zeros_like(b) for b in self.biases]
            self.v_b = [np.zeros_like(b) for b in self.biases]


def init_mlp(cfg: MlpConfig) -> Mlp:
    """Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer; zero biases."""
    stream = Stream(cfg.seed, "init")
    weights, biases = [], []
    w = cfg.layer_widths
    for lo, hi in zip(w[:-1], w[1:]):
        scale = 1.0 / np.sqrt(lo)
        weights.append(stream.uniform(lo * hi, -scale, scale).reshape(lo, hi))
        biases.append(np.zeros(hi))
    return Mlp(w, weights, biases)


def forward(mlp: Mlp, x: np.ndarray) -> np.ndarray:
    """Predictions for a (rows, 7) batch or a single 7-vector."""
    single = x.ndim == 1
    a = np.atleast_2d(np.asarray(x, dtype=np.float64))
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        a = a @ w + b
        if i != last:
            a = np.tanh(a)
    return a[0] if single else a


def _row_losses(pred: np.ndarray, targets: np.ndarray) -> np.ndarray:
    d = pred - targets
    return (d * d).mean(axis=1)


def batch_loss(mlp: Mlp, x: np.ndarray, y: np.ndarray) -> float:
    """Mean squared error over rows and outputs.

    Per-row losses are sorted before the final reduction, so the value is
    bitwise independent of row order.
    """
    return float(np.sort(_row_losses(forward(mlp, x), y), kind="stable").sum() / len(x))


def loss_and_gradient(mlp: Mlp, x: np.ndarray, y: np.ndarray):
    """Loss plus reverse-mode gradients for every weight and bias."""
    if len(x) == 0:
        raise LearnError("empty batch")
    acts = [np.asarray(x, dtype=np.float64)]
    last = len(mlp.weights) - 1
    a = acts[0]
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        a = a @ w + b
        if i != last:
            a = np.tanh(a)
        acts.append(a)
    rows = len(x)
    diff = acts[-1] - y
    loss = float(np.sort(_row_losses(acts[-1], y), kind="stable").sum() / rows)

    # d loss / d pred for loss = sum(d^2) / (rows * n_out)
    delta = 2.0 * diff / (rows * y.shape[1])
    grads_w = [None] * len(mlp.weights)
    grads_b = [None] * len(mlp.weights)
    for i in range(last, -1, -1):
        grads_w[i] = acts[i].T @ delta
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ mlp.weights[i].T) * (1.0 - acts[i] ** 2)
    return loss, grads_w, grads_b


def adam_step(mlp: Mlp, grads_w, grads_b, cfg: TrainConfig) -> None:
    """One in-place Adam update with bias correction."""
    mlp.step += 1
    t = mlp.step
    c1 = 1.0 - cfg.beta1**t
    c2 = 1.0 - cfg.beta2**t
    for p, g, m, v in zip(mlp.weights + mlp.biases, grads_w + grads_b,
                          mlp.m_w + mlp.m_b, mlp.v_w + mlp.v_b):
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        p -= cfg.learning_rate * (m / c1) / (np.sqrt(v / c2) + cfg.eps_adam)


@dataclass
class Dataset:
    """Feature rows, 2-vector targets, and provenance of how they were made."""

    features: np.ndarray  # (rows, 7)
    targets: np.ndarray  # (rows, 2)
    provenance: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if len(self.features) != len(self.targets):
            raise LearnError("features and targets differ in length")
        if not (np.all(np.isfinite(self.features)) and np.all(np.isfinite(self.targets))):
            raise LearnError("dataset contains non-finite values")

    def __len__(self):
        return len(self.features)


def time_targets(trajectory, dt: float) -> Dataset:
    """Forward-difference targets paired with the features of the earlier state.

    The trajectory must store consecutive steps at uniform spacing dt; the
    target for step k is (psi(k+1) - psi(k)) / dt.
    """
    from .features import build_features

    times = trajectory.times
    if len(times) < 2:
        raise LearnError("need at least two stored steps")
    gaps = np.diff(times)
    if not np.allclose(gaps, dt, rtol=1e-9, atol=1e-12):
        raise LearnError("trajectory steps are not uniformly spaced at dt")
    feats, targs = [], []
    for k in range(len(times) - 1):
        f1, f2 = trajectory.snapshot(k)
        g1, g2 = trajectory.snapshot(k + 1)
        feats.append(build_features(f1, f2).rows())
        targs.append(np.stack([(g1.values - f1.values) / dt,
                               (g2.values - f2.values) / dt], axis=1))
    return Dataset(np.concatenate(feats), np.concatenate(targs))


def subsample(dataset: Dataset, fraction: float, seed: int) -> Dataset:
    """Uniform selection without replacement of round(fraction * rows) rows.

    Selected rows keep their original order; fraction 1 is the identity.
    """
    if not 0.0 < fraction <= 1.0:
        raise LearnError("fraction must be in (0, 1]")
    if len(dataset) == 0:
        raise LearnError("empty dataset")
    k = int(round(fraction * len(dataset)))
    idx = Stream(seed, "subsample").choice_sorted(len(dataset), k)
    prov = dict(dataset.provenance)
    prov["subsample_fraction"] = repr(fraction)
    prov["subsample_seed"] = str(seed)
    return Dataset(dataset.features[idx], dataset.targets[idx], prov)


def train(dataset: Dataset, mlp_cfg: MlpConfig, train_cfg: TrainConfig):
    """Mini-batch Adam over seeded shuffles; returns (model, per-epoch loss log)."""
    if len(dataset) == 0:
        raise LearnError("empty dataset")
    mlp = init_mlp(mlp_cfg)
    shuffle_root = Stream(train_cfg.seed, "shuffle")
    x, y = dataset.features, dataset.targets
    losses = np.empty(train_cfg.epochs)
    tail = train_cfg.average_tail_epochs
    acc, count = None, 0
    for epoch in range(train_cfg.epochs):
        perm = shuffle_root.split(str(epoch)).permutation(len(x))
        epoch_losses = []
        in_tail = tail > 0 and epoch >= train_cfg.epochs - tail
        for start in range(0, len(x), train_cfg.batch_size):
            sel = perm[start:start + train_cfg.batch_size]
            loss, gw, gb = loss_and_gradient(mlp, x[sel], y[sel])
            if not np.isfinite(loss):
                raise TrainingDiverged(epoch)
            adam_step(mlp, gw, gb, train_cfg)
            epoch_losses.append(loss)
            if in_tail:
                if acc is None:
                    acc = [p.copy() for p in mlp.weights + mlp.biases]
                else:
                    for a, p in zip(acc, mlp.weights + mlp.biases):
                        a += p
                count += 1
        losses[epoch] = float(np.mean(epoch_losses))
    if acc is not None:
        for p, a in zip(mlp.weights + mlp.biases, acc):
            p[:] = a / count
    return mlp, losses
