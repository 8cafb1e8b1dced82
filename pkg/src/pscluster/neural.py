"""Minimal feed-forward network engine with explicit backpropagation.

Covers the two architectures this package needs: the embedding regressor
(three ReLU hidden layers, identity output) and the dense autoencoder
whose 49-wide bottleneck supplies image codes.  Loss is always the mean
squared error over every output entry.  Training is single-threaded and,
for a fixed seed, bit-deterministic: weight init, batch order, and the
optimizer all derive from splitmix64 streams.

The learning-rate schedule is halve-on-increase with a tolerance band:
after each epoch the full-data MSE is evaluated.  Epochs that beat the
best loss so far are accepted (and let the rate recover by 25% up to its
configured value); epochs within 5% of the best are tolerated so the
optimizer can traverse noisy plateaus; anything worse is undone
(parameters and optimizer state restored to the best) and the rate is
halved.  Training ends on the best parameters seen, and the recorded loss
curve holds the best full-data MSE per epoch, which is non-increasing by
construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .dataio import as_matrix
from .errors import TrainingDivergedError
from .rng import SplitMix64, derive

logger = logging.getLogger(__name__)

_ACTIVATIONS = ("relu", "identity")

# interior widths of the dense image autoencoder (28x28 inputs -> 49 codes)
AE_INTERIOR = (1568, 784, 392, 49, 392, 784, 1568)

# learning rate below this aborts the halving loop
_MIN_LR = 1e-12
# relative loss increase tolerated before an epoch is rolled back
_TOLERANCE_BAND = 0.05


@dataclass
class MlpConfig:
    """Layer widths (input first, output last) and per-layer activations."""

    layer_widths: tuple
    activations: tuple

    def __post_init__(self):
        self.layer_widths = tuple(int(w) for w in self.layer_widths)
        self.activations = tuple(self.activations)
        if len(self.layer_widths) < 2:
            raise ValueError("need at least input and output widths")
        if any(w < 1 for w in self.layer_widths):
            raise ValueError(f"all widths must be >= 1: {self.layer_widths}")
        if len(self.activations) != len(self.layer_widths) - 1:
            raise ValueError(
                f"{len(self.layer_widths) - 1} layers need that many activations, "
                f"got {len(self.activations)}"
            )
        for a in self.activations:
            if a not in _ACTIVATIONS:
                raise ValueError(f"unknown activation {a!r}")

    @property
    def input_width(self) -> int:
        return self.layer_widths[0]

    @property
    def output_width(self) -> int:
        return self.layer_widths[-1]


def regressor_config(d: int, hidden, p: int) -> MlpConfig:
    """ReLU-hidden, identity-output regressor config: d -> hidden... -> p."""
    hidden = tuple(int(h) for h in hidden)
    widths = (d, *hidden, p)
    return MlpConfig(widths, ("relu",) * len(hidden) + ("identity",))


def ae_config(d: int) -> MlpConfig:
    """Dense autoencoder config: d through the fixed interior to 49 and back.

    ReLU on all layers except the bottleneck and the reconstruction output,
    which are linear.
    """
    widths = (d, *AE_INTERIOR, d)
    acts = ("relu", "relu", "relu", "identity", "relu", "relu", "relu", "identity")
    return MlpConfig(widths, acts)


@dataclass
class Mlp:
    weights: list
    biases: list
    config: MlpConfig

    @property
    def n_layers(self) -> int:
        return len(self.weights)


@dataclass
class TrainHyperparams:
    epochs: int = 200
    batch_size: int = 64
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


def init_mlp(config: MlpConfig, seed: int) -> Mlp:
    """He-style init: N(0, 2/fan_in) weights, zero biases."""
    rng = SplitMix64(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(config.layer_widths[:-1], config.layer_widths[1:]):
        scale = np.sqrt(2.0 / fan_in)
        weights.append(scale * rng.normal_matrix(fan_in, fan_out))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return Mlp(weights=weights, biases=biases, config=config)


def _check_batch(model: Mlp, batch: np.ndarray) -> np.ndarray:
    X = as_matrix(batch, allow_empty=True)
    if X.shape[1] != model.config.input_width:
        raise ValueError(
            f"batch width {X.shape[1]} != network input width "
            f"{model.config.input_width}"
        )
    return X


def forward(model: Mlp, batch) -> np.ndarray:
    """Pure forward pass; returns the (b, output_width) activations."""
    a = _check_batch(model, batch)
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        a = a @ W + b
        if model.config.activations[i] == "relu":
            np.maximum(a, 0.0, out=a)
    return a


def _forward_memory(model: Mlp, X):
    """Forward pass retaining pre-activations for backprop."""
    pre = []
    acts = [X]
    a = X
    for i, (W, b) in enumerate(zip(model.weights, model.biases)):
        z = a @ W + b
        pre.append(z)
        a = np.maximum(z, 0.0) if model.config.activations[i] == "relu" else z
        acts.append(a)
    return pre, acts


def mse(model: Mlp, inputs, targets) -> float:
    """Mean squared error over every output entry."""
    out = forward(model, inputs)
    return float(np.mean((out - np.asarray(targets, dtype=np.float64)) ** 2))


def gradient(model: Mlp, batch, targets):
    """Analytic gradient of the batch MSE w.r.t. every weight and bias.

    Returns (weight_grads, bias_grads) shaped like the parameters.
    """
    X = _check_batch(model, batch)
    Y = np.asarray(targets, dtype=np.float64)
    if Y.shape != (X.shape[0], model.config.output_width):
        raise ValueError(
            f"target shape {Y.shape} != ({X.shape[0]}, {model.config.output_width})"
        )
    pre, acts = _forward_memory(model, X)
    g = 2.0 * (acts[-1] - Y) / Y.size
    weight_grads = [None] * model.n_layers
    bias_grads = [None] * model.n_layers
    for i in reversed(range(model.n_layers)):
        if model.config.activations[i] == "relu":
            g = g * (pre[i] > 0)
        weight_grads[i] = acts[i].T @ g
        bias_grads[i] = g.sum(axis=0)
        if i > 0:
            g = g @ model.weights[i].T
    return weight_grads, bias_grads


class _Adam:
    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params, grads, lr):
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)

    def snapshot(self):
        return self.t, [m.copy() for m in self.m], [v.copy() for v in self.v]

    def restore(self, snap):
        self.t, m, v = snap[0], [a.copy() for a in snap[1]], [a.copy() for a in snap[2]]
        self.m, self.v = m, v


class _Sgd:
    def step(self, params, grads, lr):
        for p, g in zip(params, grads):
            p -= lr * g

    def snapshot(self):
        return None

    def restore(self, snap):
        pass


def train_mlp(model: Mlp, inputs, targets, hp: TrainHyperparams):
    """Train `model` in place on (inputs -> targets); returns the loss curve.

    The curve holds the recorded full-data MSE after each epoch and is
    non-increasing (worse epochs are rolled back, see module docstring).
    """
    X = as_matrix(inputs)
    Y = np.asarray(targets, dtype=np.float64)
    if Y.ndim != 2 or Y.shape != (X.shape[0], model.config.output_width):
        raise ValueError(
            f"targets must be ({X.shape[0]}, {model.config.output_width}), "
            f"got {Y.shape}"
        )
    params = model.weights + model.biases
    opt = _Adam(params) if hp.optimizer == "adam" else _Sgd()
    batch_rng = SplitMix64(derive(hp.seed, 1))
    lr = hp.learning_rate
    n = X.shape[0]

    best_loss = mse(model, X, Y)
    best = ([p.copy() for p in params], opt.snapshot())
    curve = [best_loss]
    for _ in range(hp.epochs):
        order = batch_rng.permutation(n)
        for start in range(0, n, hp.batch_size):
            idx = order[start : start + hp.batch_size]
            gw, gb = gradient(model, X[idx], Y[idx])
            opt.step(params, gw + gb, lr)
        loss = mse(model, X, Y)
        if not np.isfinite(loss):
            raise TrainingDivergedError(
                f"training loss became non-finite (last good {best_loss:.6g})"
            )
        if loss <= best_loss:
            best_loss = loss
            best = ([p.copy() for p in params], opt.snapshot())
            lr = min(lr * 1.25, hp.learning_rate)
        elif loss > best_loss * (1.0 + _TOLERANCE_BAND):
            # real regression: undo back to the best state and halve the rate
            for p, saved in zip(params, best[0]):
                p[...] = saved
            opt.restore(best[1])
            lr *= 0.5
        # within the band: keep going at the same rate
        curve.append(best_loss)
        if lr < _MIN_LR:
            break
    for p, saved in zip(params, best[0]):
        p[...] = saved
    return curve


def train_regressor(inputs, targets, config: MlpConfig, hp: TrainHyperparams) -> Mlp:
    """Fit a fresh network mapping inputs to real-valued targets."""
    Y = np.asarray(targets, dtype=np.float64)
    if Y.ndim != 2:
        raise ValueError(f"targets must be 2-D, got shape {Y.shape}")
    if config.output_width != Y.shape[1]:
        raise ValueError(
            f"config output width {config.output_width} != target width {Y.shape[1]}"
        )
    model = init_mlp(config, derive(hp.seed, 0))
    curve = train_mlp(model, inputs, Y, hp)
    logger.info("regressor trained: final MSE %.6g over %d epochs", curve[-1],
                len(curve) - 1)
    return model


def train_autoencoder(inputs, config: MlpConfig, hp: TrainHyperparams) -> Mlp:
    """Fit an autoencoder (targets = inputs, expected scaled to [0, 1])."""
    X = as_matrix(inputs)
    if config.input_width != X.shape[1] or config.output_width != X.shape[1]:
        raise ValueError(
            f"autoencoder widths {config.layer_widths} do not match input "
            f"width {X.shape[1]}"
        )
    if X.min() < 0.0 or X.max() > 1.0:
        raise ValueError("autoencoder inputs must be scaled to [0, 1]")
    model = init_mlp(config, derive(hp.seed, 0))
    curve = train_mlp(model, X, X, hp)
    logger.info("autoencoder trained: final MSE %.6g over %d epochs", curve[-1],
                len(curve) - 1)
    return model


def encoder_part(model: Mlp) -> Mlp:
    """The layers up to and including the narrowest (bottleneck) one."""
    widths = model.config.layer_widths
    cut = int(np.argmin(widths[1:])) + 1  # first narrowest non-input width
    if cut == len(widths) - 1:
        raise ValueError("network has no interior bottleneck")
    cfg = MlpConfig(widths[: cut + 1], model.config.activations[:cut])
    return Mlp(weights=model.weights[:cut], biases=model.biases[:cut], config=cfg)


def encode(encoder: Mlp, batch) -> np.ndarray:
    """Forward through an encoder network; rows become code vectors."""
    return forward(encoder, batch)
