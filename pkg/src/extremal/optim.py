"""Supervised training of the surrogate network, and parameter freezing.

Training fits the network to a dataset under mean squared error with
minibatch SGD or Adam. Runs are fully deterministic for a fixed seed: the
validation split and every epoch's shuffle come from the packaged
generator, and the returned network is a trained copy (the input network
and dataset are never touched).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import nnet
from .data import Dataset
from .errors import ConfigError, NumericError, ShapeError
from .rng import Rng


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 500
    batch_size: int | str = 32  # positive int, or "full"
    optimizer: str = "adam"  # "adam" | "sgd"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    validation_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be positive")
        if self.epochs < 0:
            raise ConfigError("epochs must be nonnegative")
        if self.batch_size != "full" and (not isinstance(self.batch_size, int) or self.batch_size < 1):
            raise ConfigError(f"batch_size must be a positive integer or 'full', got {self.batch_size!r}")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigError("validation_fraction must lie in [0, 1)")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1 and self.eps > 0):
            raise ConfigError("invalid adam hyperparameters")


@dataclass
class TrainReport:
    """Per-epoch training MSE, held-out MSE, and the epoch count."""

    loss_history: list[float] = field(default_factory=list)
    validation_mse: float | None = None
    epochs_run: int = 0


def train(net: nnet.Network, data: Dataset, cfg: TrainConfig) -> tuple[nnet.Network, TrainReport]:
    """Fit a copy of the network to the dataset; returns (trained, report).

    The epoch loss is the running mean of batch MSEs seen during that
    epoch. A non-finite loss aborts with an error naming the epoch.
    """
    if net.frozen:
        raise ConfigError("cannot train a frozen network")
    if data.n < 1:
        raise ConfigError("cannot train on an empty dataset")
    if data.m != net.input_dim:
        raise ShapeError(f"dataset dimension {data.m} != network input_dim {net.input_dim}")

    rng = Rng(cfg.seed)
    order = list(range(data.n))
    rng.shuffle(order)
    n_val = int(cfg.validation_fraction * data.n)
    val_idx, train_idx = order[:n_val], order[n_val:]
    if not train_idx:
        raise ConfigError("validation split leaves no training data")
    batch = len(train_idx) if cfg.batch_size == "full" else cfg.batch_size
    if batch > len(train_idx):
        raise ConfigError(
            f"batch_size {batch} exceeds the {len(train_idx)} available training samples"
        )

    X = data.inputs[train_idx]
    Y = data.outputs[train_idx]
    model = net.copy()
    params = [p for layer in model.layers for p in (layer.weights, layer.bias)]
    moment1 = [np.zeros_like(p) for p in params]
    moment2 = [np.zeros_like(p) for p in params]
    step = 0

    history: list[float] = []
    n_train = len(train_idx)
    for epoch in range(cfg.epochs):
        idx = list(range(n_train))
        rng.shuffle(idx)
        sq_sum = 0.0
        seen = 0
        try:
            # overflow here is divergence, reported as NumericError below
            with np.errstate(over="ignore", invalid="ignore"):
                for start in range(0, n_train - batch + 1, batch):
                    sel = idx[start : start + batch]
                    Xb, Yb = X[sel], Y[sel]
                    y, cache = nnet._forward_pass(model, Xb)
                    resid = y - Yb
                    sq_sum += float(resid @ resid)
                    seen += len(sel)
                    upstream = (2.0 / len(sel)) * resid
                    grads, _ = nnet._backward_pass(model, cache, upstream)
                    flat = [g for pair in grads for g in pair]
                    step += 1
                    if cfg.optimizer == "sgd":
                        for p, g in zip(params, flat):
                            p -= cfg.learning_rate * g
                    else:
                        for p, g, m1, m2 in zip(params, flat, moment1, moment2):
                            m1 *= cfg.beta1
                            m1 += (1 - cfg.beta1) * g
                            m2 *= cfg.beta2
                            m2 += (1 - cfg.beta2) * g * g
                            mhat = m1 / (1 - cfg.beta1**step)
                            vhat = m2 / (1 - cfg.beta2**step)
                            p -= cfg.learning_rate * mhat / (np.sqrt(vhat) + cfg.eps)
        except NumericError as e:
            raise NumericError(f"training diverged at epoch {epoch}: {e}") from e
        epoch_mse = sq_sum / seen
        if not np.isfinite(epoch_mse):
            raise NumericError(f"training diverged at epoch {epoch}: loss is non-finite")
        history.append(epoch_mse)

    if val_idx:
        pred = nnet.forward_batch(model, data.inputs[val_idx])
        resid = pred - data.outputs[val_idx]
        validation_mse = float(resid @ resid) / len(val_idx)
    else:
        validation_mse = None
    return model, TrainReport(history, validation_mse, cfg.epochs)


def freeze(net: nnet.Network) -> nnet.Network:
    """Frozen copy of the network: same outputs, immutable parameters.

    Already-frozen networks are returned unchanged, so freezing is
    idempotent.
    """
    if net.frozen:
        return net
    return net.copy(frozen=True)
