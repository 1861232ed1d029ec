"""Input-space gradient descent on a frozen network.

This is the heart of the package: the trained network's parameters stay
fixed while the input vector itself is updated, x <- x - alpha * grad_x,
against a composite loss whose minimum encodes the wanted output extremum
plus any penalty constraints. Because fixed-step descent can overshoot
near piecewise penalty boundaries, the best-loss iterate seen is returned
rather than the last one. Multi-start reruns the descent from consecutive
derived seeds and keeps the lowest-loss run, which is the cheap defense
against non-convex landscapes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import nnet
from .data import DataStats, Dataset
from .errors import ConfigError, NumericError, ShapeError
from .losses import CompositeLoss, composite_eval
from .rng import Rng

TRAJECTORY_DENSE_LIMIT = 1000  # record every iterate up to here, then every 10th


@dataclass(frozen=True)
class InitStrategy:
    """How the starting input vector is chosen.

    kinds: "uniform" (per-component U(lo, hi)), "normal_clipped"
    (N(mean, std) clamped into [lo, hi]), "from_data" (row of the training
    set), "explicit" (a given vector).
    """

    kind: str
    lo: float = -1.0
    hi: float = 1.0
    mean: float = 0.0
    std: float = 0.5
    index: int = 0
    vector: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("uniform", "normal_clipped", "from_data", "explicit"):
            raise ConfigError(f"unknown init strategy {self.kind!r}")
        if self.kind in ("uniform", "normal_clipped") and not self.lo < self.hi:
            raise ConfigError(f"need lo < hi, got ({self.lo}, {self.hi})")
        if self.kind == "explicit":
            if self.vector is None or len(self.vector) == 0:
                raise ConfigError("explicit init needs a non-empty vector")
            object.__setattr__(self, "vector", tuple(float(v) for v in self.vector))

    @classmethod
    def uniform(cls, lo: float = -1.0, hi: float = 1.0) -> "InitStrategy":
        return cls("uniform", lo=lo, hi=hi)

    @classmethod
    def normal_clipped(cls, mean: float = 0.0, std: float = 0.5,
                       lo: float = -1.0, hi: float = 1.0) -> "InitStrategy":
        return cls("normal_clipped", mean=mean, std=std, lo=lo, hi=hi)

    @classmethod
    def from_data(cls, index: int) -> "InitStrategy":
        return cls("from_data", index=int(index))

    @classmethod
    def explicit(cls, vector) -> "InitStrategy":
        return cls("explicit", vector=tuple(float(v) for v in vector))


DEFAULT_INIT = InitStrategy.normal_clipped(0.0, 0.5, -1.0, 1.0)


@dataclass(frozen=True)
class ExtremalConfig:
    """Hyperparameters of the input descent.

    alpha is the learning rate of the plain update rule. "adam" as the
    optimizer swaps in Adam on the input vector for harder landscapes.
    """

    alpha: float = 0.01
    max_iters: int = 20000
    grad_tol: float = 1e-6
    restarts: int = 1
    seed: int = 0
    record_trajectory: bool = False
    optimizer: str = "gd"  # "gd" | "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ConfigError("alpha must be nonnegative")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be positive")
        if self.grad_tol < 0:
            raise ConfigError("grad_tol must be nonnegative")
        if self.restarts < 1:
            raise ConfigError("restarts must be positive")
        if self.optimizer not in ("gd", "adam"):
            raise ConfigError(f"optimizer must be 'gd' or 'adam', got {self.optimizer!r}")


@dataclass
class RestartSummary:
    restart: int
    seed: int
    x_hat: list[float] | None
    y_hat: float | None
    final_loss: float | None
    iterations: int
    converged: bool
    error: str | None = None


@dataclass
class ExtremalResult:
    """Outcome of one descent (or the best of several restarts)."""

    x_hat: np.ndarray
    y_hat: float
    final_loss: float
    iterations: int
    converged: bool
    trajectory: list[tuple[int, np.ndarray, float, float]] | None = None
    restart_results: list[RestartSummary] = field(default_factory=list)


def init_input(strategy: InitStrategy, stats: DataStats | None = None, seed: int = 0,
               *, dim: int | None = None, data: Dataset | None = None) -> np.ndarray:
    """Draw the starting vector for a descent; deterministic per seed.

    Bounded strategies need the dimension, taken from ``dim`` or from the
    statistics vector. "from_data" additionally needs the dataset itself,
    since the statistics do not carry sample rows.
    """
    if strategy.kind == "explicit":
        x = np.array(strategy.vector, dtype=float)
        if dim is not None and x.size != dim:
            raise ShapeError(f"explicit vector has length {x.size}, expected {dim}")
        return x
    if strategy.kind == "from_data":
        if data is None:
            raise ConfigError("from_data initialization needs the dataset")
        if not 0 <= strategy.index < data.n:
            raise ConfigError(f"from_data index {strategy.index} out of range for {data.n} samples")
        return np.array(data.inputs[strategy.index], dtype=float)
    if dim is None:
        if stats is None:
            raise ConfigError("random initialization needs a dimension or dataset statistics")
        dim = stats.mu.shape[0]
    rng = Rng(seed)
    if strategy.kind == "uniform":
        return rng.uniforms(strategy.lo, strategy.hi, dim)
    draws = rng.normals(strategy.mean, strategy.std, dim)
    return np.clip(draws, strategy.lo, strategy.hi)


def extremize(net: nnet.Network, loss: CompositeLoss, cfg: ExtremalConfig,
              strategy: InitStrategy = DEFAULT_INIT, stats: DataStats | None = None,
              data: Dataset | None = None) -> ExtremalResult:
    """Descend the composite loss in input space from one starting point.

    Runs x <- x - alpha * grad_x until the gradient norm drops below
    grad_tol or max_iters updates have been applied, then reports the
    best-loss iterate seen. The network must be frozen and is untouched.
    """
    if not net.frozen:
        raise ConfigError("extremize requires a frozen network (call freeze first)")
    x = init_input(strategy, stats, cfg.seed, dim=net.input_dim, data=data)
    if x.shape != (net.input_dim,):
        raise ShapeError(f"initial vector has shape {x.shape}, expected ({net.input_dim},)")

    best_loss = np.inf
    best_x = x.copy()
    trajectory: list[tuple[int, np.ndarray, float, float]] | None = (
        [] if cfg.record_trajectory else None
    )
    m1 = np.zeros_like(x)
    m2 = np.zeros_like(x)
    it = 0
    converged = False
    while True:
        try:
            value, grad_x, y = composite_eval(net, x, loss)
        except NumericError as e:
            raise NumericError(f"descent failed at iteration {it}: {e}") from e
        if not (np.isfinite(value) and np.isfinite(grad_x).all()):
            raise NumericError(f"descent produced non-finite loss or gradient at iteration {it}")
        if value < best_loss:
            best_loss = value
            best_x = x.copy()
        if trajectory is not None and (it <= TRAJECTORY_DENSE_LIMIT or it % 10 == 0):
            trajectory.append((it, x.copy(), y, value))
        with np.errstate(over="ignore"):  # an overflowing norm just fails the test below
            grad_norm = float(np.sqrt(grad_x @ grad_x))
        if grad_norm <= cfg.grad_tol:
            converged = True
            break
        if it >= cfg.max_iters:
            break
        if cfg.optimizer == "gd":
            x = x - cfg.alpha * grad_x
        else:
            m1 = cfg.beta1 * m1 + (1 - cfg.beta1) * grad_x
            m2 = cfg.beta2 * m2 + (1 - cfg.beta2) * grad_x * grad_x
            mhat = m1 / (1 - cfg.beta1 ** (it + 1))
            vhat = m2 / (1 - cfg.beta2 ** (it + 1))
            x = x - cfg.alpha * mhat / (np.sqrt(vhat) + cfg.eps)
        it += 1
    if trajectory is not None and (not trajectory or trajectory[-1][0] != it):
        trajectory.append((it, x.copy(), nnet.forward(net, x), value))

    # recompute at the best point so the reported pair is exactly consistent
    final_loss, _, y_hat = composite_eval(net, best_x, loss)
    result = ExtremalResult(
        x_hat=best_x,
        y_hat=y_hat,
        final_loss=final_loss,
        iterations=it,
        converged=converged,
        trajectory=trajectory,
    )
    result.restart_results = [_summary(0, cfg.seed, result)]
    return result


def _summary(index: int, seed: int, result: ExtremalResult | None,
             error: str | None = None) -> RestartSummary:
    if result is None:
        return RestartSummary(index, seed, None, None, None, 0, False, error)
    return RestartSummary(
        restart=index,
        seed=seed,
        x_hat=[float(v) for v in result.x_hat],
        y_hat=result.y_hat,
        final_loss=result.final_loss,
        iterations=result.iterations,
        converged=result.converged,
    )


def multi_start(net: nnet.Network, loss: CompositeLoss, cfg: ExtremalConfig,
                strategy: InitStrategy = DEFAULT_INIT, stats: DataStats | None = None,
                data: Dataset | None = None) -> ExtremalResult:
    """Run cfg.restarts descents from seeds seed, seed+1, ... and keep the
    lowest-loss one (ties break toward the earlier restart).

    A restart that fails numerically is recorded in the summaries rather
    than aborting the whole search; only all restarts failing is fatal.
    """
    summaries: list[RestartSummary] = []
    best: ExtremalResult | None = None
    for r in range(cfg.restarts):
        sub = replace(cfg, seed=cfg.seed + r, restarts=1)
        try:
            result = extremize(net, loss, sub, strategy, stats, data)
        except NumericError as e:
            summaries.append(_summary(r, sub.seed, None, str(e)))
            continue
        summaries.append(_summary(r, sub.seed, result))
        if best is None or result.final_loss < best.final_loss:
            best = result
    if best is None:
        raise NumericError(f"all {cfg.restarts} restarts failed numerically")
    best.restart_results = summaries
    return best
