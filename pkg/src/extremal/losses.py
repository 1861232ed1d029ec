"""Loss terms for input extremization, each with its analytic derivative.

Two families of terms exist. Output-space terms consume the network output
y and return d(value)/dy; input-space terms consume the input vector x and
return d(value)/dx directly. composite_eval applies the chain rule through
the network exactly once for the combined output-space derivative, so a
full loss-and-gradient evaluation costs one forward and one backward pass.

Derivatives at the non-smooth points (band edges of the extrapolation
penalty, y = 0 in the output-positivity term, x_i = 0 in the
input-positivity term) take the interior/zero branch. Values are
continuous across every such boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import nnet
from .errors import ConfigError, FormatError, ShapeError


@dataclass(frozen=True)
class ExtremalLossConfig:
    """Pulls the output toward an extremum.

    maximize: value = 1 / (y^2 + kappa), with kappa > 0 keeping the pole
    off the real line. minimize: value = y^2.
    """

    mode: str = "maximize"
    kappa: float = 1.0

    def __post_init__(self):
        if self.mode not in ("maximize", "minimize"):
            raise ConfigError(f"mode must be 'maximize' or 'minimize', got {self.mode!r}")
        if self.mode == "maximize" and not self.kappa > 0:
            raise ConfigError("kappa must be positive when maximizing")


@dataclass(frozen=True, eq=False)
class ExtrapolationConfig:
    """Quadratic penalty on inputs leaving the mu +/- c*sigma data band.

    mu and sigma are the per-dimension training-data statistics; c sets the
    band half-width in standard deviations and kappa1 the penalty weight.
    """

    mu: np.ndarray
    sigma: np.ndarray
    c: float = 2.0
    kappa1: float = 0.5

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        if mu.ndim != 1 or sigma.ndim != 1 or mu.shape != sigma.shape:
            raise ShapeError("mu and sigma must be 1-D vectors of equal length")
        if (sigma < 0).any():
            raise ConfigError("sigma entries must be nonnegative")
        if not self.c > 0:
            raise ConfigError("c must be positive")
        if self.kappa1 < 0:
            raise ConfigError("kappa1 must be nonnegative")
        mu.flags.writeable = False
        sigma.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class OutputPositiveMaxConfig:
    """Maximize the output while penalizing negative outputs linearly.

    y < 0: value = -kappa2 * y + kappa_hat (steep, keeps y positive);
    y >= 0: value = 1 / (y^2 + 1/kappa_hat) (decreasing, rewards large y).
    Both branches meet at kappa_hat when y = 0.
    """

    kappa2: float = 10.0
    kappa_hat: float = 1.0

    def __post_init__(self):
        if not self.kappa2 > 0:
            raise ConfigError("kappa2 must be positive")
        if not self.kappa_hat > 0:
            raise ConfigError("kappa_hat must be positive")


@dataclass(frozen=True)
class InputPositivityConfig:
    """Linear penalty on negative entries of selected input dimensions.

    active_dims=None means every dimension participates.
    """

    kappa3: float = 1.0
    active_dims: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kappa3 < 0:
            raise ConfigError("kappa3 must be nonnegative")
        if self.active_dims is not None:
            dims = tuple(int(d) for d in self.active_dims)
            if any(d < 0 for d in dims):
                raise ConfigError("active_dims must be nonnegative indices")
            object.__setattr__(self, "active_dims", dims)


_OUTPUT_TERMS = (ExtremalLossConfig, OutputPositiveMaxConfig)
_INPUT_TERMS = (ExtrapolationConfig, InputPositivityConfig)
LossTerm = ExtremalLossConfig | OutputPositiveMaxConfig | ExtrapolationConfig | InputPositivityConfig


@dataclass(frozen=True)
class CompositeLoss:
    """Ordered sum of loss terms; evaluation adds the term values."""

    terms: tuple[LossTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ConfigError("a composite loss needs at least one term")
        for t in terms:
            if not isinstance(t, _OUTPUT_TERMS + _INPUT_TERMS):
                raise ConfigError(f"unsupported loss term {type(t).__name__}")
        object.__setattr__(self, "terms", terms)


def mse(pred, target) -> tuple[float, np.ndarray]:
    """Mean squared error and its gradient with respect to pred."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.ndim != 1 or pred.shape != target.shape:
        raise ShapeError(f"pred and target must be equal-length vectors, got {pred.shape} and {target.shape}")
    if pred.size < 1:
        raise ShapeError("mse needs at least one sample")
    diff = pred - target
    return float(diff @ diff) / pred.size, (2.0 / pred.size) * diff


def extremal_loss(y: float, cfg: ExtremalLossConfig) -> tuple[float, float]:
    """Extremum-seeking loss on the scalar output: (value, dvalue/dy)."""
    y = float(y)
    if cfg.mode == "maximize":
        denom = y * y + cfg.kappa
        return 1.0 / denom, -2.0 * y / (denom * denom)
    return y * y, 2.0 * y


def extrapolation_loss(x, cfg: ExtrapolationConfig) -> tuple[float, np.ndarray]:
    """Band penalty: zero inside mu +/- c*sigma, quadratic outside."""
    x = np.asarray(x, dtype=float)
    if x.shape != cfg.mu.shape:
        raise ShapeError(f"x has shape {x.shape}, expected {cfg.mu.shape}")
    low = cfg.mu - cfg.c * cfg.sigma
    high = cfg.mu + cfg.c * cfg.sigma
    excess = np.where(x < low, x - low, np.where(x > high, x - high, 0.0))
    value = cfg.kappa1 * float(excess @ excess)
    grad = 2.0 * cfg.kappa1 * excess
    return value, grad


def output_positive_max_loss(y: float, cfg: OutputPositiveMaxConfig) -> tuple[float, float]:
    """Positivity-guarded maximization loss: (value, dvalue/dy)."""
    y = float(y)
    if y < 0:
        return -cfg.kappa2 * y + cfg.kappa_hat, -cfg.kappa2
    denom = y * y + 1.0 / cfg.kappa_hat
    return 1.0 / denom, -2.0 * y / (denom * denom)


def input_positivity_loss(x, cfg: InputPositivityConfig) -> tuple[float, np.ndarray]:
    """Linear penalty on negative entries of the active dimensions."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"x must be a vector, got shape {x.shape}")
    if cfg.active_dims is None:
        active = np.ones(x.shape, dtype=bool)
    else:
        if any(d >= x.size for d in cfg.active_dims):
            raise ConfigError(f"active_dims {cfg.active_dims} out of range for dimension {x.size}")
        active = np.zeros(x.shape, dtype=bool)
        active[list(cfg.active_dims)] = True
    negative = active & (x < 0)
    value = -cfg.kappa3 * float(x[negative].sum())
    grad = np.zeros_like(x)
    grad[negative] = -cfg.kappa3
    return value, grad


def composite_eval(net: nnet.Network, x, loss: CompositeLoss) -> tuple[float, np.ndarray, float]:
    """Evaluate a composite loss and its input gradient at x.

    Returns (value, grad_x, y). Output-space derivatives are summed and
    pushed through the network in a single backward pass; input-space
    gradients add on directly.
    """
    if not net.frozen:
        raise ConfigError("composite_eval requires a frozen network (call freeze first)")
    x = nnet._check_input(net, x)
    y_arr, cache = nnet._forward_pass(net, x[None, :])
    y = float(y_arr[0])
    value = 0.0
    grad_x = np.zeros_like(x)
    dy = 0.0
    has_output_term = False
    for term in loss.terms:
        if isinstance(term, ExtremalLossConfig):
            v, d = extremal_loss(y, term)
            value += v
            dy += d
            has_output_term = True
        elif isinstance(term, OutputPositiveMaxConfig):
            v, d = output_positive_max_loss(y, term)
            value += v
            dy += d
            has_output_term = True
        elif isinstance(term, ExtrapolationConfig):
            v, g = extrapolation_loss(x, term)
            value += v
            grad_x += g
        else:
            v, g = input_positivity_loss(x, term)
            value += v
            grad_x += g
    if has_output_term:
        _, input_grads = nnet._backward_pass(net, cache, np.array([dy]))
        grad_x += input_grads[0]
    return value, grad_x, y


_TERM_KEYS = {
    "extremal": {"mode", "kappa"},
    "extrapolation": {"c", "kappa1", "stats", "mu", "sigma"},
    "output_positive_max": {"kappa2", "kappa_hat"},
    "input_positivity": {"kappa3", "active_dims"},
}


def _build_term(spec: dict, stats):
    kind = spec.get("type")
    if kind not in _TERM_KEYS:
        raise ConfigError(f"unknown constraint term type: {kind!r}")
    extra = set(spec) - _TERM_KEYS[kind] - {"type"}
    if extra:
        raise ConfigError(f"constraint term {kind!r}: unknown key {sorted(extra)[0]!r}")
    if kind == "extremal":
        return ExtremalLossConfig(mode=spec.get("mode", "maximize"), kappa=float(spec.get("kappa", 1.0)))
    if kind == "output_positive_max":
        return OutputPositiveMaxConfig(
            kappa2=float(spec.get("kappa2", 10.0)), kappa_hat=float(spec.get("kappa_hat", 1.0))
        )
    if kind == "input_positivity":
        dims = spec.get("active_dims")
        return InputPositivityConfig(
            kappa3=float(spec.get("kappa3", 1.0)),
            active_dims=None if dims is None else tuple(dims),
        )
    # extrapolation: statistics come from the dataset or are given inline
    if spec.get("stats") == "from_data":
        if stats is None:
            raise ConfigError("constraint term 'extrapolation' wants stats from data, but no dataset was supplied")
        mu, sigma = stats.mu, stats.sigma
    elif "mu" in spec and "sigma" in spec:
        mu, sigma = spec["mu"], spec["sigma"]
    else:
        raise ConfigError("constraint term 'extrapolation' needs either \"stats\": \"from_data\" or explicit mu and sigma")
    return ExtrapolationConfig(mu=np.asarray(mu, dtype=float), sigma=np.asarray(sigma, dtype=float),
                               c=float(spec.get("c", 2.0)), kappa1=float(spec.get("kappa1", 0.5)))


def load_constraints(source, stats=None) -> CompositeLoss:
    """Build a CompositeLoss from a constraint document.

    source may be a path to a JSON file or an already-parsed dict of the
    form {"terms": [...]}. Terms carrying "stats": "from_data" pull mu and
    sigma from the supplied dataset statistics.
    """
    if isinstance(source, dict):
        doc = source
    else:
        with open(source, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as e:
                raise FormatError(f"constraints file is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "terms" not in doc:
        raise FormatError('constraints document must be an object with a "terms" list')
    terms = doc["terms"]
    if not isinstance(terms, list) or not terms:
        raise FormatError('"terms" must be a non-empty list')
    return CompositeLoss(tuple(_build_term(t, stats) for t in terms))
