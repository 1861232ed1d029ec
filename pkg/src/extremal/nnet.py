"""Dense feed-forward networks with exact reverse-mode gradients.

Networks here are plain chains of dense layers ending in a single output
unit (scalar regression). Gradients with respect to both the parameters
and the input vector are computed analytically in one backward sweep, so
descent on either side is cheap and exact; finite differences appear only
in the test suite.

Frozen networks lock their parameter arrays: in-place writes and attribute
rebinding both raise, which is what lets the input-descent stage share one
model across restarts without defensive copies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, FormatError, NumericError, ShapeError
from .rng import Rng

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class Activation:
    """Elementwise activation paired with its analytic derivative."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]

    def __repr__(self) -> str:
        return f"Activation({self.name!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Activation) and other.name == self.name

    def __hash__(self) -> int:
        return hash(self.name)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # tanh form stays finite for large |z|
    return 0.5 * (1.0 + np.tanh(0.5 * z))


IDENTITY = Activation("identity", lambda z: np.asarray(z, dtype=float), lambda z: np.ones_like(z, dtype=float))
TANH = Activation("tanh", np.tanh, lambda z: 1.0 - np.tanh(z) ** 2)
# relu derivative at z == 0 is taken as 0 (subgradient convention)
RELU = Activation("relu", lambda z: np.maximum(z, 0.0), lambda z: (z > 0).astype(float))
SOFTPLUS = Activation("softplus", lambda z: np.logaddexp(0.0, z), _sigmoid)

ACTIVATIONS = {a.name: a for a in (IDENTITY, TANH, RELU, SOFTPLUS)}


def activation(name: str) -> Activation:
    """Look up an activation by name."""
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ConfigError(
            f"unknown activation {name!r}; choose from {sorted(ACTIVATIONS)}"
        ) from None


class Layer:
    """One dense layer: activation(weights @ x + bias).

    weights has shape (fan_out, fan_in); bias has shape (fan_out,).
    Arrays are copied on construction, so the layer owns its parameters.
    """

    def __init__(self, weights, bias, act: Activation | str):
        self._locked = False
        if isinstance(act, str):
            act = activation(act)
        weights = np.array(weights, dtype=float)
        bias = np.array(bias, dtype=float)
        if weights.ndim != 2:
            raise ShapeError(f"weights must be 2-D, got shape {weights.shape}")
        if bias.ndim != 1:
            raise ShapeError(f"bias must be 1-D, got shape {bias.shape}")
        if weights.shape[0] != bias.shape[0]:
            raise ShapeError(
                f"weights have {weights.shape[0]} rows but bias has length {bias.shape[0]}"
            )
        if not (np.isfinite(weights).all() and np.isfinite(bias).all()):
            raise ConfigError("layer parameters must be finite")
        self.weights = weights
        self.bias = bias
        self.activation = act

    @property
    def fan_in(self) -> int:
        return self.weights.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[0]

    def __setattr__(self, name, value):
        if getattr(self, "_locked", False):
            raise AttributeError(f"cannot rebind {name!r} on a frozen layer")
        super().__setattr__(name, value)

    def _lock(self) -> None:
        self.weights.flags.writeable = False
        self.bias.flags.writeable = False
        super().__setattr__("_locked", True)

    def __repr__(self) -> str:
        return f"Layer({self.fan_in}->{self.fan_out}, {self.activation.name})"


class Network:
    """Feed-forward chain of dense layers with a single output unit."""

    def __init__(self, input_dim: int, layers: Sequence[Layer], frozen: bool = False):
        self._locked = False
        if int(input_dim) < 1:
            raise ConfigError(f"input_dim must be positive, got {input_dim}")
        layers = list(layers)
        if not layers:
            raise ConfigError("a network needs at least one layer")
        fan = int(input_dim)
        for i, layer in enumerate(layers):
            if layer.fan_in != fan:
                raise ShapeError(
                    f"layer {i} expects fan_in {layer.fan_in} but the chain provides {fan}"
                )
            fan = layer.fan_out
        if fan != 1:
            raise ShapeError(f"final layer must have fan_out 1, got {fan}")
        self.input_dim = int(input_dim)
        self.layers = layers
        self.frozen = bool(frozen)
        if frozen:
            for layer in layers:
                layer._lock()
            super().__setattr__("_locked", True)

    def __setattr__(self, name, value):
        if getattr(self, "_locked", False):
            raise AttributeError(f"cannot rebind {name!r} on a frozen network")
        super().__setattr__(name, value)

    def copy(self, frozen: bool = False) -> "Network":
        """Deep copy; pass frozen=True to lock the copy's parameters."""
        clones = [Layer(l.weights, l.bias, l.activation) for l in self.layers]
        return Network(self.input_dim, clones, frozen=frozen)

    def parameter_count(self) -> int:
        return sum(l.weights.size + l.bias.size for l in self.layers)

    def __repr__(self) -> str:
        widths = "->".join(str(l.fan_out) for l in self.layers)
        state = "frozen" if self.frozen else "trainable"
        return f"Network({self.input_dim}->{widths}, {state})"


def init_network(spec: Sequence[tuple[int, Activation | str]], input_dim: int, seed: int = 0) -> Network:
    """Build a network with scaled-uniform weights and zero biases.

    Each layer's weights are drawn i.i.d. from U(-r, r) with
    r = sqrt(6 / (fan_in + fan_out)), layer by layer in row-major order
    from the packaged generator keyed by ``seed``, so identical
    (spec, input_dim, seed) triples give bit-identical networks.
    """
    if not spec:
        raise ConfigError("network spec must not be empty")
    if int(input_dim) < 1:
        raise ConfigError(f"input_dim must be positive, got {input_dim}")
    for width, _ in spec:
        if int(width) < 1:
            raise ConfigError(f"layer widths must be positive, got {width}")
    if int(spec[-1][0]) != 1:
        raise ConfigError("final layer width must be 1 (scalar regression)")
    rng = Rng(seed)
    layers = []
    fan_in = int(input_dim)
    for width, act in spec:
        fan_out = int(width)
        r = np.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniforms(-r, r, (fan_out, fan_in))
        layers.append(Layer(weights, np.zeros(fan_out), act))
        fan_in = fan_out
    return Network(input_dim, layers)


def _check_input(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != net.input_dim:
        raise ShapeError(
            f"input must be a vector of length {net.input_dim}, got shape {x.shape}"
        )
    if not np.isfinite(x).all():
        raise NumericError("input vector contains non-finite values")
    return x


def _forward_pass(net: Network, X: np.ndarray):
    """Batched forward walk. X is (n, input_dim).

    Returns (outputs (n,), cache) where the cache holds the pre-activations
    and per-layer inputs needed by _backward_pass.
    """
    A = X
    pre = []
    inputs = [X]
    for k, layer in enumerate(net.layers):
        with np.errstate(over="ignore", invalid="ignore"):  # finiteness checked below
            Z = A @ layer.weights.T + layer.bias
        if not np.isfinite(Z).all():
            raise NumericError(f"non-finite pre-activation in layer {k}")
        A = layer.activation.fn(Z)
        pre.append(Z)
        inputs.append(A)
    return A[:, 0], (pre, inputs)


def _backward_pass(net: Network, cache, upstream: np.ndarray):
    """Reverse sweep from cached forward state.

    upstream is (n,), the loss derivative with respect to each sample's
    output. Returns (param_grads, input_grads) where param_grads is a list
    of (dweights, dbias) summed over the batch and input_grads is (n, m).
    """
    pre, inputs = cache
    n_layers = len(net.layers)
    param_grads: list[tuple[np.ndarray, np.ndarray] | None] = [None] * n_layers
    delta = np.asarray(upstream, dtype=float)[:, None]
    with np.errstate(over="ignore", invalid="ignore"):  # callers check finiteness
        for k in range(n_layers - 1, -1, -1):
            layer = net.layers[k]
            delta = delta * layer.activation.deriv(pre[k])
            param_grads[k] = (delta.T @ inputs[k], delta.sum(axis=0))
            delta = delta @ layer.weights
    return param_grads, delta


def forward(net: Network, x) -> float:
    """Evaluate the network at one input vector. Pure."""
    x = _check_input(net, x)
    y, _ = _forward_pass(net, x[None, :])
    return float(y[0])


def forward_batch(net: Network, X) -> np.ndarray:
    """Evaluate the network at each row of X (n, input_dim)."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise ShapeError(
            f"batch must have shape (n, {net.input_dim}), got {X.shape}"
        )
    if not np.isfinite(X).all():
        raise NumericError("input batch contains non-finite values")
    y, _ = _forward_pass(net, X)
    return y


def backward(net: Network, x, upstream: float = 1.0):
    """Exact reverse-mode gradients of upstream * f at one input.

    Returns (param_grads, input_grad): param_grads is a list of
    (dweights, dbias) pairs, one per layer; input_grad has the input's
    length. Pure, like forward.
    """
    x = _check_input(net, x)
    _, cache = _forward_pass(net, x[None, :])
    param_grads, input_grads = _backward_pass(net, cache, np.array([float(upstream)]))
    return param_grads, input_grads[0]


def save_model(net: Network, path) -> None:
    """Write the network as a self-describing JSON document.

    Floats are serialized with Python's shortest round-trip repr, so a
    save/load cycle reproduces every parameter bit for bit.
    """
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "input_dim": net.input_dim,
        "layers": [
            {
                "activation": layer.activation.name,
                "weights": layer.weights.tolist(),
                "bias": layer.bias.tolist(),
            }
            for layer in net.layers
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _require(doc: dict, field: str, where: str):
    if field not in doc:
        raise FormatError(f"{where}: missing field {field!r}")
    return doc[field]


def _numeric_matrix(value, where: str) -> np.ndarray:
    arr = []
    if not isinstance(value, list) or not value:
        raise FormatError(f"{where}: expected a non-empty list of rows")
    width = None
    for i, row in enumerate(value):
        if not isinstance(row, list) or not row:
            raise FormatError(f"{where}[{i}]: expected a non-empty row")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"{where}[{i}]: ragged row (length {len(row)} != {width})")
        for j, v in enumerate(row):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
                raise FormatError(f"{where}[{i}][{j}]: not a finite number")
        arr.append([float(v) for v in row])
    return np.array(arr)


def load_model(path) -> Network:
    """Read a model file written by save_model. The result is unfrozen."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise FormatError(f"model file is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise FormatError("model file: top level must be an object")
    known = {"format_version", "input_dim", "layers"}
    extra = set(doc) - known
    if extra:
        raise FormatError(f"model file: unknown field {sorted(extra)[0]!r}")
    version = _require(doc, "format_version", "model file")
    if version != MODEL_FORMAT_VERSION:
        raise FormatError(
            f"model file: format_version {version!r} unsupported (expected {MODEL_FORMAT_VERSION})"
        )
    input_dim = _require(doc, "input_dim", "model file")
    if not isinstance(input_dim, int) or isinstance(input_dim, bool) or input_dim < 1:
        raise FormatError(f"model file: input_dim must be a positive integer, got {input_dim!r}")
    layer_docs = _require(doc, "layers", "model file")
    if not isinstance(layer_docs, list) or not layer_docs:
        raise FormatError("model file: layers must be a non-empty list")
    layers = []
    for i, ld in enumerate(layer_docs):
        where = f"layers[{i}]"
        if not isinstance(ld, dict):
            raise FormatError(f"{where}: expected an object")
        extra = set(ld) - {"activation", "weights", "bias"}
        if extra:
            raise FormatError(f"{where}: unknown field {sorted(extra)[0]!r}")
        name = _require(ld, "activation", where)
        if name not in ACTIVATIONS:
            raise FormatError(f"{where}.activation: unknown activation {name!r}")
        weights = _numeric_matrix(_require(ld, "weights", where), f"{where}.weights")
        bias_raw = _require(ld, "bias", where)
        if not isinstance(bias_raw, list) or not bias_raw:
            raise FormatError(f"{where}.bias: expected a non-empty list")
        for j, v in enumerate(bias_raw):
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
                raise FormatError(f"{where}.bias[{j}]: not a finite number")
        bias = np.array([float(v) for v in bias_raw])
        try:
            layers.append(Layer(weights, bias, ACTIVATIONS[name]))
        except ShapeError as e:
            raise FormatError(f"{where}: {e}") from e
    try:
        return Network(input_dim, layers)
    except (ShapeError, ConfigError) as e:
        raise FormatError(f"model file: inconsistent layer chain: {e}") from e
