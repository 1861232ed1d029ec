"""Shared fixtures and oracle helpers for the test suite."""

import hashlib

import numpy as np
import pytest

import extremal as ex


def fd_gradient(f, x, h=1e-5):
    """Central finite differences of a scalar function, per component."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += h
        lo[i] -= h
        grad[i] = (f(hi) - f(lo)) / (2 * h)
    return grad


def fd_scalar(f, y, h=1e-5):
    """Central finite difference of a scalar-to-scalar function."""
    return (f(y + h) - f(y - h)) / (2 * h)


def assert_grad_close(analytic, numeric, rel=1e-4, abs_tol=1e-7):
    """Relative comparison with an absolute floor near zero."""
    analytic = np.atleast_1d(np.asarray(analytic, dtype=float))
    numeric = np.atleast_1d(np.asarray(numeric, dtype=float))
    err = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    ok = (err <= abs_tol) | (err <= rel * scale)
    assert ok.all(), f"gradient mismatch: analytic={analytic}, numeric={numeric}"


def param_checksum(net):
    """Digest of every parameter byte, for purity and freeze checks."""
    digest = hashlib.sha256()
    for layer in net.layers:
        digest.update(layer.weights.tobytes())
        digest.update(layer.bias.tobytes())
    return digest.hexdigest()


def random_net(rng, activation="tanh", input_dim=None, hidden=None):
    """Small random network with the given hidden activation."""
    if input_dim is None:
        input_dim = int(rng.integers(2, 5))
    if hidden is None:
        hidden = [int(rng.integers(3, 7)) for _ in range(int(rng.integers(1, 3)))]
    layers = []
    fan_in = input_dim
    for width in hidden:
        layers.append(ex.Layer(rng.normal(0, 0.8, (width, fan_in)), rng.normal(0, 0.3, width), activation))
        fan_in = width
    layers.append(ex.Layer(rng.normal(0, 0.8, (1, fan_in)), rng.normal(0, 0.3, 1), "identity"))
    return ex.Network(input_dim, layers)


def affine_net(w=2.0, b=1.0):
    """One-layer identity network computing w*x + b."""
    return ex.Network(1, [ex.Layer([[w]], [b], "identity")])


def descend_with_halving(net, loss, x_init, alpha0=0.1, max_iters=150, halvings=30):
    """Run the descent with grad_tol=0, halving alpha until the returned
    loss does not exceed the starting loss. Returns (result, start_loss)."""
    x0 = np.asarray(x_init, dtype=float)
    start_loss = ex.composite_eval(net, x0, loss)[0]
    alpha = alpha0
    for _ in range(halvings):
        cfg = ex.ExtremalConfig(alpha=alpha, max_iters=max_iters, grad_tol=0.0, seed=0)
        try:
            result = ex.extremize(net, loss, cfg, ex.InitStrategy.explicit(x0))
        except ex.NumericError:
            alpha /= 2
            continue
        if result.final_loss <= start_loss + 1e-12:
            return result, start_loss
        alpha /= 2
    raise AssertionError("no alpha in the halving schedule achieved descent")


@pytest.fixture(scope="session")
def toy_surrogate():
    """One trained benchmark surrogate shared by non-acceptance tests.

    Trained shorter than the pinned default; quality is plenty for
    behavioral tests.
    """
    dataset = ex.generate(ex.GenConfig(n=1000, seed=11, noise_std=0.05))
    st = ex.stats(dataset)
    net = ex.init_network([(64, "tanh"), (64, "tanh"), (1, "identity")], 4, seed=12)
    trained, report = ex.train(net, dataset, ex.TrainConfig(epochs=200, seed=12))
    return dataset, st, ex.freeze(trained), report
