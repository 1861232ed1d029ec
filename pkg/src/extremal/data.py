"""Synthetic four-intake benchmark data: generation, statistics, CSV I/O.

The generating function scores an arbitrary "goodness of health" for four
food-intake variables. It has no biological meaning; its only job is to
give the pipeline a known ground truth whose constrained optimum can be
computed by hand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FormatError, NumericError, ShapeError
from .rng import Rng

HEALTH_INPUT_DIM = 4


class Dataset:
    """Immutable paired samples: inputs (n, m) and outputs (n,)."""

    def __init__(self, inputs, outputs):
        inputs = np.array(inputs, dtype=float)
        outputs = np.array(outputs, dtype=float)
        if inputs.ndim != 2:
            raise ShapeError(f"inputs must be 2-D (n, m), got shape {inputs.shape}")
        if outputs.ndim != 1:
            raise ShapeError(f"outputs must be 1-D, got shape {outputs.shape}")
        if inputs.shape[0] != outputs.shape[0]:
            raise ShapeError(
                f"{inputs.shape[0]} input rows but {outputs.shape[0]} outputs"
            )
        if inputs.shape[1] < 1:
            raise ShapeError("input dimension must be at least 1")
        if inputs.size and not np.isfinite(inputs).all():
            raise NumericError("inputs contain non-finite values")
        if outputs.size and not np.isfinite(outputs).all():
            raise NumericError("outputs contain non-finite values")
        inputs.flags.writeable = False
        outputs.flags.writeable = False
        self.inputs = inputs
        self.outputs = outputs

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def m(self) -> int:
        return self.inputs.shape[1]

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class DataStats:
    """Per-dimension mean and population standard deviation."""

    mu: np.ndarray
    sigma: np.ndarray
    n: int

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        mu.flags.writeable = False
        sigma.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


@dataclass(frozen=True)
class GenConfig:
    """Sampling plan for the benchmark dataset.

    Inputs are uniform per dimension over [lo, hi]; outputs add Gaussian
    observation noise with standard deviation noise_std.
    """

    n: int
    seed: int = 0
    noise_std: float = 0.05
    lo: float = -1.0
    hi: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError(f"n must be positive, got {self.n}")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be nonnegative")
        if not self.lo < self.hi:
            raise ConfigError(f"need lo < hi, got ({self.lo}, {self.hi})")


def g_true(x, noise: float = 0.0) -> float:
    """Ground-truth health score for the four intakes, plus optional noise.

    1 - |x0| - x1^2 - x2 - exp(x3) + noise: moderate x0 and x1 are best,
    x2 hurts linearly, x3 exponentially.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (HEALTH_INPUT_DIM,):
        raise ShapeError(f"x must have length {HEALTH_INPUT_DIM}, got shape {x.shape}")
    return float(1.0 - abs(x[0]) - x[1] ** 2 - x[2] - math.exp(x[3]) + noise)


def generate(cfg: GenConfig) -> Dataset:
    """Sample the benchmark dataset; identical configs give identical data.

    Draw order is frozen: all input components first (row by row), then
    one noise deviate per sample.
    """
    rng = Rng(cfg.seed)
    inputs = rng.uniforms(cfg.lo, cfg.hi, (cfg.n, HEALTH_INPUT_DIM))
    outputs = np.empty(cfg.n)
    for i in range(cfg.n):
        outputs[i] = g_true(inputs[i], rng.normal(0.0, cfg.noise_std))
    return Dataset(inputs, outputs)


def stats(data: Dataset) -> DataStats:
    """Per-dimension mean and population (divisor n) standard deviation."""
    if data.n < 1:
        raise ConfigError("cannot compute statistics of an empty dataset")
    mu = data.inputs.mean(axis=0)
    sigma = np.sqrt(((data.inputs - mu) ** 2).mean(axis=0))
    return DataStats(mu=mu, sigma=sigma, n=data.n)


def _header(m: int) -> str:
    return ",".join([f"x{i}" for i in range(m)] + ["y"])


def write_csv(data: Dataset, path) -> None:
    """Write the dataset as CSV with full-precision floats."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_header(data.m) + "\n")
        for row, y in zip(data.inputs, data.outputs):
            fh.write(",".join(repr(float(v)) for v in row) + f",{repr(float(y))}\n")


def read_csv(path) -> Dataset:
    """Read a dataset written by write_csv; errors carry line numbers."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("dataset file is empty (expected a header row)")
    names = lines[0].split(",")
    if len(names) < 2 or names[-1] != "y" or names[:-1] != [f"x{i}" for i in range(len(names) - 1)]:
        raise FormatError(f"line 1: bad header {lines[0]!r} (expected x0,...,y)")
    m = len(names) - 1
    rows = []
    outs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != m + 1:
            raise FormatError(f"line {lineno}: expected {m + 1} columns, got {len(parts)}")
        try:
            values = [float(p) for p in parts]
        except ValueError as e:
            raise FormatError(f"line {lineno}: {e}") from e
        rows.append(values[:-1])
        outs.append(values[-1])
    inputs = np.array(rows, dtype=float) if rows else np.empty((0, m))
    return Dataset(inputs, np.array(outs, dtype=float))
