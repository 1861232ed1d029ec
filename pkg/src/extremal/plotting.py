"""SVG plot emission for datasets, fitted models, and training curves.

Imports force the Agg backend: this module writes files, it never opens
windows. Output bytes are deterministic for fixed inputs (fixed hash salt,
no embedded timestamps).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "extremal"

import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

from . import nnet  # noqa: E402
from .data import Dataset, stats as data_stats  # noqa: E402

_SAVE = dict(format="svg", metadata={"Date": None})


def feature_scatters(dataset: Dataset, net: nnet.Network | None, out_dir) -> list[Path]:
    """One scatter of y against each input dimension.

    With a model, its slice through the data means is overlaid: the plotted
    dimension sweeps its observed range while every other dimension is held
    at the dataset mean.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mu = data_stats(dataset).mu
    paths = []
    for i in range(dataset.m):
        fig, ax = plt.subplots(figsize=(4.5, 3.4))
        ax.scatter(dataset.inputs[:, i], dataset.outputs, s=6, alpha=0.4, label="data")
        if net is not None:
            grid = np.linspace(dataset.inputs[:, i].min(), dataset.inputs[:, i].max(), 200)
            X = np.tile(mu, (grid.size, 1))
            X[:, i] = grid
            ax.plot(grid, nnet.forward_batch(net, X), color="C3", lw=2,
                    label="model (others at mean)")
        ax.set_xlabel(f"x{i}")
        ax.set_ylabel("y")
        ax.legend(loc="best", fontsize=8)
        fig.tight_layout()
        path = out_dir / f"feature_x{i}.svg"
        fig.savefig(path, **_SAVE)
        plt.close(fig)
        paths.append(path)
    return paths


def loss_curve(history: list[float], validation_mse: float | None, out_path) -> Path:
    """Training MSE per epoch, with the held-out MSE marked if known."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(4.5, 3.4))
    ax.plot(range(1, len(history) + 1), history, label="training MSE")
    if validation_mse is not None:
        ax.axhline(validation_mse, color="C1", ls="--", label=f"validation MSE = {validation_mse:.4g}")
    ax.set_xlabel("epoch")
    ax.set_ylabel("MSE")
    if history and min(history) > 0:
        ax.set_yscale("log")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE)
    plt.close(fig)
    return out_path
