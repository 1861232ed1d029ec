"""Find inputs that extremize a trained feed-forward regression network.

Workflow: fit a surrogate network to data (optim.train), freeze its
parameters (optim.freeze), then run gradient descent on the input vector
against a composite loss that rewards the wanted output extremum and
penalizes undesirable inputs or outputs (descent.extremize /
descent.multi_start).
"""

__version__ = "0.1.0"

from .data import DataStats, Dataset, GenConfig, g_true, generate, read_csv, stats, write_csv
from .descent import (
    DEFAULT_INIT,
    ExtremalConfig,
    ExtremalResult,
    InitStrategy,
    RestartSummary,
    extremize,
    init_input,
    multi_start,
)
from .errors import ConfigError, ExtremalError, FormatError, NumericError, ShapeError
from .losses import (
    CompositeLoss,
    ExtremalLossConfig,
    ExtrapolationConfig,
    InputPositivityConfig,
    OutputPositiveMaxConfig,
    composite_eval,
    extremal_loss,
    extrapolation_loss,
    input_positivity_loss,
    load_constraints,
    mse,
    output_positive_max_loss,
)
from .nnet import (
    ACTIVATIONS,
    Activation,
    Layer,
    Network,
    activation,
    backward,
    forward,
    forward_batch,
    init_network,
    load_model,
    save_model,
)
from .optim import TrainConfig, TrainReport, freeze, train

__all__ = [
    "ACTIVATIONS",
    "Activation",
    "CompositeLoss",
    "ConfigError",
    "DEFAULT_INIT",
    "DataStats",
    "Dataset",
    "ExtremalConfig",
    "ExtremalError",
    "ExtremalLossConfig",
    "ExtremalResult",
    "ExtrapolationConfig",
    "FormatError",
    "GenConfig",
    "InitStrategy",
    "InputPositivityConfig",
    "Layer",
    "Network",
    "NumericError",
    "OutputPositiveMaxConfig",
    "RestartSummary",
    "ShapeError",
    "TrainConfig",
    "TrainReport",
    "activation",
    "backward",
    "composite_eval",
    "extremal_loss",
    "extremize",
    "extrapolation_loss",
    "forward",
    "forward_batch",
    "freeze",
    "g_true",
    "generate",
    "init_input",
    "init_network",
    "input_positivity_loss",
    "load_constraints",
    "load_model",
    "mse",
    "multi_start",
    "output_positive_max_loss",
    "read_csv",
    "save_model",
    "stats",
    "train",
    "write_csv",
]
