"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1,
numeric failures exit 2, file-format and I/O problems exit 3.
"""


class ExtremalError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(ExtremalError):
    """Invalid configuration value, flag, or argument."""


class ShapeError(ConfigError):
    """Dimension mismatch between vectors, layers, or datasets."""


class NumericError(ExtremalError):
    """A computation produced non-finite values or diverged."""


class FormatError(ExtremalError):
    """A model, dataset, or constraint file failed to parse."""
