"""Exception types shared across the package."""


class LimelightError(Exception):
    """Base class for all package-specific errors."""


class CorpusNotFoundError(LimelightError):
    """A requested corpus directory or category directory does not exist."""


class EmptyCategoryError(LimelightError):
    """A category directory exists but contains no document files."""


class EmptyInputError(LimelightError):
    """An operation that requires at least one element received none."""


class DatasetTooSmallError(LimelightError):
    """The dataset is too small to be split."""


class InvalidDimensionError(LimelightError):
    """Model dimensions are zero, negative, or mutually inconsistent."""


class EmptyInstanceError(LimelightError):
    """The document to explain has no tokens."""


class SingularFitError(LimelightError):
    """The surrogate normal equations are singular and cannot be solved."""


class ConfigError(LimelightError, ValueError):
    """The config file or a config value cannot be parsed."""
