"""Exception types shared across the package."""


class SentinelError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SentinelError):
    """Invalid configuration value or combination."""


class SchemaError(SentinelError):
    """A CSV file does not match its expected schema."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class RowError(SentinelError):
    """A single row could not be parsed."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no
        self.message = message


class DataError(SentinelError):
    """Inconsistent or out-of-range data values."""


class RangeError(SentinelError):
    """A requested month or date lies outside the corpus."""


class UndefinedStatisticError(SentinelError):
    """A statistic has no defined value (e.g. no device events at all)."""


class DegenerateDataError(SentinelError):
    """Training data cannot support a model (e.g. a single class)."""


class EmptyClassError(SentinelError):
    """An operation requires at least one instance of each class."""


class DivergenceError(SentinelError):
    """Iterative training produced non-finite values."""


class BoostingFailedError(SentinelError):
    """The first boosting round was no better than chance."""


class EnsembleBuildError(SentinelError):
    """A member model could not be trained while building the ensemble."""


class UndefinedMetricError(SentinelError):
    """A metric is undefined for the given inputs (e.g. single-class AUC)."""


class EvaluationError(SentinelError):
    """A cross-validation run lost too many folds to continue."""
