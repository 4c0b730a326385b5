"""Exception types shared across the package."""


class Sg2vError(Exception):
    """Base class for all sg2v errors."""


class FormatError(Sg2vError):
    """An input file is malformed (bad line, missing mandatory file, ...)."""


class EmptyDatasetError(Sg2vError):
    """An operation received a dataset with no graphs."""


class BoundsError(Sg2vError):
    """An index or dimension is out of range."""


class ArgumentError(Sg2vError):
    """An argument value violates a precondition."""


class ConfigError(Sg2vError):
    """A configuration is internally inconsistent or mismatched."""


class NumericalError(Sg2vError):
    """A numerical invariant was violated (NaN/Inf, negative diagonal, ...)."""


class DegenerateLabelsError(Sg2vError):
    """A classification task received labels from a single class."""


class StratificationError(Sg2vError):
    """A class is too small to stratify into the requested folds."""
