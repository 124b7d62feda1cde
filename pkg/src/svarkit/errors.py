"""Exception hierarchy shared by every svarkit module."""

import builtins


class SvarkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SvarkitError, ValueError):
    """Malformed input: ragged CSV rows, non-numeric cells, non-finite values."""


class SeriesIndexError(SvarkitError, builtins.IndexError):
    """Index is not strictly increasing or contains duplicates."""


# name used throughout the documentation
IndexError = SeriesIndexError


class LengthError(SvarkitError, ValueError):
    pass


class DegenerateError(SvarkitError, ValueError):
    """Zero variance or otherwise undefined statistic."""


class ConfigError(SvarkitError, ValueError):
    pass


class DomainError(SvarkitError, ValueError):
    pass


class SingularError(SvarkitError, ValueError):
    pass


class IdentificationError(SvarkitError, ValueError):
    pass


class ConvergenceError(SvarkitError, RuntimeError):
    """Optimizer failed from every start; ``best`` holds the best point seen."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class BootstrapError(SvarkitError, RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class StabilityError(SvarkitError, ValueError):
    pass


class OutlierError(SvarkitError, ValueError):
    pass
