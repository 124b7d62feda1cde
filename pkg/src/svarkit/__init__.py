"""Structural VAR and cointegration toolkit for small annual macro samples."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BootstrapError,
    ConfigError,
    ConvergenceError,
    DegenerateError,
    DomainError,
    IdentificationError,
    LengthError,
    OutlierError,
    ParseError,
    SeriesIndexError,
    SingularError,
    StabilityError,
    SvarkitError,
)
from .tscore import Dataset, TimeSeries, describe, load_csv  # noqa: E402
from .hac import KernelSpec, long_run_variance  # noqa: E402
from .unitroot import kpss_test  # noqa: E402
from .coint import CcrSpec, ccr_fit  # noqa: E402
from .varkit import var_fit  # noqa: E402
from .svar import RestrictionPattern, svar_ml_fit  # noqa: E402
from .dynamics import fevd, impulse_responses, long_run_impact  # noqa: E402
