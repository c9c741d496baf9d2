"""Piecewise expanding recurrences: hypothesis checks, Ulam invariant densities and correlation decay."""

from ._core import *  # noqa: F401,F403
from ._core import (
    BranchInversionFailure,
    CellSampling,
    ConfigError,
    DegenerateGrid,
    EmptyRegion,
    Error,
    InsufficientSignal,
    InvalidBounds,
    NoConvergence,
    NormParams,
    NotAdmissible,
    NotDecaying,
    OutOfDomain,
    System,
    UlamOperator,
)

__version__ = "0.1.0"
