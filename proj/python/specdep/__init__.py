"""Lagged and instantaneous dependence between groups of time series, per frequency."""

from ._specdep import *  # noqa: F401,F403
from ._specdep import __doc__  # noqa: F401

__version__ = "0.1.0"
