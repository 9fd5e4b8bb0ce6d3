"""Infinitely divisible moving averages: analytic CFs, shot-noise simulation and limit diagnostics."""

from ._idma import *  # noqa: F401,F403
from ._idma import __doc__  # noqa: F401

__version__ = "0.1.0"
