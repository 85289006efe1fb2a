"""Scrambled-cost adiabatic Hamiltonian laboratory."""

from ._sglab import *  # noqa: F401,F403
from ._sglab import __doc__  # noqa: F401

__version__ = "0.1.0"
