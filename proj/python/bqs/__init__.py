"""Bounded-quantum-storage oblivious transfer: simulators, bounds and checks."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
