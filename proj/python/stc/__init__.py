"""Service trace control for input-queued switches."""

from ._core import *  # noqa: F401,F403
from ._core import StcError, main, simulate, verify  # noqa: F401

__version__ = "0.1.0"
