"""Beamspace massive-MIMO beam selection toolkit.

Core library (channel generation, selection algorithms, rank-one
eigensystem updates, precoding and rate metrics), a Monte Carlo sweep
harness, an HTTP service wrapping it, and a thin CLI client.
"""

__version__ = "0.1.0"

from .channel import BeamspaceChannel, ChannelConfig
from .linalg import EigenSystem
from .selection import ReducedChannel, SelectionResult
from .simulate import SimulationConfig, SweepRow

__all__ = [
    "__version__",
    "BeamspaceChannel",
    "ChannelConfig",
    "EigenSystem",
    "ReducedChannel",
    "SelectionResult",
    "SimulationConfig",
    "SweepRow",
]
