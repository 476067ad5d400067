"""Simulator and analysis toolkit for satellite-assisted quantum clock synchronization.

The package propagates circular-orbit constellations, evaluates optical link
budgets and relative kinematics, computes the achievable sync precision for
any clock pair, and reproduces network-level figures of merit (sync traces,
precision shadows, coverage tables).
"""

__version__ = "0.1.0"

from qcs_sim.errors import (
    NoPathError,
    NoSyncSignalError,
    NotVisibleError,
    ScenarioError,
)

__all__ = [
    "__version__",
    "ScenarioError",
    "NotVisibleError",
    "NoPathError",
    "NoSyncSignalError",
]
