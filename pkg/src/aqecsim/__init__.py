"""Simulation and analysis toolkit for driven two-transmon logical qubits.

Subpackages cover operator algebra, device/drive/noise modeling, Lindblad
time evolution, two-qutrit state tomography, circuit-level parameter
estimation, fitting/analysis helpers, configuration files, and a command-line
runner.
"""

from .model import DeviceParams, DriveConfig, NoiseModel
from .operators import DensityMatrix, LabeledOperator, StateVector
from .solver import Trajectory, evolve

__version__ = "0.1.0"

__all__ = [
    "DeviceParams",
    "DriveConfig",
    "NoiseModel",
    "DensityMatrix",
    "LabeledOperator",
    "StateVector",
    "Trajectory",
    "evolve",
    "__version__",
]
