"""1-D periodic Navier-Stokes-Korteweg / Euler-Korteweg toolkit."""

from ._kernels import BACKEND
from .elliptic import CnoidalWave, elliptic_k, jacobi_sn
from .energy import Bitangent, DoubleWell, EnergyModel, bitangent, quartic_model, surface_energy
from .hermite import HermiteField, PeriodicGrid
from .solver import FluidState, SimConfig, run, strang_step

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Bitangent",
    "CnoidalWave",
    "DoubleWell",
    "EnergyModel",
    "FluidState",
    "HermiteField",
    "PeriodicGrid",
    "SimConfig",
    "bitangent",
    "elliptic_k",
    "jacobi_sn",
    "quartic_model",
    "run",
    "strang_step",
    "surface_energy",
]
