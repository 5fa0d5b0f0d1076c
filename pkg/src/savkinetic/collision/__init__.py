from .boltzmann import BoltzmannKernel, BoltzmannOperator, precompute_boltzmann_modes
from .cache import load_modes, save_modes
from .landau import LandauKernel, LandauOperator, precompute_landau_modes
from .modes import BOLTZMANN, LANDAU, KernelModes

__all__ = [
    "BOLTZMANN", "LANDAU", "KernelModes",
    "BoltzmannKernel", "BoltzmannOperator", "precompute_boltzmann_modes",
    "LandauKernel", "LandauOperator", "precompute_landau_modes",
    "load_modes", "save_modes",
]
