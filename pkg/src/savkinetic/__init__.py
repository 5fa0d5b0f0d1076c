"""Entropy-dissipative SAV time integrators for the spatially homogeneous
Boltzmann and Landau equations in two velocity dimensions."""
from . import collision, grid, harness, reference, schemes
from .errors import KineticError
from .grid import VelocityGrid, entropy, integrate, make_grid, moments
from .schemes import SchemeConfig, SavState, StepReport, init_state, step

__version__ = "0.1.0"

__all__ = [
    "collision", "grid", "harness", "reference", "schemes",
    "KineticError", "VelocityGrid", "make_grid", "integrate", "moments", "entropy",
    "SchemeConfig", "SavState", "StepReport", "init_state", "step",
]
