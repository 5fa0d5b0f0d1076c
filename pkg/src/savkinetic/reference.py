"""Closed-form densities used as initial data and accuracy oracles."""
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NegativeRegion
from .grid import VelocityGrid


def maxwellian(grid: VelocityGrid, rho=1.0, u=(0.0, 0.0), T=1.0) -> np.ndarray:
    if not (rho > 0 and T > 0):
        raise ValueError("Maxwellian needs rho > 0 and T > 0")
    c2 = (grid.vx - u[0]) ** 2 + (grid.vy - u[1]) ** 2
    return rho / (2 * np.pi * T) * np.exp(-c2 / (2 * T))


def maxwellian_entropy(rho: float, T: float) -> float:
    """``int M log M dv`` over R^2 for a 2D Maxwellian."""
    return rho * np.log(rho / (2 * np.pi * T)) - rho


def bkw_K(t: float) -> float:
    return 1.0 - np.exp(-t / 8.0) / 2.0


def bkw(grid: VelocityGrid, t: float) -> np.ndarray:
    """The 2D BKW self-similar solution at time ``t``.

    Valid for the Maxwell-molecule Boltzmann kernel ``B = 1/(2 pi)`` and the
    Landau kernel with ``C_L = 1/16, gamma = 0``.
    """
    K = bkw_K(t)
    if K <= 0.5:
        raise NegativeRegion(f"K(t={t}) = {K} <= 1/2 gives negative BKW values")
    v2 = grid.v2
    return (np.exp(-v2 / (2 * K)) / (2 * np.pi * K)
            * ((2 * K - 1) / K + (1 - K) / (2 * K**2) * v2))


@dataclass(frozen=True)
class BiMaxwellianParams:
    rho1: float = 0.5
    rho2: float = 0.5
    T1: float = 1.0
    T2: float = 1.0
    V1: tuple = (-1.0, 2.0)
    V2: tuple = (3.0, -3.0)

    def __post_init__(self):
        if min(self.rho1, self.rho2, self.T1, self.T2) <= 0:
            raise ValueError("densities and temperatures must be positive")

    @property
    def rho(self):
        return self.rho1 + self.rho2

    @property
    def u(self):
        return (self.rho1 * np.asarray(self.V1) + self.rho2 * np.asarray(self.V2)) / self.rho

    @property
    def T(self):
        # mixture temperature in d=2
        u = self.u
        e1 = self.T1 + np.sum((np.asarray(self.V1) - u) ** 2) / 2
        e2 = self.T2 + np.sum((np.asarray(self.V2) - u) ** 2) / 2
        return (self.rho1 * e1 + self.rho2 * e2) / self.rho


def bi_maxwellian(grid: VelocityGrid, params: BiMaxwellianParams = BiMaxwellianParams()) -> np.ndarray:
    return (maxwellian(grid, params.rho1, params.V1, params.T1)
            + maxwellian(grid, params.rho2, params.V2, params.T2))


def max_norm_error(f: np.ndarray, g: np.ndarray) -> float:
    f, g = np.asarray(f), np.asarray(g)
    if f.shape != g.shape:
        raise GridMismatch(f"shapes {f.shape} and {g.shape} differ")
    return float(np.max(np.abs(f - g)))
