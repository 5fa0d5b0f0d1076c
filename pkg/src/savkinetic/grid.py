"""Uniform periodic velocity grid on [-L, L)^2 with spectral tools.

Node convention is cell-left: ``v_j = -L + j * 2L/N``.  Fourier coefficients
are stored in numpy FFT order and normalised so that

    g_j = sum_k c_k exp(2 pi i k j / N),

i.e. ``c = fft2(g) / N**2``.  Because ``exp(i xi_k v_j)`` differs from
``exp(2 pi i k j / N)`` only by the sign ``(-1)**k``, products and mode
couplings (``k = l + m``) are unaffected by the offset of the grid.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import GridMismatch, NegativeDensity, NonPositiveMass

DIM = 2
DEFAULT_FLOOR = 1e-300


@dataclass(frozen=True)
class VelocityGrid:
    N: int
    L: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N % 2 or self.N < 4:
            raise ValueError(f"N must be an even integer >= 4, got {self.N!r}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L!r}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dv(self) -> float:
        return self.h**2

    @property
    def shape(self):
        return (self.N, self.N)

    @cached_property
    def nodes(self) -> np.ndarray:
        """1D node coordinates, shared by both axes."""
        return -self.L + self.h * np.arange(self.N)

    @cached_property
    def vx(self) -> np.ndarray:
        return np.broadcast_to(self.nodes[:, None], self.shape)

    @cached_property
    def vy(self) -> np.ndarray:
        return np.broadcast_to(self.nodes[None, :], self.shape)

    @cached_property
    def v2(self) -> np.ndarray:
        return self.vx**2 + self.vy**2

    @cached_property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers in FFT order, in {-N/2, ..., N/2-1}."""
        return np.fft.fftfreq(self.N, 1.0 / self.N).astype(np.int64)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """1D wavenumbers ``xi_k = (pi/L) k`` in FFT order."""
        return (np.pi / self.L) * self.mode_index

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on every 2D mode that does not involve the unpaired -N/2 index."""
        keep = self.mode_index != -self.N // 2
        return keep[:, None] & keep[None, :]

    def check(self, g: np.ndarray) -> np.ndarray:
        g = np.asarray(g)
        if g.shape != self.shape:
            raise GridMismatch(f"field of shape {g.shape} on a grid of shape {self.shape}")
        return g


def make_grid(N: int, L: float) -> VelocityGrid:
    """Build the ``N x N`` periodic grid on ``[-L, L)^2``."""
    return VelocityGrid(N, float(L))


class MomentSet(NamedTuple):
    rho: float
    u: np.ndarray
    T: float
    energy: float


def integrate(grid: VelocityGrid, g: np.ndarray) -> float:
    """Uniform quadrature ``dv * sum(g)``."""
    return grid.dv * float(np.sum(grid.check(g)))


def moments(grid: VelocityGrid, f: np.ndarray) -> MomentSet:
    f = grid.check(f)
    rho = integrate(grid, f)
    if not rho > 0:
        raise NonPositiveMass(f"mass {rho!r} is not positive")
    u = np.array([integrate(grid, f * grid.vx), integrate(grid, f * grid.vy)]) / rho
    energy = integrate(grid, f * grid.v2)
    c2 = (grid.vx - u[0]) ** 2 + (grid.vy - u[1]) ** 2
    T = integrate(grid, f * c2) / (DIM * rho)
    return MomentSet(rho, u, T, energy)


def entropy(grid: VelocityGrid, f: np.ndarray, C: float = 0.0,
            floor: float = DEFAULT_FLOOR) -> float:
    """Return ``int f log f dv + C`` with ``log`` taken of ``max(f, floor)``.

    Raises NegativeDensity if any entry is below ``-floor``.
    """
    f = grid.check(f)
    if np.any(f < -floor):
        raise NegativeDensity(f"density has entries down to {f.min():.3e}")
    return integrate(grid, f * np.log(np.maximum(f, floor))) + C


def to_modes(grid: VelocityGrid, g: np.ndarray) -> np.ndarray:
    return np.fft.fft2(grid.check(g)) / grid.N**2


def from_modes(grid: VelocityGrid, c: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_modes`; returns a complex array."""
    return np.fft.ifft2(c) * grid.N**2


def spectral_transform(grid: VelocityGrid, g: np.ndarray, inverse: bool = False) -> np.ndarray:
    return from_modes(grid, g) if inverse else to_modes(grid, g)


def spectral_gradient(grid: VelocityGrid, g: np.ndarray):
    """Spectral ``(d/dvx g, d/dvy g)`` with the -N/2 mode weight set to 0."""
    c = to_modes(grid, g)
    return gradient_from_modes(grid, c)


def gradient_from_modes(grid: VelocityGrid, c: np.ndarray):
    xi = np.where(grid.mode_index == -grid.N // 2, 0.0, grid.wavenumbers)
    gx = from_modes(grid, 1j * xi[:, None] * c).real
    gy = from_modes(grid, 1j * xi[None, :] * c).real
    return gx, gy


def spectral_divergence(grid: VelocityGrid, jx: np.ndarray, jy: np.ndarray) -> np.ndarray:
    xi = np.where(grid.mode_index == -grid.N // 2, 0.0, grid.wavenumbers)
    c = 1j * xi[:, None] * to_modes(grid, jx) + 1j * xi[None, :] * to_modes(grid, jy)
    return from_modes(grid, c).real
