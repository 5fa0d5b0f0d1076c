"""Spectral Landau operator via zero-padded convolutions.

    Q_L(f) = div[ (A * f) grad f - (A * grad f) f ]

where ``*`` is convolution over the truncated domain and
``A(q) = C_L |q|^gamma (|q|^2 I - q q^T)``, optionally cut off at ``|q| > R``.
The kernel is sampled at every signed offset between two nodes,
``q = h j`` with ``j in [-N, N)^2``, and each convolution is a zero-padded FFT
product of size ``2N``, so no pair of nodes interacts through a periodic
image.  Derivatives are spectral on the ``N x N`` torus.

With ``f`` supported in ``|v| <= S`` the cut-off ``R = 2S`` leaves the operator
unchanged on the support while bounding the diffusion coefficient near the
box corners, which otherwise grows like ``|v|^2`` and stiffens explicit steps.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import GridMismatch
from ..grid import VelocityGrid, from_modes, to_modes
from .modes import LANDAU, KernelModes


@dataclass(frozen=True)
class LandauKernel:
    """Landau kernel constant, velocity exponent and optional cut-off radius."""

    C_L: float = 1.0 / 16.0
    gamma: float = 0.0
    R: float | None = None

    def __post_init__(self):
        if not self.C_L > 0:
            raise ValueError("C_L must be positive")
        if not -2.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [-2, 1] for d=2")
        if self.R is not None and not self.R > 0:
            raise ValueError("R must be positive when given")


def landau_matrix(kernel: LandauKernel, qx, qy):
    """Components ``(A11, A12, A22)`` of the Landau kernel at offsets ``q``."""
    qx, qy = np.asarray(qx, float), np.asarray(qy, float)
    q2 = qx**2 + qy**2
    inside = q2 > 0
    if kernel.R is not None:
        inside &= q2 <= kernel.R**2
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(inside, kernel.C_L * q2 ** (kernel.gamma / 2), 0.0)
    return scale * qy**2, -scale * qx * qy, scale * qx**2


def precompute_landau_modes(grid: VelocityGrid, kernel: LandauKernel) -> KernelModes:
    """FFTs (size 2N x 2N) of the three kernel components on the offset lattice."""
    M = 2 * grid.N
    off = grid.h * np.fft.fftfreq(M, 1.0 / M)
    A11, A12, A22 = landau_matrix(kernel, off[:, None], off[None, :])
    tables = {name: np.fft.fft2(a) for name, a in (("A11", A11), ("A12", A12), ("A22", A22))}
    return KernelModes(
        operator=LANDAU, N=grid.N, L=grid.L,
        params=(float(kernel.C_L), float(kernel.gamma), float(kernel.R or 0.0)),
        orders=(0, 0),
        tables=tables,
    )


class LandauOperator:
    """Evaluate ``Q_L`` from precomputed kernel modes."""

    def __init__(self, grid: VelocityGrid, modes: KernelModes):
        if modes.operator != LANDAU:
            raise ValueError(f"expected Landau modes, got {modes.operator!r}")
        if (modes.N, modes.L) != (grid.N, grid.L):
            raise GridMismatch(f"modes built for N={modes.N}, L={modes.L}; grid has N={grid.N}, L={grid.L}")
        self.grid = grid
        self.modes = modes
        self._A11 = grid.dv * modes.tables["A11"]
        self._A12 = grid.dv * modes.tables["A12"]
        self._A22 = grid.dv * modes.tables["A22"]
        xi = np.where(grid.mode_index == -grid.N // 2, 0.0, grid.wavenumbers)
        self._ikx = 1j * xi[:, None]
        self._iky = 1j * xi[None, :]

    def _phys(self, c):
        return from_modes(self.grid, c).real

    def _conv(self, *pairs):
        """``sum_i A_i * g_i`` for (kernel table, field) pairs, no periodic wrap."""
        N = self.grid.N
        acc = 0.0
        for table, g in pairs:
            pad = np.zeros((2 * N, 2 * N))
            pad[:N, :N] = g
            acc = acc + table * np.fft.fft2(pad)
        return np.fft.ifft2(acc).real[:N, :N]

    def flux(self, f):
        f = self.grid.check(f)
        c = to_modes(self.grid, f)
        fx, fy = self._phys(self._ikx * c), self._phys(self._iky * c)
        a11 = self._conv((self._A11, f))
        a12 = self._conv((self._A12, f))
        a22 = self._conv((self._A22, f))
        b1 = self._conv((self._A11, fx), (self._A12, fy))
        b2 = self._conv((self._A12, fx), (self._A22, fy))
        jx = a11 * fx + a12 * fy - f * b1
        jy = a12 * fx + a22 * fy - f * b2
        return jx, jy

    def apply(self, f):
        jx, jy = self.flux(f)
        div = self._ikx * to_modes(self.grid, jx) + self._iky * to_modes(self.grid, jy)
        return self._phys(div)

    __call__ = apply
