"""Truncated Fourier-Galerkin Boltzmann operator in two velocity dimensions.

The relative velocity ``q = v - v_*`` is restricted to the ball ``|q| <= R``
and ``f`` is treated as periodic on ``[-L, L)^2``.  With post-collisional
offsets ``q+ = (q + |q| s)/2``, ``q- = (q - |q| s)/2`` the gain term has modes

    Q+_k = sum_{l+m=k} beta(l, m) f_l f_m,
    beta(l, m) = int_{|q|<=R} int_{S^1} B exp(-i (xi_l . q+ + xi_m . q-)) ds dq,

and the loss factor has modes ``beta(m, m) f_m``.  For an angle-independent
kernel ``B = C_B |q|^gamma`` both angular integrals are Bessel functions, so

    beta(l, m) = C_B (2 pi)^2 int_0^R rho^(gamma+1)
                 J0(rho |xi_l + xi_m| / 2) J0(rho |xi_l - xi_m| / 2) drho,

which is real and is evaluated with Gauss-Legendre quadrature in ``rho``.
The -N/2 modes are dropped from the coupling so the output is real and the
index set is symmetric.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from ..errors import GridMismatch
from ..grid import VelocityGrid, from_modes, to_modes
from .modes import BOLTZMANN, KernelModes

MIN_ORDER = 8
# rows of the (l, k) coupling handled per chunk
_CHUNK_ELEMENTS = 2**21


@dataclass(frozen=True)
class BoltzmannKernel:
    C_B: float = 1.0 / (2.0 * np.pi)
    gamma: float = 0.0
    R: float = 6.6

    def __post_init__(self):
        if not self.C_B > 0:
            raise ValueError("C_B must be positive")
        if not -2.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (-2, 1] for d=2")
        if not self.R > 0:
            raise ValueError("R must be positive")


def default_radial_order(N: int) -> int:
    # Bessel products oscillate with total frequency ~ 1.7 N over [0, R] on the
    # standard domain; 3N nodes resolve them to roundoff.
    return 3 * N


def _int_vectors(grid: VelocityGrid):
    idx = grid.mode_index
    lx = np.repeat(idx, grid.N)
    ly = np.tile(idx, grid.N)
    return lx, ly


def radial_table(kernel: BoltzmannKernel, scale: float, s2_values: np.ndarray, M_r: int):
    """``G[a, b] = C_B (2pi)^2 int_0^R rho^(g+1) J0(rho c_a) J0(rho c_b) drho``.

    ``c_a = scale * sqrt(s2_values[a]) / 2``; the result is symmetric.
    """
    x, w = np.polynomial.legendre.leggauss(M_r)
    rho = 0.5 * kernel.R * (x + 1.0)
    wr = 0.5 * kernel.R * w * rho ** (kernel.gamma + 1.0)
    c = 0.5 * scale * np.sqrt(s2_values.astype(float))
    J = j0(np.outer(c, rho))
    G = (J * wr) @ J.T
    G = 0.5 * (G + G.T)
    return kernel.C_B * (2.0 * np.pi) ** 2 * G


def precompute_boltzmann_modes(grid: VelocityGrid, kernel: BoltzmannKernel,
                               M_r: int | None = None, M_theta: int = 0) -> KernelModes:
    """Build the ``beta`` and ``beta_loss`` tables.

    ``M_theta`` is accepted for metadata compatibility only: the angular
    integrals are done in closed form for the constant angular kernel and the
    value recorded is 0.
    """
    if M_r is None:
        M_r = default_radial_order(grid.N)
    if M_r < MIN_ORDER:
        raise ValueError(f"radial quadrature order {M_r} < {MIN_ORDER}")
    if M_theta not in (0,) and M_theta < MIN_ORDER:
        raise ValueError(f"angular quadrature order {M_theta} < {MIN_ORDER}")
    if kernel.R > 2 * grid.L:
        raise ValueError(f"R={kernel.R} exceeds 2L={2 * grid.L}; the collision ball would alias")

    N2 = grid.N**2
    lx, ly = _int_vectors(grid)
    # every |l+m|^2 and |l-m|^2 is a sum of two squares in [0, 2 N^2]
    smax = 2 * grid.N**2
    a = np.arange(grid.N + 1)
    sums = np.unique((a[:, None] ** 2 + a[None, :] ** 2).ravel())
    sums = sums[sums <= smax]
    pos = np.full(smax + 1, -1, dtype=np.int64)
    pos[sums] = np.arange(sums.size)
    G = radial_table(kernel, np.pi / grid.L, sums, M_r)

    beta = np.empty((N2, N2))
    rows = max(1, _CHUNK_ELEMENTS // N2)
    for start in range(0, N2, rows):
        sl = slice(start, start + rows)
        sx = lx[sl, None] + lx[None, :]
        sy = ly[sl, None] + ly[None, :]
        dx = lx[sl, None] - lx[None, :]
        dy = ly[sl, None] - ly[None, :]
        beta[sl] = G[pos[sx**2 + sy**2], pos[dx**2 + dy**2]]
    beta_loss = G[pos[4 * (lx**2 + ly**2)], pos[0]]

    return KernelModes(
        operator=BOLTZMANN, N=grid.N, L=grid.L,
        params=(float(kernel.C_B), float(kernel.gamma), float(kernel.R)),
        orders=(int(M_r), 0),
        tables={"beta": beta, "beta_loss": beta_loss},
    )


def _coupling(grid: VelocityGrid, beta: np.ndarray):
    """Rearrange ``beta(l, m)`` into ``B[l, k] = beta(l, k - l)`` plus gather indices.

    Entries with ``k - l`` outside the mode set or any index equal to -N/2 are
    zeroed, so the sum over ``l`` carries no wrap-around.
    """
    N = grid.N
    lx, ly = _int_vectors(grid)
    keep = (lx != -N // 2) & (ly != -N // 2)
    mx = lx[None, :] - lx[:, None]
    my = ly[None, :] - ly[:, None]
    valid = (np.abs(mx) < N // 2) & (np.abs(my) < N // 2)
    valid &= keep[:, None] & keep[None, :]
    midx = ((mx % N) * N + (my % N)).astype(np.int32)
    B = np.where(valid, np.take_along_axis(beta, midx.astype(np.int64), axis=1), 0.0)
    return B, midx


class BoltzmannOperator:
    """Evaluate ``Q_B = Q+ - Q- f`` from precomputed modes."""

    def __init__(self, grid: VelocityGrid, modes: KernelModes):
        if modes.operator != BOLTZMANN:
            raise ValueError(f"expected Boltzmann modes, got {modes.operator!r}")
        if (modes.N, modes.L) != (grid.N, grid.L):
            raise GridMismatch(f"modes built for N={modes.N}, L={modes.L}; grid has N={grid.N}, L={grid.L}")
        self.grid = grid
        self.modes = modes
        self._B, self._midx = _coupling(grid, modes.tables["beta"])
        self._loss = np.where(grid.nyquist_mask.ravel(), modes.tables["beta_loss"], 0.0)

    def _modes_of(self, f):
        c = to_modes(self.grid, f).ravel()
        return np.where(self.grid.nyquist_mask.ravel(), c, 0.0)

    def _gain_modes(self, c):
        N2 = c.size
        out = np.zeros(N2, dtype=complex)
        rows = max(1, _CHUNK_ELEMENTS // N2)
        for start in range(0, N2, rows):
            sl = slice(start, start + rows)
            out += c[sl] @ (self._B[sl] * c[self._midx[sl]])
        return out

    def gain(self, f):
        c = self._modes_of(f)
        return from_modes(self.grid, self._gain_modes(c).reshape(self.grid.shape)).real

    def loss_factor(self, f):
        c = self._modes_of(f)
        return from_modes(self.grid, (self._loss * c).reshape(self.grid.shape)).real

    def split(self, f):
        """Return ``(Q+, Q-)`` from a single transform of ``f``."""
        c = self._modes_of(f)
        shape = self.grid.shape
        gain = from_modes(self.grid, self._gain_modes(c).reshape(shape)).real
        loss = from_modes(self.grid, (self._loss * c).reshape(shape)).real
        return gain, loss

    def apply(self, f):
        f = self.grid.check(f)
        gain, loss = self.split(f)
        return gain - loss * f

    __call__ = apply
