"""Container for precomputed spectral kernel tables."""
from dataclasses import dataclass, field

import numpy as np

BOLTZMANN = "boltzmann"
LANDAU = "landau"


@dataclass(frozen=True)
class KernelModes:
    """Spectral weights of one collision operator on one grid.

    ``params`` holds the kernel constant, the velocity exponent and the
    truncation radius (0 when untruncated); ``orders`` holds the radial and angular
    quadrature orders (0 where a quadrature is not used).  ``tables`` maps a
    table name to its array: ``beta`` (N^2 x N^2, indexed by flattened FFT-order
    modes ``(l, m)``) and ``beta_loss`` (N^2) for Boltzmann, ``A11``, ``A12``,
    ``A22`` (2N x 2N, FFTs of the kernel on the node-offset lattice) for Landau.
    """

    operator: str
    N: int
    L: float
    params: tuple
    orders: tuple
    tables: dict = field(compare=False)

    def matches(self, other: "KernelModes") -> bool:
        return (self.operator, self.N, self.L, self.params, self.orders) == (
            other.operator, other.N, other.L, other.params, other.orders)

    def same_tables(self, other: "KernelModes") -> bool:
        if self.tables.keys() != other.tables.keys():
            return False
        return all(np.array_equal(self.tables[k], other.tables[k]) for k in self.tables)
