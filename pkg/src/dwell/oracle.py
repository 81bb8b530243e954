"""Independent reference energies from a finite-difference Hamiltonian.

The even ground state is computed on ``[0, L]`` with a cell-centred grid
``x_i = (i + 1/2) h``: the ghost value ``psi_{-1} = psi_0`` gives the
Neumann condition at the origin and ``psi = 0`` is imposed at ``x = L``.
The lowest eigenvalue of the symmetric tridiagonal matrix is found by
bisection (LAPACK ``stebz`` through scipy) and the O(h**2) error is
removed by Richardson extrapolation between ``n`` and ``2n`` points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from dwell.model import potential, s0

# potential at the wall, in units of g
WALL_FACTOR = 50.0
# required decay of psi**2 at the wall, exp(-2 g S0(L)) <= exp(-TAIL_EXPONENT)
TAIL_EXPONENT = 40.0
MIN_POINTS = 2000


@dataclass(frozen=True)
class OracleConfig:
    half_width: float
    n_points: int = 4000
    parity: str = "even"

    def __post_init__(self):
        if self.n_points < MIN_POINTS:
            raise ValueError(f"n_points must be >= {MIN_POINTS}")
        if self.parity != "even":
            raise ValueError("only the even-parity ground state is supported")
        if not self.half_width > 1.0:
            raise ValueError("half_width must exceed the well position x = 1")

    @classmethod
    def for_coupling(cls, g: float, n_points: int = 4000) -> "OracleConfig":
        return cls(wall_position(g), n_points)


def wall_position(g: float) -> float:
    """Smallest L with ``V(L) >= 50 g`` and ``2 g S0(L) >= 40``."""
    g = float(g)
    if g <= 0.0:
        raise ValueError("g must be positive")
    need_v = math.sqrt(1.0 + math.sqrt(2.0 * WALL_FACTOR / g))
    hi = 2.0
    while 2.0 * g * float(s0(hi)) < TAIL_EXPONENT:
        hi *= 2.0
    need_tail = brentq(lambda x: 2.0 * g * float(s0(x)) - TAIL_EXPONENT, 1.0, hi)
    return max(need_v, need_tail)


def lowest_eigenvalue(g: float, half_width: float, n: int) -> float:
    h = half_width / (n + 0.5)
    x = (np.arange(n) + 0.5) * h
    diag = 1.0 / h ** 2 + potential(x, g)
    diag[0] -= 0.5 / h ** 2
    off = np.full(n - 1, -0.5 / h ** 2)
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                            select_range=(0, 0), lapack_driver="stebz")
    if vals.size != 1 or not np.isfinite(vals[0]):
        raise RuntimeError("tridiagonal eigensolve did not converge")
    return float(vals[0])


def ground_energy(g: float, cfg: Optional[OracleConfig] = None) -> float:
    """Even ground-state energy of ``-psi''/2 + V psi``, Richardson-extrapolated."""
    if cfg is None:
        cfg = OracleConfig.for_coupling(g)
    n = cfg.n_points
    coarse = lowest_eigenvalue(g, cfg.half_width, n)
    fine = lowest_eigenvalue(g, cfg.half_width, 2 * n)
    r2 = ((2 * n + 0.5) / (n + 0.5)) ** 2       # (h_coarse / h_fine)**2
    return (r2 * fine - coarse) / (r2 - 1.0)
