"""The tau-iteration for the log-correction of the trial function.

Writing the solution as ``psi = phi * exp(-tau)``, each step needs one
cumulative integral of ``phi**2`` times a source term:

    E_n    = E_1 + <(tau'_{n-1})**2 / 2>
    tau'_n = tau'_1 + 2 phi**-2(x) int_0^x phi**2 [(E_1 - E_n) + (tau'_{n-1})**2 / 2]

where ``<.>`` is the ``phi**2``-weighted mean over the half-line and the
physical energy is ``g - E_n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from dwell.model import ModelParams
from dwell.quad import (
    Grid,
    SampledFunction,
    build_grid,
    log_weight,
    perturbation,
    ratio_from_zero,
    ratio_hybrid,
    ratio_to_inf,
    weighted_mean,
)

DEFAULT_ITERS = 5
DEFAULT_TOL = 1e-10


class DivergenceError(ArithmeticError):
    """Raised when an iteration's energy leaves the guard band ``10 (|g| + 1)``."""

    def __init__(self, scheme: str, g: float, energies):
        self.scheme = scheme
        self.g = g
        self.energies = tuple(energies)
        super().__init__(
            f"{scheme}-iteration diverged at g={g} after {len(self.energies)} steps "
            f"(last energy {self.energies[-1]:.6g})"
        )


def check_divergence(scheme: str, params: ModelParams, energies) -> None:
    if abs(energies[-1]) > 10.0 * (abs(params.g) + 1.0) or not np.isfinite(energies[-1]):
        raise DivergenceError(scheme, params.g, energies)


@dataclass(frozen=True)
class IterationTrace:
    params: ModelParams
    energies: Tuple[float, ...]
    final_tau_prime: SampledFunction
    scheme: str = "tau"
    sweeps: int = 0

    @property
    def e_final(self) -> float:
        """Physical energy ``g - E_last``."""
        return self.params.g - self.energies[-1]

    @property
    def converged_energy(self) -> float:
        return self.energies[-1]


def first_energy(params: ModelParams, grid: Grid) -> float:
    return weighted_mean(perturbation(params, grid), params, grid)


def first_tau_prime(e_1: float, params: ModelParams, grid: Grid) -> SampledFunction:
    lw = log_weight(params, grid)
    src = perturbation(params, grid) - e_1
    return SampledFunction(grid, 2.0 * ratio_hybrid(src, lw, grid))


def energy_step(prev: SampledFunction, params: ModelParams, grid: Grid,
                e_1: Optional[float] = None) -> float:
    if e_1 is None:
        e_1 = first_energy(params, grid)
    return e_1 + weighted_mean(0.5 * prev.values ** 2, params, grid)


def tau_prime_step(prev: SampledFunction, e_n: float, e_1: float, params: ModelParams,
                   grid: Grid, first: Optional[SampledFunction] = None,
                   form: str = "hybrid") -> SampledFunction:
    """Next ``tau'`` from the previous one and the new energy.

    ``form`` picks the cumulative direction: ``"hybrid"`` (forward on
    ``[0, 1]``, backward beyond), ``"forward"`` or ``"backward"``.  The
    last two exist to cross-check the first.
    """
    if not prev.grid.same_as(grid):
        raise ValueError("previous tau' lives on a different grid")
    if first is None:
        first = first_tau_prime(e_1, params, grid)
    lw = log_weight(params, grid)
    src = (e_1 - e_n) + 0.5 * prev.values ** 2
    if form == "hybrid":
        corr = ratio_hybrid(src, lw, grid)
    elif form == "forward":
        corr = ratio_from_zero(src, lw, grid)
    elif form == "backward":
        corr = -ratio_to_inf(src, lw, grid)
    else:
        raise ValueError(f"unknown form {form!r}")
    return SampledFunction(grid, first.values + 2.0 * corr)


def solve(params: ModelParams, grid: Optional[Grid] = None, n_iters: int = DEFAULT_ITERS,
          tol: float = DEFAULT_TOL) -> IterationTrace:
    """Run the tau-iteration from ``E_0 = 0``, ``tau'_0 = 0``.

    Stops after ``n_iters`` energies or once two successive energies differ
    by less than ``tol``.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    if grid is None:
        grid = build_grid(params)
    e_1 = first_energy(params, grid)
    energies = [e_1]
    check_divergence("tau", params, energies)
    tau1 = first_tau_prime(e_1, params, grid)
    tau = tau1
    sweeps = 1
    while len(energies) < n_iters:
        e_n = energy_step(tau, params, grid, e_1)
        energies.append(e_n)
        check_divergence("tau", params, energies)
        tau = tau_prime_step(tau, e_n, e_1, params, grid, first=tau1)
        sweeps += 1
        if abs(energies[-1] - energies[-2]) < tol:
            break
    return IterationTrace(params, tuple(energies), tau, "tau", sweeps)
