"""The original f-iteration, kept for comparison with the tau-iteration.

Here the correction multiplies the trial function directly,
``psi = phi * f``, and every step needs a double integral

    f_n(x) = 1 - 2 int_x^inf phi**-2(y) dy int_y^inf phi**2 (w - E_n) f_{n-1} dz

with ``E_n = <w f_{n-1}> / <f_{n-1}>``.  Nothing keeps ``f`` positive, so
each step is screened and a breakdown is reported rather than raised.
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
    ratio_hybrid,
    ratio_to_inf,
    sample,
)
from dwell.tau_iter import check_divergence

# successive energy changes that alternate in sign and shrink by less than
# this factor per step count as an oscillating (unstable) energy sequence
OSCILLATION_RATIO = 0.5


class FIterationBreakdown(ArithmeticError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class FState:
    f: SampledFunction
    energy: float = 0.0

    @classmethod
    def initial(cls, grid: Grid) -> "FState":
        return cls(SampledFunction(grid, 1.0), 0.0)


@dataclass(frozen=True)
class InstabilityReport:
    step: int
    reason: str
    min_f: float
    x_at_min: float


@dataclass(frozen=True)
class FTrace:
    params: ModelParams
    energies: Tuple[float, ...]
    final_f: SampledFunction
    instability: Optional[InstabilityReport] = None
    scheme: str = "f"
    sweeps: int = 0

    @property
    def e_final(self) -> float:
        return self.params.g - self.energies[-1]

    @property
    def stable(self) -> bool:
        return self.instability is None


def f_energy(prev_f: SampledFunction, params: ModelParams, grid: Grid, w=None) -> float:
    """``<w f> / <f>``; ``w`` defaults to the state's perturbation potential."""
    if w is None:
        w = perturbation(params, grid)
    lw = log_weight(params, grid)
    rel = np.exp(lw - lw.max()) * grid.weights * sample(grid, prev_f)
    den = float(np.sum(rel))
    if not den > 0.0:
        raise FIterationBreakdown(f"normalisation integral of phi^2 f is {den:.3g} <= 0")
    return float(np.sum(rel * sample(grid, w))) / den


def f_step(prev: FState, params: ModelParams, grid: Grid, w=None) -> FState:
    """One update: new energy from ``prev.f``, then the double backward sweep."""
    if w is None:
        w = perturbation(params, grid)
    e_n = f_energy(prev.f, params, grid, w)
    lw = log_weight(params, grid)
    src = (sample(grid, w) - e_n) * sample(grid, prev.f)
    # phi^-2(y) int_y^inf phi^2 src, written through the zero-total identity
    inner = -ratio_hybrid(src, lw, grid)
    outer = _tail_integral(inner, grid)
    f_n = 1.0 - 2.0 * outer
    if not np.all(np.isfinite(f_n)):
        raise FIterationBreakdown("overflow in the outer cumulative integral")
    return FState(SampledFunction(grid, f_n), e_n)


def _tail_integral(values, grid: Grid):
    # unweighted int_x^inf of a bounded integrand
    return ratio_to_inf(values, np.zeros_like(values), grid)


def _oscillating(energies) -> bool:
    d = np.diff(energies)
    if d.size < 3:
        return False
    flips = np.sign(d[1:]) * np.sign(d[:-1]) < 0
    shrink = np.abs(d[1:]) / np.maximum(np.abs(d[:-1]), 1e-300)
    return bool(np.all(flips) and np.any(shrink > OSCILLATION_RATIO))


def f_solve(params: ModelParams, grid: Optional[Grid] = None, n_iters: int = 3) -> FTrace:
    """Run ``n_iters`` energy evaluations of the f-iteration from ``f_0 = 1``.

    A negative ``f``, a non-positive normalisation or an energy sequence
    that keeps oscillating stops the run and is recorded in
    ``FTrace.instability``.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    if grid is None:
        grid = build_grid(params)
    state = FState.initial(grid)
    energies = []
    sweeps = 0
    report = None
    for step in range(1, n_iters + 1):
        try:
            state = f_step(state, params, grid)
        except FIterationBreakdown as exc:
            report = _report(step, exc.reason, state.f)
            break
        sweeps += 2
        energies.append(state.energy)
        check_divergence("f", params, energies)
        if np.min(state.f.values) < 0.0:
            report = _report(step, "f became negative", state.f)
            break
        if _oscillating(energies):
            report = _report(step, "energy oscillates without settling", state.f)
            break
    if not energies:
        energies.append(float("nan"))
    return FTrace(params, tuple(energies), state.f, report, "f", sweeps)


def _report(step: int, reason: str, f: SampledFunction) -> InstabilityReport:
    k = int(np.argmin(f.values))
    return InstabilityReport(step, reason, float(f.values.flat[k]), float(f.grid.nodes.flat[k]))
