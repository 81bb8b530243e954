"""Ground state of the 1D double-well potential by Green-function iteration.

The package covers the trial functions and perturbation potentials
(:mod:`dwell.model`), weighted quadrature on the half-line
(:mod:`dwell.quad`), the tau- and f-iterations (:mod:`dwell.tau_iter`,
:mod:`dwell.f_iter`), the exact 1/g asymptotic series
(:mod:`dwell.asymptotic`) and an independent finite-difference eigensolver
(:mod:`dwell.oracle`).
"""

from dwell.model import ModelParams, State
from dwell.quad import Grid, SampledFunction, build_grid
from dwell.tau_iter import IterationTrace, solve
from dwell.f_iter import f_solve
from dwell.asymptotic import BetaPyramid, build_pyramid, epsilon_series, plateau
from dwell.oracle import ground_energy

__all__ = [
    "ModelParams",
    "State",
    "Grid",
    "SampledFunction",
    "build_grid",
    "IterationTrace",
    "solve",
    "f_solve",
    "BetaPyramid",
    "build_pyramid",
    "epsilon_series",
    "plateau",
    "ground_energy",
]

__version__ = "0.1.0"
