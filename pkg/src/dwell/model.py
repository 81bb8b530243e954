"""Potential, trial wavefunctions and perturbation potentials.

Everything here lives on the half-line ``x >= 0``; the even extension is left
to the caller.  Trial functions are returned together with ``log(phi**2)``
because ``phi**2`` spans hundreds of decades for large couplings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Optional

import numpy as np

if TYPE_CHECKING:
    from dwell.quad import Grid


class State(str, enum.Enum):
    """Which trial function / perturbation pair drives the iteration."""

    EVEN = "ev"
    PLUS = "plus"


@dataclass(frozen=True)
class ModelParams:
    g: float
    state: State = State.EVEN

    def __post_init__(self):
        g = float(self.g)
        if not math.isfinite(g) or g <= 0.0:
            raise ValueError(f"coupling g must be positive and finite, got {self.g!r}")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "state", State(self.state))

    @property
    def mixing(self) -> float:
        """Coefficient (g-1)/(g+1) of the reflected branch in the even trial function."""
        return (self.g - 1.0) / (self.g + 1.0)


class TrialEval(NamedTuple):
    log_phi_sq: np.ndarray
    phi: np.ndarray
    w: np.ndarray


def potential(x, g):
    """Double-well potential ``g**2 (x**2 - 1)**2 / 2``."""
    x = np.asarray(x, dtype=float)
    return 0.5 * g * g * (x * x - 1.0) ** 2


def s0(x):
    """Action factor ``(x-1)**2 (x+2) / 3``; its derivative is ``x**2 - 1``."""
    x = np.asarray(x, dtype=float)
    return (x - 1.0) ** 2 * (x + 2.0) / 3.0


def u(x):
    x = np.asarray(x, dtype=float)
    return 1.0 / (1.0 + x) ** 2


def _log_phi_plus_sq(x, g):
    return -2.0 * g * s0(x) + 2.0 * np.log(2.0 / (1.0 + x))


def _reflection_exponent(x, g):
    # log(phi_minus / phi_plus) = 2 g S0(x) - 4g/3, which is <= 0 on [0, 1]
    return 2.0 * g * s0(x) - 4.0 * g / 3.0


def phi_plus(x, g) -> TrialEval:
    x = np.asarray(x, dtype=float)
    log_sq = _log_phi_plus_sq(x, g)
    return TrialEval(log_sq, np.exp(0.5 * log_sq), u(x))


def _left_mask(x, left_limit):
    if left_limit is None:
        return x < 1.0
    return np.broadcast_to(np.asarray(left_limit, dtype=bool), x.shape) & (x <= 1.0)


def g_hat_ev(x, g, left_limit=None):
    """Extra perturbation of the even trial function (zero past x = 1).

    ``left_limit`` selects the ``[0, 1]`` branch at ``x == 1``; by default
    ``x = 1`` takes the right-hand value 0.
    """
    x = np.asarray(x, dtype=float)
    left = _left_mask(x, left_limit)
    e = np.exp(np.minimum(_reflection_exponent(x, g), 0.0))
    val = 2.0 * g * (g - 1.0) * e / ((g + 1.0) + (g - 1.0) * e)
    return np.where(left, val, 0.0)


def w_ev(x, g, left_limit=None):
    x = np.asarray(x, dtype=float)
    return u(x) + g_hat_ev(x, g, left_limit)


def phi_ev(x, g, left_limit=None) -> TrialEval:
    """Even trial function; continuous with its derivative at x = 1."""
    x = np.asarray(x, dtype=float)
    c = (g - 1.0) / (g + 1.0)
    left = _left_mask(x, left_limit)
    ratio = np.where(left, np.exp(np.minimum(_reflection_exponent(x, g), 0.0)),
                     math.exp(-4.0 * g / 3.0))
    log_sq = _log_phi_plus_sq(x, g) + 2.0 * np.log1p(c * ratio)
    return TrialEval(log_sq, np.exp(0.5 * log_sq), w_ev(x, g, left))


def trial(params: ModelParams, x, left_limit=None) -> TrialEval:
    """Trial function and perturbation for the state selected by ``params``."""
    if params.state is State.PLUS:
        return phi_plus(x, params.g)
    return phi_ev(x, params.g, left_limit)


@dataclass(frozen=True)
class ConditionReport:
    positive: bool
    decreasing: bool
    decays: bool
    first_negative: Optional[float]
    first_increase: Optional[float]
    jump_at_one: float
    tail_value: float

    @property
    def ok(self) -> bool:
        return self.positive and self.decreasing and self.decays


def check_trial_conditions(params: ModelParams, grid: "Grid", decay_tol: float = 0.2) -> ConditionReport:
    """Check w > 0, w' < 0 and w(inf) = 0 on the grid nodes.

    Monotonicity is tested on ``[0, 1]`` and ``[1, x_max]`` separately so the
    jump of ``w_ev`` at ``x = 1`` is not counted as a violation.  Decay means
    the value at the last node is below ``decay_tol`` times ``max |w|``.
    """
    x = grid.nodes
    w = trial(params, x, grid.left_panels[:, None]).w
    xs, ws = x.ravel(), w.ravel()

    neg = np.flatnonzero(ws <= 0.0)
    first_negative = float(xs[neg[0]]) if neg.size else None

    first_increase = None
    for piece in (grid.left_panels, ~grid.left_panels):
        if not piece.any():
            continue
        px, pw = _dedupe(x[piece].ravel(), w[piece].ravel())
        bad = np.flatnonzero(np.diff(pw) >= 0.0)
        if bad.size:
            cand = float(px[bad[0] + 1])
            first_increase = cand if first_increase is None else min(first_increase, cand)

    jump = 0.0
    if params.state is State.EVEN:
        jump = float(g_hat_ev(1.0, params.g, left_limit=True))
    tail = float(ws[-1])
    return ConditionReport(
        positive=first_negative is None,
        decreasing=first_increase is None,
        decays=abs(tail) <= decay_tol * float(np.max(np.abs(ws))),
        first_negative=first_negative,
        first_increase=first_increase,
        jump_at_one=jump,
        tail_value=tail,
    )


def _dedupe(x, y):
    # panel endpoints are shared between neighbours
    keep = np.concatenate([[True], np.diff(x) > 0.0])
    return x[keep], y[keep]
