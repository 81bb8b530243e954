"""Panel quadrature on the truncated half-line ``[0, x_max]``.

Integrals are weighted by ``phi**2``, which is only ever handled as
``exp(log_phi_sq - reference)``.  Panels use Gauss-Lobatto nodes so that
``x = 0``, ``x = 1`` and every panel edge are themselves nodes; values are
stored per panel with shape ``(n_panels, order)`` and shared edges appear
twice (once as one-sided limit from each panel).
"""

from __future__ import annotations

import functools
import inspect
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from numpy.polynomial import legendre
from scipy.optimize import brentq

from dwell.model import ModelParams, s0, trial

LOG_WEIGHT_CUTOFF = 70.0
MIN_PANELS = 16


@functools.lru_cache(maxsize=None)
def lobatto_rule(order: int):
    """Nodes, weights and cumulative integration matrices on [-1, 1].

    ``fwd[i, j] = int_{-1}^{t_i} l_j`` and ``bwd[i, j] = int_{t_i}^{1} l_j``
    for the Lagrange basis ``l_j`` on the Lobatto nodes ``t``.
    """
    if order < 3:
        raise ValueError("Lobatto rule needs at least 3 nodes")
    inner = legendre.Legendre.basis(order - 1).deriv().roots()
    t = np.concatenate([[-1.0], np.sort(inner.real), [1.0]])
    coef = np.linalg.inv(legendre.legvander(t, order - 1))
    fwd = np.empty((order, order))
    bwd = np.empty((order, order))
    for j in range(order):
        antider = legendre.legint(coef[:, j], lbnd=-1.0)
        at_nodes = legendre.legval(t, antider)
        fwd[:, j] = at_nodes
        bwd[:, j] = legendre.legval(1.0, antider) - at_nodes
    weights = fwd[-1].copy()
    fwd[0] = 0.0
    bwd[-1] = 0.0
    bary = np.array([1.0 / np.prod(t[j] - np.delete(t, j)) for j in range(order)])
    return t, weights, fwd, bwd, bary


def truncation_point(g: float, cutoff: float = LOG_WEIGHT_CUTOFF) -> float:
    """Smallest x > 1 with ``2 g S0(x) = cutoff + 2 g S0(0)``."""
    target = cutoff + 2.0 * g * float(s0(0.0))
    hi = 2.0
    while 2.0 * g * float(s0(hi)) < target:
        hi *= 2.0
    return brentq(lambda x: 2.0 * g * float(s0(x)) - target, 1.0, hi, xtol=1e-14)


@dataclass(frozen=True, eq=False)
class Grid:
    edges: np.ndarray
    order: int
    g: float
    nodes: np.ndarray = field(init=False, repr=False)
    half_widths: np.ndarray = field(init=False, repr=False)
    left_panels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        if edges[0] != 0.0 or np.any(np.diff(edges) <= 0.0):
            raise ValueError("panel edges must start at 0 and increase strictly")
        t = lobatto_rule(self.order)[0]
        a, b = edges[:-1], edges[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid[:, None] + half[:, None] * t
        nodes[:, 0], nodes[:, -1] = a, b
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "half_widths", half)
        object.__setattr__(self, "left_panels", b <= 1.0)

    @property
    def n_panels(self) -> int:
        return len(self.edges) - 1

    @property
    def x_max(self) -> float:
        return float(self.edges[-1])

    @property
    def contains_one(self) -> bool:
        return bool(np.any(self.edges == 1.0))

    @property
    def weights(self) -> np.ndarray:
        return self.half_widths[:, None] * lobatto_rule(self.order)[1]

    def unique_nodes(self) -> np.ndarray:
        return np.concatenate([self.nodes[:, :-1].ravel(), self.edges[-1:]])

    def same_as(self, other: "Grid") -> bool:
        return self is other or (
            self.order == other.order and np.array_equal(self.edges, other.edges)
        )


def _clustered(a: float, b: float, n: int, both_ends: bool) -> np.ndarray:
    k = np.arange(n + 1)
    if both_ends:
        s = 0.5 * (1.0 - np.cos(np.pi * k / n))
    else:
        s = 1.0 - np.cos(0.5 * np.pi * k / n)
    e = a + (b - a) * s
    e[0], e[-1] = a, b
    return e


def build_grid(params: ModelParams, n_panels: int = 64, order: int = 16) -> Grid:
    """Panels clustered near 0 and 1, uniform past x = 2, with x = 1 an edge."""
    if n_panels < MIN_PANELS:
        raise ValueError(f"n_panels must be >= {MIN_PANELS}, got {n_panels}")
    x_max = truncation_point(params.g)
    n_left = n_panels // 4
    if x_max <= 2.0:
        pieces = [_clustered(0.0, 1.0, n_left, True),
                  _clustered(1.0, x_max, n_panels - n_left, False)[1:]]
    else:
        n_mid = n_panels // 4
        pieces = [_clustered(0.0, 1.0, n_left, True),
                  _clustered(1.0, 2.0, n_mid, False)[1:],
                  np.linspace(2.0, x_max, n_panels - n_left - n_mid + 1)[1:]]
    return Grid(np.concatenate(pieces), order, params.g)


Integrand = Union[float, np.ndarray, Callable, "SampledFunction"]


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on grid nodes with per-panel polynomial interpolation.

    Evaluation outside ``[0, x_max]`` clamps to the end values.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        v = np.broadcast_to(v, self.grid.nodes.shape).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, self.grid.x_max)
        flat = np.atleast_1d(x).ravel()
        k = np.clip(np.searchsorted(self.grid.edges, flat, side="right") - 1,
                    0, self.grid.n_panels - 1)
        nodes = self.grid.nodes[k]
        vals = self.values[k]
        bary = lobatto_rule(self.grid.order)[4]
        diff = flat[:, None] - nodes
        exact = diff == 0.0
        diff[exact] = 1.0
        c = bary / diff
        out = (c * vals).sum(axis=1) / c.sum(axis=1)
        hit = exact.any(axis=1)
        out[hit] = vals[hit][exact[hit]]
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def at_zero(self) -> float:
        return float(self.values[0, 0])


def _accepts_left_limit(func) -> bool:
    try:
        return "left_limit" in inspect.signature(func).parameters
    except (TypeError, ValueError):
        return False


def sample(grid: Grid, f: Integrand) -> np.ndarray:
    """Values of ``f`` on the grid nodes, shape ``(n_panels, order)``."""
    if isinstance(f, SampledFunction):
        if not f.grid.same_as(grid):
            raise ValueError("sampled function lives on a different grid")
        return f.values
    if callable(f):
        if _accepts_left_limit(f):
            return np.asarray(f(grid.nodes, left_limit=grid.left_panels[:, None]), dtype=float)
        return np.broadcast_to(np.asarray(f(grid.nodes), dtype=float), grid.nodes.shape)
    return np.broadcast_to(np.asarray(f, dtype=float), grid.nodes.shape)


def log_weight(params: ModelParams, grid: Grid) -> np.ndarray:
    """``log(phi**2)`` on the nodes, using the left branch on panels in [0, 1]."""
    return trial(params, grid.nodes, grid.left_panels[:, None]).log_phi_sq


def perturbation(params: ModelParams, grid: Grid) -> np.ndarray:
    return trial(params, grid.nodes, grid.left_panels[:, None]).w


def weighted_mean(f: Integrand, params: ModelParams, grid: Grid, log_w=None) -> float:
    """``int phi**2 f / int phi**2`` over the half-line."""
    lw = log_weight(params, grid) if log_w is None else log_w
    rel = np.exp(lw - lw.max()) * grid.weights
    return float(np.sum(rel * sample(grid, f)) / np.sum(rel))


def _scaled(values, log_w):
    ref = log_w.max()
    return np.exp(log_w - ref) * values, np.exp(ref - log_w)


def _sweep(integrand, grid: Grid, forward: bool) -> np.ndarray:
    _, _, fwd, bwd, _ = lobatto_rule(grid.order)
    h = grid.half_widths[:, None]
    if forward:
        local = h * (integrand @ fwd.T)
        totals = local[:, -1]
        before = np.concatenate([[0.0], np.cumsum(totals)[:-1]])
        return before[:, None] + local
    local = h * (integrand @ bwd.T)
    totals = local[:, 0]
    after = np.concatenate([np.cumsum(totals[::-1])[::-1][1:], [0.0]])
    return after[:, None] + local


def ratio_from_zero(values, log_w, grid: Grid) -> np.ndarray:
    """``phi**-2(x) int_0^x phi**2 f`` at every node."""
    f, inv = _scaled(values, log_w)
    return _sweep(f, grid, forward=True) * inv


def ratio_to_inf(values, log_w, grid: Grid) -> np.ndarray:
    """``phi**-2(x) int_x^inf phi**2 f`` at every node."""
    f, inv = _scaled(values, log_w)
    return _sweep(f, grid, forward=False) * inv


def ratio_hybrid(values, log_w, grid: Grid) -> np.ndarray:
    """``phi**-2(x) int_0^x phi**2 f`` for an integrand of zero total weight.

    Forward accumulation on panels in [0, 1], minus the tail integral beyond;
    each side only ever sums weights not larger than the one at ``x``.
    """
    f, inv = _scaled(values, log_w)
    out = np.where(grid.left_panels[:, None],
                   _sweep(f, grid, forward=True),
                   -_sweep(f, grid, forward=False))
    return out * inv


def tail_ratio_integral(f: Integrand, x: float, params: ModelParams, grid: Grid) -> float:
    """``phi**-2(x) int_x^inf phi**2(y) f(y) dy`` at an arbitrary point.

    The panel holding ``x`` is integrated from ``x`` with a fresh
    Gauss-Legendre rule; panels beyond use the stored nodes.
    """
    x = float(x)
    if not 0.0 <= x <= grid.x_max:
        raise ValueError(f"x={x} outside [0, {grid.x_max}]")
    k = min(int(np.searchsorted(grid.edges, x, side="right")) - 1, grid.n_panels - 1)
    left = bool(grid.left_panels[k])
    lx = float(trial(params, np.array(x), left).log_phi_sq)

    t, w = np.polynomial.legendre.leggauss(grid.order)
    b = float(grid.edges[k + 1])
    y = 0.5 * (x + b) + 0.5 * (b - x) * t
    fy = _eval_points(f, y, left)
    partial = 0.5 * (b - x) * np.sum(w * np.exp(trial(params, y, left).log_phi_sq - lx) * fy)

    rest = slice(k + 1, None)
    lw = log_weight(params, grid)[rest]
    vals = sample(grid, f)[rest]
    full = np.sum(grid.weights[rest] * np.exp(lw - lx) * vals)
    return float(partial + full)


def _eval_points(f, y, left):
    if isinstance(f, SampledFunction):
        return f(y)
    if callable(f):
        if _accepts_left_limit(f):
            return np.asarray(f(y, left_limit=left), dtype=float)
        return np.broadcast_to(np.asarray(f(y), dtype=float), y.shape)
    return np.broadcast_to(np.asarray(f, dtype=float), y.shape)

