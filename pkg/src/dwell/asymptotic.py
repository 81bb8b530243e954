"""Exact 1/g expansion of the "+" state energy and of tau'.

With ``xi = 2 / (1 + x)`` the m-th correction to tau' is a polynomial

    S'_{m+1}(x) = xi**2 / 2**(4m) * sum_l beta_l(m) xi**l,   l = 0 .. 2m-1

whose integer coefficients obey a triangular recursion (the "pyramid").
The energy coefficients follow from the l = 0 column,
``eps_{m+1} = beta_0(m+1) / 2**(4m+2)`` with ``eps_1 = 1/4``.  All
coefficients are kept as Python integers / Fractions; floats appear only
when a series is evaluated at a given g.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

DEFAULT_ROWS = 45

Row = Tuple[int, ...]


@dataclass(frozen=True)
class BetaPyramid:
    """Rows ``m = 1 .. len(rows)``; ``rows[m-1][l]`` is ``beta_l(m)``."""

    rows: Tuple[Row, ...]
    base: Tuple[Row, ...]
    delta: Tuple[Row, ...]

    @classmethod
    def initial(cls) -> "BetaPyramid":
        return cls(((1, 1),), ((1, 1),), ((0, 0),))

    @property
    def depth(self) -> int:
        return len(self.rows)

    def row(self, m: int) -> Row:
        if not 1 <= m <= self.depth:
            raise IndexError(f"row {m} not generated (depth {self.depth})")
        return self.rows[m - 1]

    def beta(self, l: int, m: int) -> int:
        return self.row(m)[l]


def _correction_row(rows: Sequence[Row], m: int) -> List[int]:
    """``c_l = sum_n sum_i 2 beta_i(n) beta_{l-i-1}(m-n)`` for l = 0 .. 2m-1."""
    c = [0] * (2 * m)
    for l in range(1, 2 * m):
        acc = 0
        for n in range(1, m):
            bn, bmn = rows[n - 1], rows[m - n - 1]
            for i in range(max(0, l - 2 * (m - n)), min(2 * n - 1, l - 1) + 1):
                acc += bn[i] * bmn[l - i - 1]
        c[l] = 2 * acc
    return c


def _suffix_sums(terms: Sequence[int], start_min: int) -> List[int]:
    # out[L] = sum_{l >= max(start_min, L-2)} terms[l] for L = 0 .. len+1
    size = len(terms)
    suffix = [0] * (size + 1)
    for l in range(size - 1, -1, -1):
        suffix[l] = suffix[l + 1] + (terms[l] if l >= start_min else 0)
    return [suffix[max(start_min, L - 2)] for L in range(size + 2)]


def extend_pyramid(p: BetaPyramid, target_m: int) -> BetaPyramid:
    rows, base, delta = list(p.rows), list(p.base), list(p.delta)
    while len(rows) < target_m:
        m = len(rows)
        cur = rows[-1]
        b0 = _suffix_sums([cur[l] * (l + 4) for l in range(2 * m)], 0)
        db = _suffix_sums(_correction_row(rows, m), 1)
        base.append(tuple(b0))
        delta.append(tuple(db))
        rows.append(tuple(x + y for x, y in zip(b0, db)))
    return BetaPyramid(tuple(rows), tuple(base), tuple(delta))


def build_pyramid(rows: int = DEFAULT_ROWS) -> BetaPyramid:
    return extend_pyramid(BetaPyramid.initial(), rows)


def epsilon(p: BetaPyramid, m: int) -> Fraction:
    """Energy coefficient ``eps_m`` as an exact dyadic rational."""
    if m < 1:
        raise ValueError("m starts at 1")
    if m == 1:
        return Fraction(1, 4)
    return Fraction(p.row(m)[0], 2 ** (4 * (m - 1) + 2))


@dataclass(frozen=True)
class EpsilonSeries:
    """``terms[k]`` is ``eps_{k+1}``, the coefficient of ``g**-k``."""

    terms: Tuple[Fraction, ...]

    @property
    def floats(self) -> np.ndarray:
        return np.array([float(t) for t in self.terms])

    def __len__(self):
        return len(self.terms)


def epsilon_series(p: BetaPyramid, n_terms: Optional[int] = None) -> EpsilonSeries:
    n = p.depth if n_terms is None else n_terms
    if n > p.depth:
        p = extend_pyramid(p, n)
    return EpsilonSeries(tuple(epsilon(p, m) for m in range(1, n + 1)))


def partial_sums(eps: EpsilonSeries, g: float) -> np.ndarray:
    """``E^N = sum_{m=0}^{N} eps_{m+1} / g**m`` for every available N."""
    g = float(g)
    terms = np.array([float(t) / g ** k for k, t in enumerate(eps.terms)])
    return np.cumsum(terms)


def partial_sum(eps: EpsilonSeries, g: float, n: int) -> float:
    if n + 1 > len(eps):
        raise ValueError(f"series has {len(eps)} terms, order {n} needs {n + 1}")
    return float(partial_sums(eps, g)[n])


@dataclass(frozen=True)
class PlateauReport:
    g: float
    delta: float
    criterion: str
    n_best: int
    n_min: Optional[int]
    n_max: Optional[int]
    value: float
    rounded: Optional[float]

    @property
    def empty(self) -> bool:
        return self.n_min is None


def _bin(value: float, delta: float) -> int:
    return math.floor(value / delta + 0.5)


def plateau(eps: EpsilonSeries, g: float, delta: float,
            criterion: str = "rounding") -> PlateauReport:
    """Window of orders N over which the divergent series is stationary.

    The window is grown around ``n_best``, the order with the smallest
    increment ``|E^N - E^{N-1}|``.  With ``criterion="rounding"`` it is the
    run of N whose partial sums round to the same multiple of ``delta``;
    with ``criterion="increment"`` it is the run whose increments stay
    below ``delta``.  If even the smallest increment reaches ``delta`` the
    plateau is empty.
    """
    if criterion not in ("rounding", "increment"):
        raise ValueError(f"unknown criterion {criterion!r}")
    ps = partial_sums(eps, g)
    inc = np.abs(np.diff(ps))          # inc[N-1] belongs to order N
    n_best = int(np.argmin(inc)) + 1
    if n_best >= len(ps) - 1:
        raise ValueError(f"increments still shrinking at N={n_best}; generate more terms")
    value = float(ps[n_best])
    if inc[n_best - 1] >= delta:
        return PlateauReport(g, delta, criterion, n_best, None, None, value, None)

    if criterion == "increment":
        inside = lambda n: 1 <= n < len(ps) and inc[n - 1] < delta
    else:
        target = _bin(value, delta)
        inside = lambda n: 0 <= n < len(ps) and _bin(ps[n], delta) == target
    lo = hi = n_best
    while inside(lo - 1):
        lo -= 1
    while inside(hi + 1):
        hi += 1
    if hi == len(ps) - 1:
        raise ValueError("plateau reaches the last generated order; generate more terms")
    rounded = None
    if criterion == "rounding":
        digits = max(0, -int(math.floor(math.log10(delta) + 1e-9)))
        rounded = round(_bin(value, delta) * delta, digits)
    return PlateauReport(g, delta, criterion, n_best, lo, hi, value, rounded)


def s_prime_coefficients(p: BetaPyramid, m: int) -> List[Fraction]:
    """Coefficients in powers of xi of ``S'_{m+1}`` (index = power of xi)."""
    row = p.row(m)
    scale = Fraction(1, 2 ** (4 * m))
    return [Fraction(0), Fraction(0)] + [b * scale for b in row]


def s_prime_series(p: BetaPyramid, x, order: int, g: float):
    """``tau'_+(x) ~ sum_{m=1}^{order} S'_{m+1}(x) / g**m``."""
    xi = 2.0 / (1.0 + np.asarray(x, dtype=float))
    total = np.zeros_like(xi)
    for m in range(1, order + 1):
        coef = [float(c) for c in s_prime_coefficients(p, m)]
        total = total + np.polynomial.polynomial.polyval(xi, coef) / float(g) ** m
    return total if total.ndim else float(total)


def pyramid_to_json(p: BetaPyramid, indent: Optional[int] = None) -> str:
    """Row-major arrays of decimal integer strings (``l = 0`` first)."""
    doc = {
        "depth": p.depth,
        "beta": [[str(v) for v in r] for r in p.rows],
        "beta0": [[str(v) for v in r] for r in p.base],
        "delta_beta": [[str(v) for v in r] for r in p.delta],
    }
    return json.dumps(doc, indent=indent)


def pyramid_from_json(text: str) -> BetaPyramid:
    doc = json.loads(text)
    conv = lambda rows: tuple(tuple(int(v) for v in r) for r in rows)
    p = BetaPyramid(conv(doc["beta"]), conv(doc["beta0"]), conv(doc["delta_beta"]))
    for m, r in enumerate(p.rows, start=1):
        if len(r) != 2 * m:
            raise ValueError(f"row {m} has {len(r)} entries, expected {2 * m}")
    return p
