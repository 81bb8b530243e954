"""
Exact 1/g series and where it stops being useful
=================================================

The coefficients of the large-g expansion of the "+" state energy are
dyadic rationals generated by an integer recursion.  The series
diverges, so its partial sums first settle and then run away; the
window where they settle is the best the series can do, and the
iteration beats it by roughly exp(-4g/3).
"""

import math

from dwell import ModelParams, State, build_pyramid, epsilon_series, plateau, solve

pyr = build_pyramid(45)
for m in range(1, 4):
    print(f"beta(m={m}) =", pyr.row(m)[::-1])

eps = epsilon_series(pyr)
print("first coefficients:", [str(t) for t in eps.terms[:5]])

for g, delta in ((6.0, 1e-4), (8.0, 1e-5), (9.0, 1e-6)):
    rep = plateau(eps, g, delta)
    it = solve(ModelParams(g, State.PLUS), n_iters=5, tol=0.0).energies[-1]
    print(f"g={g:g}: series settles on {rep.rounded} for N in [{rep.n_min}, {rep.n_max}],"
          f" iteration gives {it:.7f}, gap {abs(it - rep.value):.1e},"
          f" exp(-4g/3) = {math.exp(-4 * g / 3):.1e}")

# below g ~ 6 the increments never drop below 1e-4: there is no plateau
print("g=3 plateau empty:", plateau(eps, 3.0, 1e-4).empty)
