"""
When is the trial function good enough?
=======================================

Convergence of the iteration is guaranteed when the perturbation w is
positive, decreasing and vanishing at infinity.  For the even trial
function this holds for moderate g but fails at small g, where w dips
below zero inside the barrier.
"""

from dwell import ModelParams, build_grid
from dwell.model import check_trial_conditions

for g in (0.2, 0.5, 1.0, 2.0, 6.0):
    params = ModelParams(g)
    rep = check_trial_conditions(params, build_grid(params))
    line = f"g={g:<4} positive={rep.positive!s:<5} decreasing={rep.decreasing!s:<5} decays={rep.decays}"
    if rep.first_negative is not None:
        line += f"   (w < 0 from x = {rep.first_negative:.3f})"
    print(line)
