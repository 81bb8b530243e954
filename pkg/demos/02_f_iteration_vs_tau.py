"""
The older f-iteration next to the tau-iteration
================================================

Writing psi = phi * f and iterating on f costs two cumulative integrals
per step instead of one.  For large g both schemes land on the same
energy; for very small g the f-iteration loses its footing.
"""

from dwell import ModelParams, f_solve, solve

for g in (0.05, 0.5, 3.0, 8.0):
    params = ModelParams(g)
    tau = solve(params, n_iters=5, tol=0.0)
    f = f_solve(params, n_iters=5)
    print(f"g={g:<5} tau: {tau.energies[-1]:+.6f} ({tau.sweeps} sweeps)"
          f"   f: {f.energies[-1]:+.6f} ({f.sweeps} sweeps)")
    if not f.stable:
        rep = f.instability
        print(f"         f-iteration stopped at step {rep.step}: {rep.reason}")
