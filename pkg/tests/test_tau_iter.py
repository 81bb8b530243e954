import numpy as np
import pytest

from dwell.model import ModelParams, State
from dwell.quad import SampledFunction, build_grid, weighted_mean
from dwell.tau_iter import (
    DivergenceError,
    check_divergence,
    energy_step,
    first_energy,
    first_tau_prime,
    solve,
    tau_prime_step,
)


@pytest.fixture(scope="module")
def g3():
    params = ModelParams(3.0)
    return params, build_grid(params)


def test_first_energy_is_mean_perturbation():
    params = ModelParams(1.0)
    grid = build_grid(params)
    assert first_energy(params, grid) == pytest.approx(0.4135, abs=5e-5)


def test_first_tau_prime_vanishes_at_origin(g3):
    params, grid = g3
    tau1 = first_tau_prime(first_energy(params, grid), params, grid)
    assert tau1.at_zero() == 0.0


def test_tau_prime_satisfies_first_order_equation(g3):
    # d/dx (phi^2 tau'_1) = 2 phi^2 (w - E_1): check via cumulative identity at x = 0.6
    params, grid = g3
    e1 = first_energy(params, grid)
    tau1 = first_tau_prime(e1, params, grid)
    from dwell.model import trial
    from scipy.integrate import quad
    x = 0.6
    lx = float(trial(params, np.array(x), True).log_phi_sq)
    integrand = lambda y: np.exp(trial(params, np.array(y), True).log_phi_sq - lx) * (
        trial(params, np.array(y), True).w - e1)
    ref = 2.0 * quad(integrand, 0.0, x, epsabs=1e-13, epsrel=1e-12)[0]
    assert tau1(x) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("g, state", [(0.5, State.EVEN), (3.0, State.EVEN), (6.0, State.PLUS)])
def test_energies_not_below_first(g, state):
    tr = solve(ModelParams(g, state), n_iters=5, tol=0.0)
    assert all(e >= tr.energies[0] for e in tr.energies[1:])
    assert tr.final_tau_prime.at_zero() == 0.0


def test_energy_step_matches_definition(g3):
    params, grid = g3
    e1 = first_energy(params, grid)
    tau1 = first_tau_prime(e1, params, grid)
    expected = e1 + weighted_mean(0.5 * tau1.values ** 2, params, grid)
    assert energy_step(tau1, params, grid) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("form", ["forward", "backward"])
def test_cumulative_forms_agree_with_hybrid(g3, form):
    params, grid = g3
    e1 = first_energy(params, grid)
    tau1 = first_tau_prime(e1, params, grid)
    e2 = energy_step(tau1, params, grid, e1)
    hyb = tau_prime_step(tau1, e2, e1, params, grid, first=tau1)
    other = tau_prime_step(tau1, e2, e1, params, grid, first=tau1, form=form)
    mask = grid.nodes <= 1.6
    assert np.max(np.abs(hyb.values - other.values)[mask]) < 1e-8


def test_unknown_form_rejected(g3):
    params, grid = g3
    tau = SampledFunction(grid, 0.0)
    with pytest.raises(ValueError):
        tau_prime_step(tau, 0.5, 0.4, params, grid, form="sideways")


def test_foreign_grid_rejected(g3):
    params, grid = g3
    other = build_grid(params, 32)
    with pytest.raises(ValueError):
        tau_prime_step(SampledFunction(other, 0.0), 0.5, 0.4, params, grid)


def test_trace_fields():
    tr = solve(ModelParams(6.0), n_iters=5, tol=0.0)
    assert len(tr.energies) == 5
    assert tr.sweeps == 5
    assert tr.e_final == pytest.approx(6.0 - tr.energies[-1])
    assert tr.converged_energy == tr.energies[-1]
    assert tr.scheme == "tau"


def test_early_stop_on_tolerance():
    tr = solve(ModelParams(8.0), n_iters=30, tol=1e-9)
    assert len(tr.energies) < 30
    assert abs(tr.energies[-1] - tr.energies[-2]) < 1e-9


def test_bad_iteration_count():
    with pytest.raises(ValueError):
        solve(ModelParams(1.0), n_iters=0)


def test_divergence_guard():
    with pytest.raises(DivergenceError) as info:
        check_divergence("tau", ModelParams(1.0), [0.1, 25.0])
    assert info.value.g == 1.0


def test_plus_and_even_identical_at_g_one():
    a = solve(ModelParams(1.0, State.EVEN), n_iters=5, tol=0.0)
    b = solve(ModelParams(1.0, State.PLUS), n_iters=5, tol=0.0)
    assert a.energies == b.energies


def test_panel_refinement_converged():
    params = ModelParams(3.0)
    a = solve(params, build_grid(params, 64), tol=0.0).energies[-1]
    b = solve(params, build_grid(params, 128), tol=0.0).energies[-1]
    assert abs(a - b) < 1e-8


def test_zero_correction_returns_first_tau_prime(g3):
    params, grid = g3
    e1 = first_energy(params, grid)
    tau1 = first_tau_prime(e1, params, grid)
    again = tau_prime_step(SampledFunction(grid, 0.0), e1, e1, params, grid)
    np.testing.assert_array_equal(again.values, tau1.values)


def test_forward_backward_at_well_g2():
    params = ModelParams(2.0)
    grid = build_grid(params)
    e1 = first_energy(params, grid)
    tau1 = first_tau_prime(e1, params, grid)
    e2 = energy_step(tau1, params, grid, e1)
    fwd = tau_prime_step(tau1, e2, e1, params, grid, first=tau1, form="forward")
    bwd = tau_prime_step(tau1, e2, e1, params, grid, first=tau1, form="backward")
    assert abs(fwd(1.0) - bwd(1.0)) < 1e-8
