from __future__ import annotations

import math

import numpy as np
import pytest

from fracquad.errors import DomainError, NonFiniteError
from fracquad.fde import (
    CaputoIVP,
    SolutionGrid,
    abm_march,
    fgj_correct,
    solve_ivp,
    volterra_rhs,
)
from fracquad.problems import (
    ex53,
    ex54,
    oscillator_exact,
    oscillator_green,
    polynomial_ivp_exact,
    polynomial_ivp_forcing,
)
from fracquad.specfun import gamma

from oracles import left_integral_mp


def max_error(grid, exact, which="corrected"):
    return float(np.max(np.abs(getattr(grid, which) - exact(grid.times))))


# {{{ problem and grid types


def test_problem_validation():
    with pytest.raises(DomainError):
        CaputoIVP(1.5, (0.0,), lambda t, y: y, 1.0)
    with pytest.raises(DomainError):
        CaputoIVP(0.0, (), lambda t, y: y, 1.0)
    with pytest.raises(DomainError):
        CaputoIVP(0.5, (0.0,), lambda t, y: y, -1.0)


def test_problem_head_and_scalar_rhs():
    p = CaputoIVP(1.5, (1.0, 2.0), lambda t, y: math.sin(t) * y, 1.0)
    assert p.head(0.5) == pytest.approx(2.0)
    out = p.g(np.array([0.0, 1.0]), np.array([1.0, 2.0]))
    assert np.allclose(out, [0.0, 2 * math.sin(1.0)])


def test_grid_validation_and_immutability():
    t = np.array([0.0, 0.5, 1.0])
    grid = SolutionGrid(t, t, t, t)
    assert grid.n_steps == 2 and grid.step == 0.5
    with pytest.raises(ValueError):
        grid.corrected[0] = 1.0
    with pytest.raises(DomainError):
        SolutionGrid(t[::-1], t, t, t)
    with pytest.raises(DomainError):
        SolutionGrid(t, t[:2], t, t)


# }}}


# {{{ Volterra right-hand side


def test_volterra_examples():
    head_only = CaputoIVP(1.5, (1.0, -2.0), lambda t, y: 0.0 * y, 1.0)
    assert volterra_rhs(head_only, lambda s: s, 0.7) == pytest.approx(1.0 - 1.4)

    const = CaputoIVP(0.5, (0.0,), lambda t, y: np.ones_like(y), 1.0)
    assert volterra_rhs(const, lambda s: s, 0.1) == pytest.approx(
        0.1**0.5 / gamma(1.5), rel=1e-14
    )
    assert volterra_rhs(const, lambda s: s, 0.0) == 0.0


def test_volterra_domain():
    p = CaputoIVP(0.5, (0.0,), lambda t, y: y, 1.0)
    with pytest.raises(DomainError):
        volterra_rhs(p, lambda s: s, 1.5)


# }}}


# {{{ predictor-corrector stage


def test_abm_no_forcing():
    p = CaputoIVP(0.7, (1.0,), lambda t, y: 0.0 * y, 2.0)
    grid = abm_march(p, 20)
    assert np.all(grid.predicted == 1.0)


def test_abm_constant_forcing_first_step():
    p = CaputoIVP(0.5, (0.0,), lambda t, y: np.ones_like(y), 1.0)
    grid = abm_march(p, 10)
    assert grid.predicted[1] == pytest.approx(0.1**0.5 / gamma(1.5), rel=1e-14)
    # constant forcing makes every product-integration weight exact
    assert np.allclose(grid.predicted, grid.times**0.5 / gamma(1.5), rtol=1e-13)


@pytest.mark.filterwarnings("ignore:overflow:RuntimeWarning")
def test_abm_nonfinite_reports_step():
    p = CaputoIVP(1.0, (1.0,), lambda t, y: y**4, 2.0)
    with pytest.raises(NonFiniteError, match="step"):
        abm_march(p, 50)


def test_abm_order_polynomial_ivp():
    # second-order predictor-corrector stage
    bench = ex53()
    errors = [max_error(abm_march(bench.problem, n), bench.reference, "predicted")
              for n in (50, 100, 200)]
    assert errors[0] / errors[1] >= 2 and errors[1] / errors[2] >= 2


# }}}


# {{{ full solver


def test_correct_no_forcing_gives_head():
    p = CaputoIVP(1.5, (0.5, 1.0), lambda t, y: 0.0 * y, 1.0)
    grid = solve_ivp(p, 16)
    assert np.allclose(grid.corrected, 0.5 + grid.times, atol=1e-15)


def test_correct_requires_two_nodes():
    p = CaputoIVP(0.5, (0.0,), lambda t, y: y, 1.0)
    with pytest.raises(DomainError):
        fgj_correct(p, abm_march(p, 4), N=1)


def test_alpha_one_exponential():
    p = CaputoIVP(1.0, (1.0,), lambda t, y: -y, 1.0)
    grid = solve_ivp(p, 200, 16)
    assert np.max(np.abs(grid.corrected - np.exp(-grid.times))) <= 1e-4


def test_polynomial_ivp_accuracy():
    grid = solve_ivp(ex53().problem, 200, 16)
    assert max_error(grid, polynomial_ivp_exact) <= 1e-3


def test_polynomial_ivp_exact_solution_by_power_rule():
    # the forcing is D^alpha y + y^2 for y = t^5 - 3t^4 + 2t^3
    alpha = 1.5
    f = polynomial_ivp_forcing(alpha)
    t = np.linspace(0.05, 1.0, 9)
    y = polynomial_ivp_exact(t)
    caputo = (
        gamma(6) / gamma(6 - alpha) * t ** (5 - alpha)
        - 3 * gamma(5) / gamma(5 - alpha) * t ** (4 - alpha)
        + 2 * gamma(4) / gamma(4 - alpha) * t ** (3 - alpha)
    )
    assert np.allclose(f(t), caputo + y**2, rtol=1e-14)


@pytest.mark.parametrize("n_steps", [50, 100])
def test_polynomial_ivp_order_of_corrected_solution(n_steps):
    bench = ex53()
    e1 = max_error(solve_ivp(bench.problem, n_steps, 16), bench.reference)
    e2 = max_error(solve_ivp(bench.problem, 2 * n_steps, 16), bench.reference)
    assert e1 / e2 >= 2


def test_polynomial_ivp_corrected_error_decreases():
    bench = ex53()
    e1 = max_error(solve_ivp(bench.problem, 100, 16), bench.reference)
    e2 = max_error(solve_ivp(bench.problem, 200, 16), bench.reference)
    assert e2 < e1


@pytest.mark.parametrize("make", [ex53, ex54])
def test_residual_contract(make):
    bench = make()
    grid = solve_ivp(bench.problem, 200, 16)
    assert np.max(grid.residuals) <= 10 * max_error(grid, bench.reference)


def test_determinism():
    bench = ex54()
    a = solve_ivp(bench.problem, 64, 16)
    b = solve_ivp(bench.problem, 64, 16)
    for name in ("times", "predicted", "corrected", "residuals"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


# }}}


# {{{ oscillator reference


def test_green_kernel_solves_homogeneous_problem():
    # G is t^{alpha-1} E_{alpha,alpha}(-t^alpha); its Laplace transform
    # 1/(s^alpha + 1) means I^alpha of (delta - G) equals G
    alpha = 1.5
    for t in (0.4, 1.3, 3.0):
        lhs = oscillator_green(alpha, t)
        rhs = t ** (alpha - 1) / gamma(alpha) - left_integral_mp(
            lambda s: oscillator_green(alpha, float(s)), alpha, t
        )
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_oscillator_reference_satisfies_volterra_equation():
    # substituting the convolution back into the equation
    bench = ex54()
    t = np.linspace(0.0, 5.0, 101)
    y = oscillator_exact(1.5, t)
    from fracquad.interp import EquispacedInterpolant

    P = EquispacedInterpolant.from_grid(t, y)
    rhs = volterra_rhs(bench.problem, P, t[1:], 48)
    assert np.max(np.abs(rhs - y[1:])) <= 1e-6


def test_oscillator_ivp_against_reference():
    bench = ex54()
    grid = solve_ivp(bench.problem, 200, 16)
    assert max_error(grid, bench.reference) <= 1e-6


# }}}
