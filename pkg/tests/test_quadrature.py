from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracquad.config import settings as cfg
from fracquad.errors import DomainError, NonFiniteError
from fracquad.jacobi import JacobiParams
from fracquad.quadrature import (
    Method,
    QuadratureRule,
    error_bound,
    get_rule,
    in_asymptotic_range,
    initial_guesses,
    integrate,
    jacobi_matrix,
    rule_eigen,
    rule_newton,
    rule_newton_params,
)

from oracles import gauss_legendre_remainder_monomial, jacobi_moment

ALPHAS = [0.25, 0.5, 0.75, 1.0, 1.5]


def mp_gauss_jacobi(lam, nu, n, guesses):
    """Nodes polished to 40 digits by Newton on the mpmath polynomial, with
    weights from the Christoffel formula for the (lam, nu) weight."""
    with mpmath.workdps(40):
        nodes, weights = [], []
        c = (
            mpmath.power(2, lam + nu + 1) * mpmath.gamma(n + lam + 1) * mpmath.gamma(n + nu + 1)
            / (mpmath.gamma(n + 1) * mpmath.gamma(n + lam + nu + 1))
        )
        for g in guesses:
            x = mpmath.findroot(lambda t: mpmath.jacobi(n, lam, nu, t), mpmath.mpf(g))
            dp = (n + lam + nu + 1) / 2 * mpmath.jacobi(n - 1, lam + 1, nu + 1, x)
            nodes.append(float(x))
            weights.append(float(c / ((1 - x**2) * dp**2)))
        return np.array(nodes), np.array(weights)


# {{{ eigenvalue rules


def test_gauss_legendre_small():
    r2 = rule_eigen(JacobiParams(0.0, 0.0), 2)
    assert np.allclose(r2.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(r2.weights, [1.0, 1.0], atol=1e-15)
    r1 = rule_eigen(JacobiParams(0.0, 0.0), 1)
    assert r1.nodes[0] == pytest.approx(0.0, abs=1e-16)
    assert r1.weights[0] == pytest.approx(2.0, rel=1e-15)


@pytest.mark.parametrize("n", [1, 5, 16, 300, 1000])
def test_chebyshev_rule_closed_form(n):
    rule = rule_eigen(JacobiParams(-0.5, -0.5), n)
    k = np.arange(n, 0, -1)
    assert np.max(np.abs(rule.nodes - np.cos((2 * k - 1) * np.pi / (2 * n)))) <= 1e-13
    # eigenvector errors grow like n eps
    assert np.max(np.abs(rule.weights * n / np.pi - 1.0)) <= max(1e-11, 5e-14 * n)


def test_chebyshev_rule_without_eigenvectors():
    # the first components from the recurrence amplify the node error by
    # about n^2 next to the endpoints
    n = 1500
    rule = rule_eigen(JacobiParams(-0.5, -0.5), n)
    k = np.arange(n, 0, -1)
    assert np.max(np.abs(rule.nodes - np.cos((2 * k - 1) * np.pi / (2 * n)))) <= 1e-13
    rel = np.abs(rule.weights * n / np.pi - 1.0)
    assert np.max(rel) <= 1e-8
    assert np.median(rel) <= 1e-12


def test_eigen_exact_for_inverse_sqrt_weight():
    rule = rule_eigen(JacobiParams(-0.5, 0.0), 4)
    for j in range(8):
        exact = jacobi_moment(-0.5, 0.0, j)
        assert integrate(rule, lambda x, j=j: x**j) == pytest.approx(exact, rel=1e-13, abs=1e-15)


def test_eigen_large_n_uses_recurrence_components():
    # beyond the eigenvector size limit the first components come from the recurrence
    n = cfg.eigenvector_max_n + 200
    params = JacobiParams(-0.5, 0.0)
    rule = rule_eigen(params, n)
    assert rule.weights.sum() == pytest.approx(params.mu0, rel=1e-12)
    newton = rule_newton(0.5, n)
    assert np.max(np.abs(rule.nodes - newton.nodes)) <= 1e-13
    assert np.max(np.abs(rule.weights - newton.weights) / newton.weights) <= 1e-8


def test_jacobi_matrix_shapes():
    d, e = jacobi_matrix(JacobiParams(0.2, -0.3), 7)
    assert d.shape == (7,) and e.shape == (6,)
    assert np.all(e > 0)


# }}}


# {{{ newton rules


def test_newton_legendre_case():
    r = rule_newton(1.0, 2)
    e = rule_eigen(JacobiParams(0.0, 0.0), 2)
    assert np.allclose(r.nodes, e.nodes, atol=1e-12)
    assert np.allclose(r.weights, e.weights, atol=1e-12)


def test_newton_alpha_half_fifty():
    r = rule_newton(0.5, 50)
    e = rule_eigen(JacobiParams(-0.5, 0.0), 50)
    assert r.method is Method.NEWTON
    assert np.max(np.abs(r.nodes - e.nodes)) <= 1e-12
    assert r.weights.sum() == pytest.approx(2 * math.sqrt(2), rel=1e-13)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("n", [30, 64, 127, 200])
def test_newton_matches_eigen(alpha, n):
    r = rule_newton(alpha, n)
    e = rule_eigen(JacobiParams.fractional(alpha), n)
    assert np.max(np.abs(r.nodes - e.nodes)) <= 1e-11
    assert np.max(np.abs(r.weights - e.weights)) <= 1e-11


@pytest.mark.parametrize("alpha, n", [(0.25, 40), (0.5, 35), (1.5, 45)])
def test_newton_against_extended_precision(alpha, n):
    r = rule_newton(alpha, n)
    idx = np.array([0, 1, n // 3, n // 2, n - 2, n - 1])
    nodes, weights = mp_gauss_jacobi(alpha - 1.0, 0.0, n, r.nodes[idx])
    assert np.max(np.abs(r.nodes[idx] - nodes)) <= 2e-15
    assert np.max(np.abs(r.weights[idx] - weights) / weights) <= 1e-12


def test_newton_small_n_falls_back():
    assert rule_newton(0.5, cfg.newton_min_n - 1).method is Method.EIGEN
    assert rule_newton(0.5, cfg.newton_min_n).method is Method.NEWTON


def test_newton_outside_asymptotic_range():
    # exponents outside [-1/2, 1/2] still use Newton, with recurrence values
    params = JacobiParams(-0.8, 0.7)
    assert not in_asymptotic_range(params)
    r = rule_newton_params(params, 120)
    e = rule_eigen(params, 120)
    assert r.method is Method.NEWTON
    assert np.max(np.abs(r.nodes - e.nodes)) <= 1e-13
    assert np.max(np.abs(r.weights - e.weights) / e.weights) <= 1e-10


def test_asymptotic_range_is_closed():
    assert in_asymptotic_range(JacobiParams(-0.5, 0.5))
    assert not in_asymptotic_range(JacobiParams(-0.51, 0.0))


def test_initial_guesses_close_to_nodes():
    n = 400
    guesses = initial_guesses(-0.5, 0.0, n, n // 2)
    rule = rule_eigen(JacobiParams(-0.5, 0.0), n)
    theta = np.arccos(rule.nodes[::-1][: n // 2])
    assert np.max(np.abs(guesses - theta)) <= 1e-3


@pytest.mark.parametrize("alpha", [0.0, 2.0, -0.5])
def test_newton_domain(alpha):
    with pytest.raises(DomainError):
        rule_newton(alpha, 10)


def test_n_validation():
    with pytest.raises(DomainError):
        rule_eigen(JacobiParams(0.0, 0.0), 0)


# }}}


# {{{ properties


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
def test_exactness(alpha, n):
    rule = rule_newton(alpha, n)
    for j in range(2 * n):
        exact = jacobi_moment(alpha - 1.0, 0.0, j)
        approx = integrate(rule, lambda x, j=j: x**j)
        # odd Legendre moments vanish; measure those against the absolute moment
        scale = abs(exact) if exact != 0.0 else 2.0 / (j + 1)
        assert abs(approx - exact) <= 1e-11 * scale


@pytest.mark.parametrize("alpha", [0.25, 1.5])
def test_interlacing(alpha):
    for n in [2, 5, 17, 29, 30, 31, 64]:
        a = rule_newton(alpha, n).nodes
        b = rule_newton(alpha, n + 1).nodes
        assert np.all(b[:-1] < a) and np.all(a < b[1:])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 1.95), st.integers(1, 120))
def test_rules_are_ordered_and_positive(alpha, n):
    # for lam = alpha - 1 < 0 the polynomial is the minimal solution of the
    # recurrence at x = 1, so forward evaluation amplifies rounding by n^(-2 lam)
    lam = alpha - 1.0
    tol = max(1e-12, 10.0 * n ** (-2.0 * lam) * np.finfo(float).eps) if lam < -0.5 else 1e-12
    for rule in (rule_newton(alpha, n), rule_eigen(JacobiParams.fractional(alpha), n)):
        assert np.all(np.diff(rule.nodes) > 0)
        assert -1 < rule.nodes[0] and rule.nodes[-1] < 1
        assert np.all(rule.weights > 0)
        assert rule.weights.sum() == pytest.approx(2**alpha / alpha, rel=tol)


@pytest.mark.parametrize("alpha, n", [(0.02, 120), (0.02, 500), (0.01, 300)])
def test_newton_strong_endpoint_singularity(alpha, n):
    # the first Bessel zero of order alpha - 1 is close to 0 here
    newton = rule_newton(alpha, n)
    eigen = rule_eigen(JacobiParams.fractional(alpha), n)
    assert np.max(np.abs(newton.nodes - eigen.nodes)) <= 1e-14
    bound = 10.0 * n ** (2.0 - 2.0 * alpha) * np.finfo(float).eps
    assert np.max(np.abs(newton.weights - eigen.weights) / eigen.weights) <= bound


@settings(max_examples=30, deadline=None)
@given(st.floats(-0.95, 1.5), st.floats(-0.95, 1.5), st.integers(1, 12))
def test_reflection(lam, nu, n):
    rule = rule_eigen(JacobiParams(lam, nu), n)
    mirror = rule_eigen(JacobiParams(nu, lam), n)
    ref = rule.reflected()
    assert ref.params == JacobiParams(nu, lam)
    assert np.allclose(ref.nodes, mirror.nodes, atol=1e-14)
    assert np.allclose(ref.weights, mirror.weights, rtol=1e-12)


# }}}


# {{{ integrate and error bound


def test_integrate_examples():
    rule = rule_newton(0.5, 8)
    assert integrate(rule, np.ones_like) == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    assert integrate(rule, lambda x: x**15) == pytest.approx(
        jacobi_moment(-0.5, 0.0, 15), abs=1e-12
    )


def test_legendre_beyond_exactness():
    rule = rule_eigen(JacobiParams(0.0, 0.0), 4)
    remainder = 2 / 9 - integrate(rule, lambda x: x**8)
    assert remainder > 1e-3
    assert remainder == pytest.approx(gauss_legendre_remainder_monomial(4, 8), rel=1e-12)


@pytest.mark.filterwarnings("ignore:invalid value:RuntimeWarning")
def test_integrate_rejects_nonfinite():
    rule = rule_eigen(JacobiParams(0.0, 0.0), 3)
    with pytest.raises(NonFiniteError):
        integrate(rule, np.log)


def test_integrate_pointwise_fallback():
    rule = rule_eigen(JacobiParams(0.0, 0.0), 5)
    assert integrate(rule, lambda x: math.cos(x)) == pytest.approx(2 * math.sin(1), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.5])
@pytest.mark.parametrize("n", [2, 4, 7])
def test_error_bound_is_exact_on_monomial(alpha, n):
    # f = x^{2n} has a constant 2n-th derivative, so the remainder equals the bound
    rule = rule_newton(alpha, n)
    remainder = jacobi_moment(alpha - 1.0, 0.0, 2 * n) - integrate(rule, lambda x: x ** (2 * n))
    bound = error_bound(alpha, n, math.factorial(2 * n)).bound
    assert bound == pytest.approx(remainder, rel=1e-9)


def test_error_bound_formula_constant():
    b = error_bound(0.5, 4, 1.0).bound
    printed = (
        1 / math.factorial(8) * 2**8 * math.factorial(4) ** 2 / 8.5
        * (math.gamma(4.5) / math.gamma(8.5)) ** 2
    )
    # the weighted norm of the monic polynomial carries an extra 2^alpha
    assert b == pytest.approx(2**0.5 * printed, rel=1e-13)


def test_error_bound_properties():
    assert error_bound(0.5, 4, 0.0).bound == 0.0
    assert error_bound(0.5, 5, 1.0).bound < error_bound(0.5, 4, 1.0).bound
    assert error_bound(0.5, 4, 2.0).bound == pytest.approx(2 * error_bound(0.5, 4, 1.0).bound)
    assert error_bound(0.5, 4, 1.0, scale=0.25).bound == pytest.approx(
        0.25 * error_bound(0.5, 4, 1.0).bound
    )
    with pytest.raises(DomainError):
        error_bound(0.5, 4, -1.0)


# }}}


# {{{ rule object and cache


def test_rule_is_immutable():
    rule = rule_newton(0.5, 6)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0
    with pytest.raises(AttributeError):
        rule.n = 3


def test_rule_validation():
    p = JacobiParams(0.0, 0.0)
    with pytest.raises(DomainError):
        QuadratureRule(p, 2, [0.5, -0.5], [1.0, 1.0], Method.EIGEN)
    with pytest.raises(DomainError):
        QuadratureRule(p, 2, [-0.5, 0.5], [1.0, -1.0], Method.EIGEN)
    with pytest.raises(DomainError):
        QuadratureRule(p, 3, [-0.5, 0.5], [1.0, 1.0], Method.EIGEN)
    with pytest.raises(NonFiniteError):
        QuadratureRule(p, 2, [-0.5, math.nan], [1.0, 1.0], Method.EIGEN)


def test_rule_to_dict():
    rule = rule_eigen(JacobiParams(-0.5, 0.0), 3)
    d = rule.to_dict()
    assert list(d) == ["lambda", "nu", "n", "method", "nodes", "weights"]
    assert d["method"] == "eigen" and d["n"] == 3 and len(d["nodes"]) == 3


def test_get_rule_cache_and_threads():
    params = JacobiParams(-0.3, 0.0)
    first = get_rule(params, 37)
    assert get_rule(params, 37) is first
    assert get_rule(params, 37, "eigen").method is Method.EIGEN

    barrier = threading.Barrier(8)

    def build(n):
        barrier.wait()
        return get_rule(JacobiParams(0.1, 0.0), n)

    with ThreadPoolExecutor(8) as pool:
        rules = list(pool.map(build, [50] * 8))
    assert all(np.array_equal(r.nodes, rules[0].nodes) for r in rules)


# }}}
