r"""Gauss-Jacobi quadrature rules.

Two constructions are provided:

* :func:`rule_eigen` computes nodes and weights from the symmetric tridiagonal
  Jacobi matrix (Golub-Welsch), in :math:`O(n^2)` operations.
* :func:`rule_newton` runs Newton's method in :math:`\theta = \arccos x`,
  seeded with asymptotic node estimates and evaluating the polynomial through
  its interior asymptotic expansion, in :math:`O(n)` operations.

The fractional rules integrate against :math:`(1 - x)^{\alpha - 1}`, i.e. they
are Gauss-Jacobi rules with :math:`(\lambda, \nu) = (\alpha - 1, 0)`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable

import numpy as np
import scipy.linalg as sla

from fracquad.config import settings
from fracquad.errors import (
    ConvergenceError,
    DomainError,
    NewtonDivergenceError,
    NonFiniteError,
)
from fracquad.jacobi import (
    JacobiParams,
    interior_series,
    recurrence_values_shifted,
)
from fracquad.specfun import bessel_j_zeros, lgamma

class Method(enum.Enum):
    EIGEN = "eigen"
    NEWTON = "newton"


@dataclass(frozen=True)
class QuadratureRule:
    r"""An *n*-point Gauss-Jacobi rule

    .. math::

        \int_{-1}^1 (1 - x)^\lambda (1 + x)^\nu f(x) \,\mathrm{d}x
        \approx \sum_{k = 1}^n w_k f(x_k).
    """

    params: JacobiParams
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    #: Algorithm that actually produced the nodes and weights.
    method: Method

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)

        if nodes.shape != (self.n,) or weights.shape != (self.n,):
            raise DomainError(
                f"expected {self.n} nodes and weights, got shapes "
                f"{nodes.shape} and {weights.shape}"
            )
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(weights))):
            raise NonFiniteError("quadrature nodes and weights must be finite")
        if np.any(np.diff(nodes) <= 0):
            raise DomainError("quadrature nodes must be strictly increasing")
        if nodes[0] <= -1.0 or nodes[-1] >= 1.0:
            raise DomainError("quadrature nodes must lie in (-1, 1)")
        if np.any(weights <= 0):
            raise DomainError("quadrature weights must be positive")

        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def reflected(self) -> QuadratureRule:
        r"""The rule for the swapped weight :math:`(1 - x)^\nu (1 + x)^\lambda`."""
        return QuadratureRule(
            params=self.params.swapped(),
            n=self.n,
            nodes=-self.nodes[::-1],
            weights=self.weights[::-1],
            method=self.method,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.params.lam,
            "nu": self.params.nu,
            "n": self.n,
            "method": self.method.value,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True)
class ErrorBound:
    """Bound on the quadrature remainder given a bound on the :math:`2n`-th derivative."""

    bound: float
    derivative_order: int
    sup_derivative: float


def _check_n(n: int) -> int:
    if n < 1 or int(n) != n:
        raise DomainError(f"number of nodes must be a positive integer, got n={n}")
    return int(n)


# {{{ eigenvalue method


def jacobi_matrix(params: JacobiParams, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the symmetric Jacobi matrix of size *n*.

    Writing the recurrence as :math:`x P_m = (P_{m+1} + b_m P_m + c_m P_{m-1}) / a_m`
    gives diagonal :math:`b_m / a_m` and off-diagonal
    :math:`\\sqrt{c_{m+1} / (a_m a_{m+1})}` after symmetrization. The first row
    comes from :math:`P_1` directly, which also covers :math:`\\lambda + \\nu = -1`
    without special cases.
    """
    lam, nu = params.lam, params.nu
    m = np.arange(n, dtype=float)

    a = np.empty(n)
    b = np.empty(n)
    a[0] = 0.5 * (lam + nu + 2.0)
    b[0] = 0.5 * (nu - lam)

    k = m[1:]
    s = 2.0 * k + lam + nu
    denom = (k + 1.0) * (k + lam + nu + 1.0)
    a[1:] = (s + 1.0) * (s + 2.0) / (2.0 * denom)
    b[1:] = (nu * nu - lam * lam) * (s + 1.0) / (2.0 * denom * s)
    c = (k + lam) * (k + nu) * (s + 2.0) / (denom * s)

    diag = b / a
    offdiag = np.sqrt(c / (a[:-1] * a[1:]))
    return diag, offdiag


def _first_components(diag: np.ndarray, offdiag: np.ndarray, x: np.ndarray) -> np.ndarray:
    r"""Squared first components of the normalized eigenvectors for eigenvalues *x*.

    The eigenvector for the eigenvalue :math:`x_k` is the vector of
    orthonormal polynomial values :math:`(\hat p_0(x_k), \dots, \hat p_{n-1}(x_k))`,
    so its normalized first component squared is
    :math:`\hat p_0^2 / \sum_j \hat p_j(x_k)^2`. The values follow from the
    symmetric recurrence and need only :math:`O(n)` memory.
    """
    n = diag.size
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    total = np.ones_like(x)
    for m in range(n - 1):
        p_next = (x - diag[m]) * p
        if m > 0:
            p_next -= offdiag[m - 1] * p_prev
        p_prev, p = p, p_next / offdiag[m]
        total += p * p

    return 1.0 / total


def rule_eigen(params: JacobiParams, n: int) -> QuadratureRule:
    """Build the *n*-point rule from the eigen-decomposition of the Jacobi matrix.

    Up to ``settings.eigenvector_max_n`` nodes the eigenvectors are computed by
    the tridiagonal eigensolver. Beyond that only the eigenvalues are, and the
    first eigenvector components are formed from the recurrence, which keeps
    memory linear in *n*.
    """
    n = _check_n(n)
    diag, offdiag = jacobi_matrix(params, n)

    try:
        if n == 1:
            nodes, v0sq = diag.copy(), np.ones(1)
        elif n <= settings.eigenvector_max_n:
            nodes, vecs = sla.eigh_tridiagonal(diag, offdiag)
            v0sq = vecs[0] ** 2
        else:
            nodes = sla.eigh_tridiagonal(diag, offdiag, eigvals_only=True)
            v0sq = _first_components(diag, offdiag, nodes)
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"tridiagonal eigensolver failed: {exc}") from exc

    order = np.argsort(nodes)
    return QuadratureRule(
        params=params,
        n=n,
        nodes=nodes[order],
        weights=params.mu0 * v0sq[order],
        method=Method.EIGEN,
    )


# }}}


# {{{ Newton method


def _interior_guess(lam: float, nu: float, n: int, k: np.ndarray) -> np.ndarray:
    rho = n + 0.5 * (lam + nu + 1.0)
    t = (k + 0.5 * lam - 0.25) * np.pi / rho
    return t + (
        (0.25 - lam**2) / np.tan(0.5 * t) - (0.25 - nu**2) * np.tan(0.5 * t)
    ) / (4.0 * rho**2)


def _boundary_guess(
    lam: float, nu: float, n: int, count: int, kind: str
) -> np.ndarray:
    j = bessel_j_zeros(lam, count)
    rho = n + 0.5 * (lam + nu + 1.0)

    if kind == "gatteschi":
        gamma = np.sqrt(rho**2 + (1.0 - lam**2 - 3.0 * nu**2) / 12.0)
        return (j / gamma) * (
            1.0 - (4.0 - lam**2 - 15.0 * nu**2) / (720.0 * gamma**4)
            * (0.5 * j**2 + lam**2 - 1.0)
        )

    if kind == "olver":
        psi = j / rho
        return (
            psi
            + (lam**2 - 0.25) * (psi / np.tan(psi) - 1.0) / (2.0 * rho**2 * psi)
            - (lam**2 - nu**2) * np.tan(0.5 * psi) / (4.0 * rho**2)
        )

    raise DomainError(f"unknown boundary guess {kind!r}")


def initial_guesses(lam: float, nu: float, n: int, count: int) -> np.ndarray:
    r"""Estimates of the *count* smallest zeros in :math:`\theta` of :math:`P_n(\cos\theta)`.

    The :math:`\lceil n/4 \rceil` zeros nearest :math:`\theta = 0` use a
    Bessel-zero based formula, the remaining ones an interior formula.
    """
    k = np.arange(1, count + 1, dtype=float)
    theta = _interior_guess(lam, nu, n, k)

    nb = min(count, -(-n // 4))
    if nb > 0:
        theta[:nb] = _boundary_guess(lam, nu, n, nb, settings.boundary_guess)

    return theta


class _Evaluator:
    """Evaluates :math:`P_n` and :math:`P_{n-1}` either by recurrence or expansion."""

    def __init__(self, lam: float, nu: float, n: int, theta0: np.ndarray) -> None:
        self.lam = lam
        self.nu = nu
        self.n = n

        if n >= settings.asymptotic_min_n and in_asymptotic_range(JacobiParams(lam, nu)):
            cutoff = settings.boundary_threshold / math.sqrt(n)
            _, bound = interior_series(lam, nu, n, theta0, settings.series_terms)
            amplitude = math.exp(
                2.0 * (n + 0.5 * (lam + nu + 1.0)) * math.log(2.0)
                + lgamma(n + lam + 1.0)
                + lgamma(n + nu + 1.0)
                - lgamma(2.0 * n + lam + nu + 2.0)
                - math.log(math.pi)
            ) / (np.sin(0.5 * theta0) ** (lam + 0.5) * np.cos(0.5 * theta0) ** (nu + 0.5))
            self.use_series = (bound <= settings.series_tol * amplitude) & (
                theta0 >= cutoff
            )
        else:
            self.use_series = np.zeros(theta0.shape, dtype=bool)

    def __call__(
        self, theta: np.ndarray, idx: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        p = np.empty_like(theta)
        p_prev = np.empty_like(theta)

        series = self.use_series[idx]
        if np.any(series):
            th = theta[series]
            p[series], _ = interior_series(self.lam, self.nu, self.n, th, settings.series_terms)
            p_prev[series], _ = interior_series(
                self.lam, self.nu, self.n - 1, th, settings.series_terms
            )

        rec = ~series
        if np.any(rec):
            p[rec], p_prev[rec] = _values(self.lam, self.nu, self.n, theta[rec])

        return p, p_prev


def _values(
    lam: float, nu: float, n: int, theta: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    return recurrence_values_shifted(lam, nu, n, 2.0 * np.sin(0.5 * theta) ** 2)


def _dtheta(
    lam: float, nu: float, n: int, theta: np.ndarray, p: np.ndarray, p_prev: np.ndarray
) -> np.ndarray:
    r""":math:`\mathrm{d}/\mathrm{d}\theta\, P_n(\cos\theta)` from the mixed relation."""
    s = 2.0 * n + lam + nu
    x = np.cos(theta)
    return -(n * (lam - nu - s * x) * p + 2.0 * (n + lam) * (n + nu) * p_prev) / (
        s * np.sin(theta)
    )


def _bisect(lam: float, nu: float, n: int, lo: float, hi: float) -> float | None:
    (flo,), _ = _values(lam, nu, n, np.array([lo]))
    (fhi,), _ = _values(lam, nu, n, np.array([hi]))
    if flo == 0.0:
        return lo
    if np.sign(flo) == np.sign(fhi):
        return None

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        (fmid,), _ = _values(lam, nu, n, np.array([mid]))
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi = mid

    return 0.5 * (lo + hi)


def _newton_side(
    lam: float, nu: float, n: int, count: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Converge the *count* zeros nearest :math:`x = 1`.

    Returns the angles, the :math:`\\theta`-derivatives at the zeros and a mask
    of nodes that failed to converge.
    """
    theta = initial_guesses(lam, nu, n, count)
    evaluate = _Evaluator(lam, nu, n, theta)

    active = np.arange(count)
    for _ in range(settings.newton_max_iter):
        th = theta[active]
        p, p_prev = evaluate(th, active)
        delta = p / _dtheta(lam, nu, n, th, p, p_prev)
        theta[active] = th - delta

        done = np.abs(delta) <= settings.newton_tol
        active = active[~done & np.isfinite(delta)]
        if active.size == 0:
            break

    failed = np.zeros(count, dtype=bool)
    failed[active] = True
    failed |= ~np.isfinite(theta) | (theta <= 0.0) | (theta >= np.pi)

    # the stopping test is absolute, but near a strong endpoint singularity the
    # first angles are O(1/n^2) and the weights need them to full relative
    # accuracy; one more step is at roundoff level by quadratic convergence
    all_idx = np.arange(count)
    th = np.where(failed, 1.0, theta)
    p, p_prev = evaluate(th, all_idx)
    theta = np.where(failed, theta, th - p / _dtheta(lam, nu, n, th, p, p_prev))

    p, p_prev = evaluate(np.where(failed, 1.0, theta), all_idx)
    return theta, _dtheta(lam, nu, n, theta, p, p_prev), failed


def _repair(
    lam: float,
    nu: float,
    n: int,
    theta: np.ndarray,
    dtheta: np.ndarray,
    failed: np.ndarray,
    index_of: Callable[[int], int],
) -> None:
    """Retry diverged nodes by bisection between their converged neighbours."""
    count = theta.size
    bad = failed.copy()
    if count > 1:
        bad[1:] |= np.diff(theta) <= 0
        bad[:-1] |= np.diff(theta) <= 0

    for k in np.flatnonzero(bad):
        lo = theta[k - 1] if k > 0 and not bad[k - 1] else 0.0
        if k + 1 < count and not bad[k + 1]:
            hi = theta[k + 1]
        else:
            hi = (k + 1.5) * np.pi / (n + 0.5 * (lam + nu + 1.0))
        hi = min(hi, np.pi)

        root = _bisect(lam, nu, n, lo + 1e-300, hi)
        if root is None:
            raise NewtonDivergenceError(
                f"Newton iteration failed for node {index_of(k)} of {n}",
                index=index_of(k),
            )

        theta[k] = root
        p, p_prev = _values(lam, nu, n, np.array([root]))
        dtheta[k] = _dtheta(lam, nu, n, np.array([root]), p, p_prev)[0]
        bad[k] = False


def in_asymptotic_range(params: JacobiParams) -> bool:
    r"""Whether both exponents lie in :math:`[-\tfrac12, \tfrac12]`."""
    return abs(params.lam) <= 0.5 and abs(params.nu) <= 0.5


def rule_newton_params(params: JacobiParams, n: int) -> QuadratureRule:
    """Build the rule by Newton iteration in :math:`\theta = \arccos x`.

    For ``n < settings.newton_min_n`` the rule comes from :func:`rule_eigen`.
    Exponents outside :math:`[-\tfrac12, \tfrac12]` keep the Newton path but
    evaluate every iterate by the recurrence instead of the interior series.
    """
    n = _check_n(n)
    if n < settings.newton_min_n:
        return rule_eigen(params, n)

    lam, nu = params.lam, params.nu
    n_left = n // 2
    n_right = n - n_left

    # zeros near x = 1 come from P^{(lam, nu)}, zeros near x = -1 from
    # P^{(nu, lam)}(-x), so that all angles stay below about pi/2
    th_r, dth_r, fail_r = _newton_side(lam, nu, n, n_right)
    _repair(lam, nu, n, th_r, dth_r, fail_r, lambda k: n - k)
    th_l, dth_l, fail_l = _newton_side(nu, lam, n, n_left)
    _repair(nu, lam, n, th_l, dth_l, fail_l, lambda k: k + 1)

    nodes = np.concatenate([-np.cos(th_l), np.cos(th_r)[::-1]])
    dth = np.concatenate([dth_l, dth_r[::-1]])

    log_cn = (
        (lam + nu + 1.0) * math.log(2.0)
        + lgamma(n + lam + 1.0)
        + lgamma(n + nu + 1.0)
        - lgamma(n + 1.0)
        - lgamma(n + lam + nu + 1.0)
    )
    weights = math.exp(log_cn) / dth**2

    if np.any(np.diff(nodes) <= 0):
        k = int(np.argmin(np.diff(nodes))) + 1
        raise NewtonDivergenceError(
            f"Newton iteration produced coincident nodes near node {k} of {n}",
            index=k,
        )

    return QuadratureRule(
        params=params, n=n, nodes=nodes, weights=weights, method=Method.NEWTON
    )


def rule_newton(alpha: float, n: int) -> QuadratureRule:
    r"""Fractional rule for the weight :math:`(1 - x)^{\alpha - 1}` by Newton iteration."""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got alpha={alpha}")
    return rule_newton_params(JacobiParams.fractional(alpha), n)


# }}}


# {{{ cached access


@lru_cache(maxsize=256)
def _cached_rule(lam: float, nu: float, n: int, method: Method) -> QuadratureRule:
    params = JacobiParams(lam, nu)
    if method is Method.EIGEN:
        return rule_eigen(params, n)
    return rule_newton_params(params, n)


def get_rule(
    params: JacobiParams, n: int, method: Method | str = Method.NEWTON
) -> QuadratureRule:
    """Return a (cached) rule for *params*; safe to call from several threads."""
    method = Method(method)
    return _cached_rule(float(params.lam), float(params.nu), _check_n(n), method)


# }}}


# {{{ application


def evaluate_on(f: Callable[..., Any], x: np.ndarray) -> np.ndarray:
    """Evaluate *f* on the array *x*, falling back to pointwise calls."""
    try:
        fx = np.asarray(f(x), dtype=float)
        if fx.shape != x.shape:
            fx = np.broadcast_to(fx, x.shape).astype(float)
    except (TypeError, ValueError):
        fx = np.array([float(f(xi)) for xi in x.ravel()]).reshape(x.shape)

    if not np.all(np.isfinite(fx)):
        raise NonFiniteError("integrand is not finite at a quadrature node")

    return fx


def integrate(rule: QuadratureRule, f: Callable[..., Any]) -> float:
    r"""Apply *rule* to *f*, i.e. :math:`\sum_k w_k f(x_k)`."""
    return float(np.dot(rule.weights, evaluate_on(f, rule.nodes)))


def error_bound(alpha: float, n: int, sup_f2n: float, scale: float = 1.0) -> ErrorBound:
    r"""Bound on the remainder of the *n*-point fractional rule.

    .. math::

        |E_n^\alpha(f)| \le s \frac{\sup |f^{(2n)}|}{(2n)!}
            \frac{2^{2n + \alpha} (n!)^2}{2n + \alpha}
            \left(\frac{\Gamma(n + \alpha)}{\Gamma(2n + \alpha)}\right)^2,

    where the right-hand side without the supremum is the weighted integral of
    the squared monic orthogonal polynomial and :math:`s` is the *scale* of
    the mapped interval (e.g. :math:`(x/2)^\alpha / \Gamma(\alpha)`).
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got alpha={alpha}")
    n = _check_n(n)
    if not sup_f2n >= 0:
        raise DomainError(f"derivative bound must be non-negative, got {sup_f2n}")
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")

    if sup_f2n == 0:
        return ErrorBound(0.0, 2 * n, 0.0)

    log_bound = (
        math.log(scale)
        + math.log(sup_f2n)
        - lgamma(2.0 * n + 1.0)
        + (2.0 * n + alpha) * math.log(2.0)
        + 2.0 * lgamma(n + 1.0)
        - math.log(2.0 * n + alpha)
        + 2.0 * (lgamma(n + alpha) - lgamma(2.0 * n + alpha))
    )
    return ErrorBound(math.exp(log_bound), 2 * n, float(sup_f2n))


# }}}
