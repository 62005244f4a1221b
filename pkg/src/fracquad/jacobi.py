r"""Jacobi polynomials :math:`P_n^{(\lambda, \nu)}` and their fractional
specialization :math:`f_n^{\alpha - 1} = P_n^{(\alpha - 1, 0)}`.

The polynomials are orthogonal on :math:`[-1, 1]` with respect to the weight
:math:`(1 - x)^\lambda (1 + x)^\nu`. Values come from the forward three-term
recurrence, derivatives from the mixed relation

.. math::

    (2n + \lambda + \nu)(1 - x^2) P_n'(x) =
        n(\lambda - \nu - (2n + \lambda + \nu) x) P_n(x)
        + 2 (n + \lambda)(n + \nu) P_{n - 1}(x),

and, for large :math:`n`, an interior asymptotic expansion in
:math:`\theta = \arccos x`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from fracquad.config import settings
from fracquad.errors import DomainError, RegionError
from fracquad.specfun import lgamma, pochhammer

ArrayOrScalar = Union[float, np.ndarray]

#: Largest degree accepted by :func:`eval_explicit`.
EXPLICIT_MAX_DEGREE = 20

# below this value of 1 - x^2 the mixed derivative relation loses too many
# digits and the shifted-parameter formula is used instead
_ENDPOINT_GAP = 1.0e-2


@dataclass(frozen=True)
class JacobiParams:
    r"""Exponents of the Jacobi weight :math:`(1 - x)^\lambda (1 + x)^\nu`."""

    lam: float
    nu: float

    def __post_init__(self) -> None:
        if not (self.lam > -1.0 and self.nu > -1.0):
            raise DomainError(
                f"Jacobi parameters must exceed -1, got lambda={self.lam}, nu={self.nu}"
            )

    @classmethod
    def fractional(cls, alpha: float) -> JacobiParams:
        r"""The pair :math:`(\alpha - 1, 0)` used by the fractional rules."""
        if not alpha > 0:
            raise DomainError(f"alpha must be positive, got alpha={alpha}")
        return cls(alpha - 1.0, 0.0)

    def swapped(self) -> JacobiParams:
        r"""Parameters of :math:`P_n^{(\nu, \lambda)}(-x)`."""
        return JacobiParams(self.nu, self.lam)

    @property
    def mu0(self) -> float:
        """Zeroth moment of the weight over :math:`[-1, 1]`."""
        return math.exp(
            (self.lam + self.nu + 1.0) * math.log(2.0)
            + lgamma(self.lam + 1.0)
            + lgamma(self.nu + 1.0)
            - lgamma(self.lam + self.nu + 2.0)
        )


@dataclass(frozen=True)
class PolyEval:
    """Value and first derivative of a polynomial of given *degree* at *x*."""

    value: ArrayOrScalar
    derivative: ArrayOrScalar
    degree: int
    x: ArrayOrScalar


def _check_degree(n: int) -> int:
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a non-negative integer, got n={n}")
    return int(n)


def _check_interval(x: ArrayOrScalar) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("evaluation points must be finite")
    if np.any(np.abs(x) > 1.0):
        raise DomainError("evaluation points must lie in [-1, 1]")
    return x


def _unwrap(x: np.ndarray) -> ArrayOrScalar:
    return float(x) if x.ndim == 0 else x


# {{{ recurrence


def recurrence_values(
    lam: float, nu: float, n: int, x: ArrayOrScalar
) -> tuple[np.ndarray, np.ndarray]:
    r"""Return :math:`(P_n(x), P_{n-1}(x))` from the three-term recurrence.

    For :math:`n = 0` the second entry is zero. The recurrence

    .. math::

        P_{k + 1} = (a_k x - b_k) P_k - c_k P_{k - 1}

    already holds for :math:`k = 1`, so it is run from :math:`P_0, P_1`.
    """
    x = np.asarray(x, dtype=float)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    if n == 0:
        return p, p_prev

    p_prev, p = p, 0.5 * (lam + nu + 2.0) * x + 0.5 * (lam - nu)
    for k in range(1, n):
        s = 2.0 * k + lam + nu
        denom = (k + 1.0) * (k + lam + nu + 1.0)
        a = (s + 1.0) * (s + 2.0) / (2.0 * denom)
        b = (nu * nu - lam * lam) * (s + 1.0) / (2.0 * denom * s)
        c = (k + lam) * (k + nu) * (s + 2.0) / (denom * s)
        p_prev, p = p, (a * x - b) * p - c * p_prev

    return p, p_prev


def recurrence_values_shifted(
    lam: float, nu: float, n: int, u: ArrayOrScalar
) -> tuple[np.ndarray, np.ndarray]:
    r"""Same as :func:`recurrence_values` with the argument given as ``u = 1 - x``.

    Passing :math:`u = 2\sin^2(\theta/2)` keeps full relative accuracy in
    :math:`\theta` near :math:`x = 1`, where :math:`\cos\theta` itself
    cannot resolve the angle.
    """
    u = np.asarray(u, dtype=float)
    p_prev = np.zeros_like(u)
    p = np.ones_like(u)
    if n == 0:
        return p, p_prev

    p_prev, p = p, (lam + 1.0) - 0.5 * (lam + nu + 2.0) * u
    for k in range(1, n):
        s = 2.0 * k + lam + nu
        denom = (k + 1.0) * (k + lam + nu + 1.0)
        a = (s + 1.0) * (s + 2.0) / (2.0 * denom)
        b = (nu * nu - lam * lam) * (s + 1.0) / (2.0 * denom * s)
        c = (k + lam) * (k + nu) * (s + 2.0) / (denom * s)
        p_prev, p = p, ((a - b) - a * u) * p - c * p_prev

    return p, p_prev


def _derivative(
    lam: float, nu: float, n: int, x: np.ndarray, p: np.ndarray, p_prev: np.ndarray
) -> np.ndarray:
    if n == 0:
        return np.zeros_like(x)

    gap = 1.0 - x * x
    near = gap <= _ENDPOINT_GAP
    dp = np.empty_like(x)

    interior = ~near
    if np.any(interior):
        xi = x[interior]
        s = 2.0 * n + lam + nu
        dp[interior] = (
            n * (lam - nu - s * xi) * p[interior]
            + 2.0 * (n + lam) * (n + nu) * p_prev[interior]
        ) / (s * gap[interior])

    if np.any(near):
        # d/dx P_n^{(l, v)} = (n + l + v + 1)/2 P_{n-1}^{(l+1, v+1)}
        q, _ = recurrence_values(lam + 1.0, nu + 1.0, n - 1, x[near])
        dp[near] = 0.5 * (n + lam + nu + 1.0) * q

    return dp


def eval_recurrence(params: JacobiParams, n: int, x: ArrayOrScalar) -> PolyEval:
    r"""Evaluate :math:`P_n^{(\lambda, \nu)}(x)` and its derivative on :math:`[-1, 1]`."""
    n = _check_degree(n)
    xa = _check_interval(x)
    xv = np.atleast_1d(xa)

    p, p_prev = recurrence_values(params.lam, params.nu, n, xv)
    dp = _derivative(params.lam, params.nu, n, xv, p, p_prev)

    if xa.ndim == 0:
        return PolyEval(float(p[0]), float(dp[0]), n, float(xa))
    return PolyEval(p, dp, n, xa)


def eval_explicit(params: JacobiParams, n: int, x: float) -> float:
    r"""Evaluate :math:`P_n^{(\lambda, \nu)}(x)` from its finite hypergeometric sum

    .. math::

        P_n^{(\lambda, \nu)}(x) = \sum_{k = 0}^n
            \frac{(n + \lambda + \nu + 1)_k (\lambda + k + 1)_{n - k}}{k! (n - k)!}
            \left(\frac{x - 1}{2}\right)^k.

    This is a reference implementation used to validate the recurrence.
    """
    n = _check_degree(n)
    if n > EXPLICIT_MAX_DEGREE:
        raise DomainError(
            f"explicit form is limited to n <= {EXPLICIT_MAX_DEGREE}, got n={n}"
        )

    # individually rounded terms lose ~1e-10 to cancellation near x = -1, so
    # the sum is formed exactly in rationals and rounded once
    lam, nu = Fraction(params.lam), Fraction(params.nu)
    u = (Fraction(float(x)) - 1) / 2
    total = Fraction(0)
    for k in range(n + 1):
        term = u**k / (math.factorial(k) * math.factorial(n - k))
        for i in range(k):
            term *= n + lam + nu + 1 + i
        for i in range(n - k):
            term *= lam + k + 1 + i
        total += term

    return float(total)


# }}}


# {{{ fractional


def frac_recurrence_values(
    alpha: float, n: int, x: ArrayOrScalar
) -> tuple[np.ndarray, np.ndarray]:
    r"""Return :math:`(f_n^{\alpha - 1}(x), f_{n - 1}^{\alpha - 1}(x))`.

    Uses the specialized recurrence

    .. math::

        f_{k + 1} = (A_k x + B_k) f_k - C_k f_{k - 1},

    valid from :math:`k = 1`, started from
    :math:`f_1 = \tfrac{1}{2}(\alpha + 1) x + \tfrac{1}{2}(\alpha - 1)`.
    """
    x = np.asarray(x, dtype=float)
    f_prev = np.zeros_like(x)
    f = np.ones_like(x)
    if n == 0:
        return f, f_prev

    # P_1 with lambda = alpha - 1 and nu = 0; the closed form (alpha - 1)(x + 1)/2
    # vanishes identically at alpha = 1 and fails the explicit-sum check
    f_prev, f = f, 0.5 * (alpha + 1.0) * x + 0.5 * (alpha - 1.0)
    for k in range(1, n):
        s = 2.0 * k + alpha
        A = s * (s + 1.0) / (2.0 * (k + 1.0) * (k + alpha))
        B = (alpha - 1.0) ** 2 * s / (2.0 * (k + 1.0) * (s - 1.0) * (k + alpha))
        C = k * (k + alpha - 1.0) * (s + 1.0) / ((k + 1.0) * (k + alpha) * (s - 1.0))
        f_prev, f = f, (A * x + B) * f - C * f_prev

    return f, f_prev


def frac_eval(alpha: float, n: int, x: ArrayOrScalar) -> PolyEval:
    r"""Evaluate :math:`f_n^{\alpha - 1}(x)` and its derivative.

    The derivative uses

    .. math::

        (2n + \alpha - 1)(1 - x^2) f_n'(x) =
            n(\alpha - 1 - (2n + \alpha - 1) x) f_n(x)
            + 2n(n + \alpha - 1) f_{n - 1}(x),

    which is the general mixed relation at :math:`\lambda = \alpha - 1`,
    :math:`\nu = 0`.
    """
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got alpha={alpha}")

    n = _check_degree(n)
    xa = _check_interval(x)
    xv = np.atleast_1d(xa)

    f, f_prev = frac_recurrence_values(alpha, n, xv)
    if n == 0:
        df = np.zeros_like(xv)
    else:
        gap = 1.0 - xv * xv
        near = gap <= _ENDPOINT_GAP
        df = np.empty_like(xv)
        s = 2.0 * n + alpha - 1.0
        interior = ~near
        df[interior] = (
            n * (alpha - 1.0 - s * xv[interior]) * f[interior]
            + 2.0 * n * (n + alpha - 1.0) * f_prev[interior]
        ) / (s * gap[interior])
        if np.any(near):
            df[near] = _derivative(
                alpha - 1.0, 0.0, n, xv[near], f[near], f_prev[near]
            )

    if xa.ndim == 0:
        return PolyEval(float(f[0]), float(df[0]), n, float(xa))
    return PolyEval(f, df, n, xa)


# }}}


# {{{ asymptotics


@dataclass(frozen=True)
class AsymptoticValue:
    """Asymptotic approximation together with its truncation error bound."""

    value: ArrayOrScalar
    bound: ArrayOrScalar


def interior_series(
    lam: float, nu: float, n: int, theta: ArrayOrScalar, M: int
) -> tuple[np.ndarray, np.ndarray]:
    r"""Interior expansion of :math:`P_n^{(\lambda, \nu)}(\cos\theta)` with *M* terms.

    With :math:`\rho = n + (\lambda + \nu + 1)/2`,

    .. math::

        \sin^{\lambda + 1/2}\tfrac{\theta}{2} \cos^{\nu + 1/2}\tfrac{\theta}{2}
        P_n(\cos\theta)
        = \frac{2^{2\rho} B(n + \lambda + 1, n + \nu + 1)}{\pi}
        \sum_{m = 0}^{M - 1} \frac{f_m(\theta)}{2^m (2\rho + 1)_m} + V_M,

    where

    .. math::

        f_m(\theta) = \sum_{l = 0}^m
            \frac{C_{m, l} \cos\theta_{m, l}}
                 {l! (m - l)! \sin^l\frac{\theta}{2} \cos^{m - l}\frac{\theta}{2}},
        \qquad
        \theta_{m, l} = \tfrac{1}{2}(2\rho + m)\theta
            - \tfrac{1}{2}(\lambda + l + \tfrac{1}{2})\pi,

    and :math:`C_{m, l} = (\tfrac12 + \lambda)_l (\tfrac12 - \lambda)_l
    (\tfrac12 + \nu)_{m - l} (\tfrac12 - \nu)_{m - l}`. For
    :math:`\lambda, \nu \in [-\tfrac12, \tfrac12]` the remainder is bounded by
    twice the envelope of the first neglected term (each
    :math:`\cos\theta_{M, l}` replaced by one), returned as the second entry.
    """
    theta = np.asarray(theta, dtype=float)
    rho = n + 0.5 * (lam + nu + 1.0)
    log_prefactor = (
        2.0 * rho * math.log(2.0)
        + lgamma(n + lam + 1.0)
        + lgamma(n + nu + 1.0)
        - lgamma(2.0 * n + lam + nu + 2.0)
        - math.log(math.pi)
    )

    sh = np.sin(0.5 * theta)
    ch = np.cos(0.5 * theta)

    total = np.zeros_like(theta)
    last = np.zeros_like(theta)
    for m in range(M + 1):
        fm = np.zeros_like(theta)
        for l in range(m + 1):  # noqa: E741
            C = (
                pochhammer(0.5 + lam, l)
                * pochhammer(0.5 - lam, l)
                * pochhammer(0.5 + nu, m - l)
                * pochhammer(0.5 - nu, m - l)
            )
            if C == 0.0:
                continue
            coeff = C / (math.factorial(l) * math.factorial(m - l) * sh**l * ch ** (m - l))
            if m < M:
                angle = 0.5 * (2.0 * rho + m) * theta - 0.5 * (lam + l + 0.5) * math.pi
                fm += coeff * np.cos(angle)
            else:
                # the bound uses the envelope of the neglected term, |cos| <= 1
                fm += np.abs(coeff)

        term = fm / (2.0**m * pochhammer(2.0 * rho + 1.0, m))
        if m < M:
            total += term
        else:
            last = term

    scale = math.exp(log_prefactor) / (sh ** (lam + 0.5) * ch ** (nu + 0.5))
    return total * scale, 2.0 * np.abs(last) * scale


def asymptotic_eval(alpha: float, n: int, theta: ArrayOrScalar, M: int) -> AsymptoticValue:
    r"""Large-:math:`n` approximation of :math:`f_n^{\alpha - 1}(\cos\theta)`.

    Only valid away from the endpoints: *theta* and :math:`\pi - \theta` must
    both be at least :math:`c / \sqrt{n}`, with :math:`c` given by
    :attr:`~fracquad.config.Settings.boundary_threshold`.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got alpha={alpha}")
    if n < settings.newton_min_n:
        raise DomainError(
            f"asymptotic evaluation needs n >= {settings.newton_min_n}, got n={n}"
        )
    if not 1 <= M <= 5:
        raise DomainError(f"number of terms must lie in [1, 5], got M={M}")

    th = np.asarray(theta, dtype=float)
    cutoff = settings.boundary_threshold / math.sqrt(n)
    if np.any(th < cutoff) or np.any(np.pi - th < cutoff):
        raise RegionError(
            f"theta must lie in [{cutoff:.3g}, pi - {cutoff:.3g}] for n={n}"
        )

    value, bound = interior_series(alpha - 1.0, 0.0, n, th, M)
    return AsymptoticValue(_unwrap(value), _unwrap(bound))


# }}}
