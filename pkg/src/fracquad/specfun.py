r"""Special functions used throughout the package.

Gamma and log-gamma come from :mod:`math`, Bessel :math:`J_\nu` from
:mod:`scipy.special`. Bessel zeros, the Mittag-Leffler function and the
confluent hypergeometric series are implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as sc

from fracquad.errors import (
    AccuracyError,
    ConvergenceError,
    DomainError,
    PoleError,
    SpecialFunctionOverflow,
)

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EvalAccuracy:
    """Truncation control for the power series below."""

    rel_tol: float = 1e-13
    max_terms: int = 10_000

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_ACCURACY = EvalAccuracy()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


# {{{ gamma, beta, pochhammer


def gamma(x: float) -> float:
    """Euler's gamma function."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma argument must be finite, got {x}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at x={x:g}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise SpecialFunctionOverflow(f"gamma({x:g}) overflows") from None


def lgamma(x: float) -> float:
    """Logarithm of the absolute value of the gamma function."""
    if _is_nonpositive_integer(float(x)):
        raise PoleError(f"lgamma has a pole at x={x:g}")
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    r"""Euler's beta function :math:`B(a, b) = \Gamma(a)\Gamma(b)/\Gamma(a+b)`."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta requires a > 0 and b > 0, got a={a}, b={b}")

    if a + b < 170.0:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)

    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def pochhammer(a: float, l: int) -> float:  # noqa: E741
    """Rising factorial :math:`(a)_l = a (a + 1) ... (a + l - 1)`."""
    if l < 0 or int(l) != l:
        raise DomainError(f"pochhammer index must be a non-negative integer, got {l}")

    result = 1.0
    for i in range(int(l)):
        result *= a + i

    return result


# }}}


# {{{ bessel


def bessel_j(nu: float, z: float | np.ndarray) -> float | np.ndarray:
    r"""Bessel function of the first kind :math:`J_\nu(z)` for :math:`z \ge 0`."""
    if nu <= -1:
        raise DomainError(f"bessel_j order must be > -1, got nu={nu}")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise DomainError("bessel_j argument must be non-negative")

    result = sc.jv(nu, z)
    return float(result) if result.ndim == 0 else result


def mcmahon_zero_guess(nu: float, k: np.ndarray | int) -> np.ndarray:
    r"""McMahon's large-:math:`k` expansion for the zeros :math:`j_{\nu,k}`."""
    k = np.asarray(k, dtype=float)
    mu = 4.0 * nu * nu
    b = (k + 0.5 * nu - 0.25) * np.pi
    b8 = 8.0 * b

    return (
        b
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8**3)
        - 32.0 * (mu - 1.0) * (83.0 * mu**2 - 982.0 * mu + 3779.0) / (15.0 * b8**5)
    )


def bessel_j_zeros(nu: float, kmax: int, *, maxiter: int = 100) -> np.ndarray:
    r"""The first *kmax* positive zeros of :math:`J_\nu`, for :math:`-1 < \nu < 1`.

    Each zero is bracketed around its McMahon estimate and then polished by
    Newton's method, falling back to bisection whenever a Newton step leaves
    the bracket.
    """
    if not -1.0 < nu < 1.0:
        raise DomainError(f"bessel zero order must lie in (-1, 1), got nu={nu}")
    if kmax < 1:
        raise DomainError(f"number of zeros must be >= 1, got k={kmax}")

    k = np.arange(1, kmax + 1)
    guess = mcmahon_zero_guess(nu, k)

    # consecutive zeros are more than 2.4 apart for |nu| < 1, so a bracket of
    # half-width 1 around a guess that is off by less than ~0.2 is safe
    lo = np.maximum(guess - 1.0, 1e-3 * guess)
    hi = guess + 1.0
    # McMahon is poor for the first zero as nu -> -1, where j_1 ~ 2 sqrt(nu + 1);
    # J_nu > 0 below j_1, and j_1^2 < 2 (nu + 1)(nu + 3) stays below j_2
    lo[0] = 0.5 * math.sqrt(nu + 1.0)
    hi[0] = math.sqrt(2.0 * (nu + 1.0) * (nu + 3.0))
    guess[0] = min(max(guess[0], lo[0]), hi[0])
    flo = sc.jv(nu, lo)
    fhi = sc.jv(nu, hi)
    if np.any(np.sign(flo) == np.sign(fhi)):
        raise ConvergenceError(f"failed to bracket the zeros of J_{nu}")

    x = np.clip(guess, lo, hi)
    for _ in range(maxiter):
        fx = sc.jv(nu, x)
        left = np.sign(fx) == np.sign(flo)
        lo = np.where(left, x, lo)
        flo = np.where(left, fx, flo)
        hi = np.where(left, hi, x)

        dfx = sc.jv(nu - 1.0, x) - nu / x * fx
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - fx / dfx
        bad = ~np.isfinite(xn) | (xn <= lo) | (xn >= hi)
        xn = np.where(bad, 0.5 * (lo + hi), xn)

        step = np.abs(xn - x)
        x = xn
        if np.all(step <= 4.0 * _EPS * x):
            return x

    if np.all(hi - lo <= 1e-12):
        return x

    raise ConvergenceError(
        f"bessel zeros of J_{nu} did not converge in {maxiter} iterations"
    )


def bessel_j_zero(nu: float, k: int) -> float:
    r"""The *k*-th positive zero of :math:`J_\nu`."""
    if k < 1 or int(k) != k:
        raise DomainError(f"zero index must be a positive integer, got k={k}")
    return float(bessel_j_zeros(nu, int(k))[-1])


# }}}


# {{{ series


def _mp_sum(terms: list, dps: int) -> complex:
    with mpmath.workdps(dps):
        return complex(mpmath.fsum(terms))


def _dps_for(cancellation: float) -> int:
    return 20 + int(math.ceil(max(0.0, math.log10(max(cancellation, 1.0)))))


def mittag_leffler(
    alpha: float,
    beta: float,
    z: float,
    accuracy: EvalAccuracy = DEFAULT_ACCURACY,
) -> float:
    r"""Two-parameter Mittag-Leffler function

    .. math::

        E_{\alpha, \beta}(z) = \sum_{k = 0}^\infty \frac{z^k}{\Gamma(\alpha k + \beta)}.

    The terms are summed with compensation. If the alternating series loses
    more digits to cancellation than the tolerance allows, it is re-summed
    with :mod:`mpmath` at a working precision that covers the loss.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError(
            f"mittag_leffler requires alpha > 0 and beta > 0, got {alpha}, {beta}"
        )

    z = float(z)
    if z == 0.0:
        return 1.0 / gamma(beta)

    logz = math.log(abs(z))
    sign = -1.0 if z < 0 else 1.0

    terms = []
    peak = 0.0
    partial = 0.0
    prev_mag = math.inf
    for k in range(accuracy.max_terms):
        log_mag = k * logz - math.lgamma(alpha * k + beta)
        mag = math.exp(log_mag) if log_mag < 709.0 else math.inf
        if not math.isfinite(mag):
            raise AccuracyError(f"mittag_leffler terms overflow at z={z:g}")

        term = mag * sign**k
        terms.append(term)
        partial += term
        peak = max(peak, mag)

        if mag < prev_mag and mag <= accuracy.rel_tol * abs(partial):
            break
        prev_mag = mag
    else:
        raise AccuracyError(
            f"mittag_leffler did not converge within {accuracy.max_terms} terms"
        )

    result = math.fsum(terms)
    cancellation = peak / abs(result) if result != 0 else math.inf
    if cancellation * _EPS > accuracy.rel_tol:
        if not math.isfinite(cancellation):
            cancellation = peak / _EPS
        with mpmath.workdps(_dps_for(cancellation)):
            mz = mpmath.mpf(z)
            mp_terms = [
                mz**k / mpmath.gamma(alpha * k + beta) for k in range(len(terms))
            ]
        result = _mp_sum(mp_terms, _dps_for(cancellation)).real

    return result


def hyp1f1(
    p: float,
    q: float,
    z: complex,
    accuracy: EvalAccuracy = DEFAULT_ACCURACY,
) -> complex:
    r"""Confluent hypergeometric function

    .. math::

        {}_1F_1(p; q; z) = \sum_{k = 0}^\infty \frac{(p)_k}{(q)_k} \frac{z^k}{k!}

    for complex :math:`z`.
    """
    if _is_nonpositive_integer(q):
        raise PoleError(f"hyp1f1 is undefined for q={q:g}")

    z = complex(z)
    term = 1.0 + 0.0j
    re_terms = [1.0]
    im_terms = [0.0]
    partial = term
    peak = 1.0
    prev_mag = math.inf
    for k in range(accuracy.max_terms):
        term = term * (p + k) * z / ((q + k) * (k + 1))
        mag = abs(term)
        re_terms.append(term.real)
        im_terms.append(term.imag)
        partial += term
        peak = max(peak, mag)

        if mag == 0.0 or (mag < prev_mag and mag <= accuracy.rel_tol * abs(partial)):
            break
        prev_mag = mag
    else:
        raise AccuracyError(f"hyp1f1 did not converge within {accuracy.max_terms} terms")

    result = complex(math.fsum(re_terms), math.fsum(im_terms))
    cancellation = peak / abs(result) if result != 0 else math.inf
    if cancellation * _EPS > accuracy.rel_tol:
        if not math.isfinite(cancellation):
            cancellation = peak / _EPS
        dps = _dps_for(cancellation)
        with mpmath.workdps(dps):
            mt = mpmath.mpf(1)
            mz = mpmath.mpc(z)
            mp_terms = [mt]
            for k in range(len(re_terms) - 1):
                mt = mt * (p + k) * mz / ((q + k) * (k + 1))
                mp_terms.append(mt)
        result = _mp_sum(mp_terms, dps)

    return result


# }}}
