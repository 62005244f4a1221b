"""Built-in benchmark problems with their reference solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from fracquad.errors import DomainError
from fracquad.fde import CaputoIVP
from fracquad.fvp import FvpProblem
from fracquad.specfun import EvalAccuracy, gamma, hyp1f1, mittag_leffler

# the closed forms below are summed far past double precision so that the
# reference values are correctly rounded
_REFERENCE_ACCURACY = EvalAccuracy(rel_tol=1e-17)


def sin_integral_exact(alpha: float, t: float | np.ndarray) -> float | np.ndarray:
    r"""Closed form of :math:`{}_0 I_t^\alpha \sin t`,

    .. math::

        \frac{t^\alpha}{2i\Gamma(\alpha + 1)}
        \left[{}_1F_1(1; \alpha + 1; it) - {}_1F_1(1; \alpha + 1; -it)\right].
    """
    ta = np.asarray(t, dtype=float)
    values = []
    for ti in np.atleast_1d(ta):
        diff = hyp1f1(1.0, alpha + 1.0, 1j * ti, _REFERENCE_ACCURACY) - hyp1f1(
            1.0, alpha + 1.0, -1j * ti, _REFERENCE_ACCURACY
        )
        values.append((ti**alpha / (2j * gamma(alpha + 1.0)) * diff).real)

    result = np.array(values)
    return float(result[0]) if ta.ndim == 0 else result


def caputo_power_exact(alpha: float, mu: float, t: float | np.ndarray) -> float | np.ndarray:
    r"""Caputo derivative of :math:`t^\mu`, :math:`\Gamma(\mu + 1) t^{\mu - \alpha} / \Gamma(\mu + 1 - \alpha)`."""
    return gamma(mu + 1.0) / gamma(mu + 1.0 - alpha) * np.asarray(t, dtype=float) ** (
        mu - alpha
    )


# {{{ initial-value problems


def polynomial_ivp_forcing(alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    """Forcing that makes ``t^5 - 3 t^4 + 2 t^3`` solve ``D^alpha y + y^2 = f``."""

    def f(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        y = t**5 - 3 * t**4 + 2 * t**3
        return (
            120 * t ** (5 - alpha) / gamma(6 - alpha)
            - 72 * t ** (4 - alpha) / gamma(5 - alpha)
            + 12 * t ** (3 - alpha) / gamma(4 - alpha)
            + y**2
        )

    return f


def polynomial_ivp_exact(t: float | np.ndarray) -> float | np.ndarray:
    t = np.asarray(t, dtype=float)
    return t**5 - 3 * t**4 + 2 * t**3


def oscillator_green(alpha: float, t: float) -> float:
    r"""Green kernel :math:`t^{\alpha - 1} E_{\alpha, \alpha}(-t^\alpha)` of
    :math:`{}^C D^\alpha y + y`."""
    if t == 0.0:
        return 0.0 if alpha > 1 else math.inf
    return t ** (alpha - 1.0) * mittag_leffler(alpha, alpha, -(t**alpha))


def oscillator_exact(alpha: float, t: float | np.ndarray) -> float | np.ndarray:
    r"""Reference solution of :math:`{}^C D^\alpha y + y = t e^{-t}` with zero data.

    The convolution :math:`\int_0^t G(t - x) x e^{-x} \,\mathrm{d}x` is
    integrated adaptively with the algebraic weight :math:`(t - x)^{\alpha - 1}`
    split off.
    """
    ta = np.asarray(t, dtype=float)
    values = []
    for ti in np.atleast_1d(ta):
        if ti == 0.0:
            values.append(0.0)
            continue

        def integrand(x: float, ti: float = ti) -> float:
            # quad may sample a rounding error past the endpoint
            lag = max(ti - x, 0.0)
            return mittag_leffler(alpha, alpha, -(lag**alpha)) * x * math.exp(-x)

        value, _ = integrate.quad(
            integrand, 0.0, ti, weight="alg", wvar=(0.0, alpha - 1.0),
            epsabs=1e-14, epsrel=1e-12, limit=200,
        )
        values.append(value)

    result = np.array(values)
    return float(result[0]) if ta.ndim == 0 else result


# }}}


@dataclass(frozen=True)
class IvpBenchmark:
    name: str
    problem: CaputoIVP
    reference: Callable[[np.ndarray], np.ndarray] | None


@dataclass(frozen=True)
class FvpBenchmark:
    name: str
    problem: FvpProblem
    reference: Callable[[np.ndarray], np.ndarray]


def ex53(alpha: float = 1.5, horizon: float = 1.0) -> IvpBenchmark:
    """``D^alpha y + y^2 = f`` with the polynomial solution ``t^5 - 3t^4 + 2t^3``."""
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"ex5.3 needs alpha in (1, 2], got alpha={alpha}")
    f = polynomial_ivp_forcing(alpha)
    problem = CaputoIVP(alpha, (0.0, 0.0), lambda t, y: f(t) - y**2, horizon)
    return IvpBenchmark("ex5.3", problem, polynomial_ivp_exact)


def ex54(alpha: float = 1.5, horizon: float = 5.0) -> IvpBenchmark:
    """Fractional oscillator ``D^alpha y + y = t exp(-t)`` with zero data."""
    if not 1.0 < alpha <= 2.0:
        raise DomainError(f"ex5.4 needs alpha in (1, 2], got alpha={alpha}")
    problem = CaputoIVP(alpha, (0.0, 0.0), lambda t, y: t * np.exp(-t) - y, horizon)
    return IvpBenchmark("ex5.4", problem, lambda t: oscillator_exact(alpha, t))


def classical_fvp_solution(t: float | np.ndarray) -> float | np.ndarray:
    r"""Minimizer :math:`(e^t + e^{2 - t}) / (1 + e^2)` of :math:`\int_0^1 y'^2 + y^2`."""
    t = np.asarray(t, dtype=float)
    return (np.exp(t) + np.exp(2.0 - t)) / (1.0 + math.e**2)


def ex62(alpha: float = 1.5) -> FvpBenchmark:
    r"""Minimize :math:`\int_0^1 ({}^C D^\alpha y)^2 + y^2` with
    :math:`y(0) = 1`, :math:`y(1) = 2e / (1 + e^2)`.

    The Lagrangian is scaled by one half so that :math:`f = y^2 / 2` and
    :math:`g = y`; the reference is the classical limit :math:`\alpha \to 1`.
    """
    problem = FvpProblem(
        alpha=alpha,
        u_a=1.0,
        u_b=2.0 * math.e / (1.0 + math.e**2),
        g=lambda t, y: y,
        f_potential=lambda t, y: 0.5 * y**2,
    )
    return FvpBenchmark("ex6.2", problem, classical_fvp_solution)


IVP_PROBLEMS: dict[str, Callable[..., IvpBenchmark]] = {
    "ex5.3": ex53,
    "ex5.4": ex54,
}

FVP_PROBLEMS: dict[str, Callable[..., FvpBenchmark]] = {
    "ex6.2": ex62,
}

#: test points used by the integral table
TABLE1_POINTS = np.arange(17) * np.pi / 8
#: test points used by the derivative table
TABLE2_POINTS = np.arange(11) / 10
