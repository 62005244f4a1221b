r"""Fractional integrals and Caputo derivatives through fractional Gauss-Jacobi rules.

After mapping :math:`[0, x]` to :math:`[-1, 1]`, the left Riemann-Liouville
integral becomes

.. math::

    {}_0 I_x^\alpha f(x)
    = \frac{(x/2)^\alpha}{\Gamma(\alpha)}
      \int_{-1}^1 (1 - s)^{\alpha - 1} f\left(\tfrac{x}{2}(s + 1)\right) \,\mathrm{d}s,

which the :math:`(\alpha - 1, 0)` Gauss-Jacobi rule integrates exactly for
polynomial :math:`f` of degree at most :math:`2n - 1`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from fracquad.errors import DomainError
from fracquad.jacobi import JacobiParams
from fracquad.quadrature import Method, evaluate_on, get_rule
from fracquad.specfun import gamma

Function = Callable[..., Any]

DEFAULT_QUAD_N = 16


@dataclass(frozen=True)
class FracOrder:
    r"""A fractional order :math:`\alpha > 0` with :math:`m - 1 < \alpha \le m`."""

    alpha: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"fractional order must be positive, got alpha={self.alpha}")

    @property
    def ceiling(self) -> int:
        return math.ceil(self.alpha)


@dataclass(frozen=True)
class TestPointSet:
    """A non-empty, strictly increasing set of evaluation points."""

    __test__ = False

    points: np.ndarray

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float).ravel()
        if points.size == 0:
            raise DomainError("test point set must not be empty")
        if np.any(np.diff(points) <= 0):
            raise DomainError("test points must be strictly increasing")

        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def equispaced(cls, stop: float, count: int, start: float = 0.0) -> TestPointSet:
        """*count* equispaced points from *start* to *stop*, both included."""
        return cls(np.linspace(start, stop, count))


def _as_points(x: Any) -> tuple[np.ndarray, tuple[int, ...]]:
    """Flatten *x*; operators compose by receiving arrays of mapped nodes."""
    xa = np.asarray(x, dtype=float)
    return xa.ravel(), xa.shape


def _unwrap(values: np.ndarray, shape: tuple[int, ...]) -> float | np.ndarray:
    return float(values[0]) if shape == () else values.reshape(shape)


def _mapped_sum(
    f: Function, x: np.ndarray, nodes: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    # one row of mapped abscissae per evaluation point
    tau = 0.5 * x[:, None] * (nodes[None, :] + 1.0)
    return evaluate_on(f, tau) @ weights


def frac_integral_left(
    f: Function,
    alpha: float,
    x: float | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
    *,
    method: Method | str = Method.NEWTON,
) -> float | np.ndarray:
    r"""Left Riemann-Liouville integral :math:`{}_0 I_x^\alpha f` on an *n_quad* rule."""
    order = FracOrder(alpha)
    xv, shape = _as_points(x)
    if np.any(xv < 0):
        raise DomainError("left fractional integral needs x >= 0")

    rule = get_rule(JacobiParams.fractional(order.alpha), n_quad, method)
    result = (0.5 * xv) ** alpha / gamma(alpha) * _mapped_sum(
        f, xv, rule.nodes, rule.weights
    )

    return _unwrap(np.where(xv == 0, 0.0, result), shape)


def frac_integral_right(
    g: Function,
    alpha: float,
    t: float | np.ndarray,
    b: float,
    n_quad: int = DEFAULT_QUAD_N,
    *,
    method: Method | str = Method.NEWTON,
) -> float | np.ndarray:
    r"""Right Riemann-Liouville integral

    .. math::

        {}_t I_b^\alpha g(t) = \frac{1}{\Gamma(\alpha)} \int_t^b (u - t)^{\alpha - 1} g(u) \,\mathrm{d}u.

    With :math:`u = t + \tfrac{b - t}{2}(s + 1)` the kernel becomes
    :math:`(1 + s)^{\alpha - 1}`, integrated by the :math:`(0, \alpha - 1)` rule.
    """
    order = FracOrder(alpha)
    tv, shape = _as_points(t)
    if np.any(tv > b):
        raise DomainError("right fractional integral needs t <= b")

    rule = get_rule(JacobiParams(0.0, order.alpha - 1.0), n_quad, method)
    half = 0.5 * (b - tv)
    u = tv[:, None] + half[:, None] * (rule.nodes[None, :] + 1.0)
    result = half**alpha / gamma(alpha) * (evaluate_on(g, u) @ rule.weights)

    return _unwrap(np.where(tv == b, 0.0, result), shape)


def caputo_deriv_left(
    f_prime: Function,
    alpha: float,
    x: float | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
    *,
    method: Method | str = Method.NEWTON,
) -> float | np.ndarray:
    r"""Left Caputo derivative of order :math:`\alpha \in (0, 1)` from :math:`f'`.

    This is :math:`{}_0 I_x^{1 - \alpha} f'`, computed with the
    :math:`(-\alpha, 0)` rule.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Caputo order must lie in (0, 1), got alpha={alpha}")
    return frac_integral_left(f_prime, 1.0 - alpha, x, n_quad, method=method)


def central_difference(f: Function) -> Function:
    r"""Fourth-order central-difference approximation of :math:`f'`.

    The step is :math:`h = \epsilon^{1/5} \max(1, |x|)`, which balances the
    :math:`O(h^4)` truncation against :math:`O(\epsilon / h)` rounding.
    """
    eps5 = np.finfo(float).eps ** 0.2

    def f_prime(x: Any) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = eps5 * np.maximum(1.0, np.abs(x))
        return (
            -evaluate_on(f, x + 2 * h)
            + 8 * evaluate_on(f, x + h)
            - 8 * evaluate_on(f, x - h)
            + evaluate_on(f, x - 2 * h)
        ) / (12 * h)

    return f_prime


def caputo_deriv_left_fd(
    f: Function,
    alpha: float,
    x: float | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
    *,
    method: Method | str = Method.NEWTON,
) -> float | np.ndarray:
    """Same as :func:`caputo_deriv_left`, with :math:`f'` from :func:`central_difference`."""
    return caputo_deriv_left(central_difference(f), alpha, x, n_quad, method=method)


def gl_deriv(f: Function, alpha: float, t: float, N: int) -> float:
    r"""Truncated Grünwald-Letnikov derivative

    .. math::

        D^\alpha_{GL} f(t) \approx h^{-\alpha}
            \sum_{j = 0}^{N - 1} \frac{\Gamma(j - \alpha)}{\Gamma(-\alpha)\Gamma(j + 1)}
            f(t - j h),
        \qquad h = t / N.

    The gamma ratios are generated by the recurrence
    :math:`r_j = r_{j - 1} (j - 1 - \alpha) / j`, :math:`r_0 = 1`.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Grünwald-Letnikov order must lie in (0, 1), got alpha={alpha}")
    if N < 2:
        raise DomainError(f"number of terms must be >= 2, got N={N}")
    if not t > 0:
        raise DomainError(f"evaluation point must be positive, got t={t}")

    h = t / N
    j = np.arange(1, N, dtype=float)
    r = np.concatenate([[1.0], np.cumprod((j - 1.0 - alpha) / j)])
    fx = evaluate_on(f, t - h * np.arange(N, dtype=float))

    return float(h ** (-alpha) * math.fsum(r * fx))


def error_metric(exact: Any, approx: Any) -> float:
    r"""Error :math:`\sqrt{\sum_k (E_k - A_k)^2 / \sum_k E_k}`.

    The denominator is the plain sum of the exact values, not of their squares.
    """
    exact = np.asarray(exact, dtype=float)
    approx = np.asarray(approx, dtype=float)
    if exact.shape != approx.shape or exact.size == 0:
        raise DomainError("exact and approximate values must be non-empty of equal length")

    denom = math.fsum(exact)
    if not denom > 0:
        raise DomainError(f"sum of exact values must be positive, got {denom}")

    return math.sqrt(math.fsum((exact - approx) ** 2) / denom)
