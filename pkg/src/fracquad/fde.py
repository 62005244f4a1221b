r"""Solver for Caputo fractional initial-value problems

.. math::

    {}^C D^\alpha y(t) = g(t, y(t)), \qquad y^{(k)}(0) = b_k,
    \quad k = 0, \dots, m - 1, \quad m = \lceil \alpha \rceil.

The problem is equivalent to the Volterra equation

.. math::

    y(t) = \sum_{k = 0}^{m - 1} \frac{b_k t^k}{k!}
        + \frac{1}{\Gamma(\alpha)} \int_0^t (t - s)^{\alpha - 1} g(s, y(s)) \,\mathrm{d}s.

It is first marched by an Adams-type predictor-corrector (:func:`abm_march`).
Each step is then recomputed by applying a fractional Gauss-Jacobi rule to the
Volterra integral, with :math:`y` replaced by a local equispaced interpolant of
the trajectory (:func:`fgj_correct`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from fracquad.config import settings
from fracquad.errors import DomainError, NonFiniteError
from fracquad.fracops import DEFAULT_QUAD_N, frac_integral_left
from fracquad.interp import EquispacedInterpolant
from fracquad.jacobi import JacobiParams
from fracquad.quadrature import get_rule
from fracquad.specfun import gamma

RightHandSide = Callable[[Any, Any], Any]


@dataclass(frozen=True)
class CaputoIVP:
    """Initial-value problem for a Caputo derivative of order *alpha*."""

    alpha: float
    initial_values: tuple[float, ...]
    rhs: RightHandSide = field(compare=False)
    horizon: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be positive, got alpha={self.alpha}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")

        b = tuple(float(v) for v in np.atleast_1d(self.initial_values))
        if len(b) != self.ceiling:
            raise DomainError(
                f"alpha={self.alpha} needs {self.ceiling} initial values, got {len(b)}"
            )
        object.__setattr__(self, "initial_values", b)

    @property
    def ceiling(self) -> int:
        return math.ceil(self.alpha)

    def head(self, t: float | np.ndarray) -> float | np.ndarray:
        r"""Taylor polynomial :math:`\sum_k b_k t^k / k!` of the initial data."""
        t = np.asarray(t, dtype=float)
        result = sum(
            b * t**k / math.factorial(k) for k, b in enumerate(self.initial_values)
        )
        return float(result) if t.ndim == 0 else result

    def g(self, t: np.ndarray, y: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        try:
            result = np.asarray(self.rhs(t, y), dtype=float)
            return np.broadcast_to(result, np.broadcast(t, y).shape).astype(float)
        except (TypeError, ValueError):
            tt, yy = np.broadcast_arrays(t, y)
            return np.array(
                [float(self.rhs(ti, yi)) for ti, yi in zip(tt.ravel(), yy.ravel())]
            ).reshape(tt.shape)


@dataclass(frozen=True)
class SolutionGrid:
    """Trajectory on the equispaced grid ``t_j = j k`` with per-step diagnostics."""

    times: np.ndarray = field(repr=False)
    predicted: np.ndarray = field(repr=False)
    corrected: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arrays = [
            np.array(getattr(self, name), dtype=float)
            for name in ("times", "predicted", "corrected", "residuals")
        ]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise DomainError("solution grid arrays must be 1D of equal length")
        if np.any(np.diff(arrays[0]) <= 0):
            raise DomainError("solution grid times must be strictly increasing")

        for name, a in zip(("times", "predicted", "corrected", "residuals"), arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def interpolant(self, degree: int | None = None) -> EquispacedInterpolant:
        """Local interpolant of the corrected trajectory."""
        if degree is None:
            degree = settings.interp_degree
        return EquispacedInterpolant(
            float(self.times[0]), self.step, self.corrected, degree
        )


def _check_steps(n_steps: int) -> int:
    if n_steps < 1 or int(n_steps) != n_steps:
        raise DomainError(f"n_steps must be a positive integer, got {n_steps}")
    return int(n_steps)


def volterra_rhs(
    problem: CaputoIVP,
    y_traj: Callable[[Any], Any],
    t: float | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
) -> float | np.ndarray:
    """Right-hand side of the Volterra equation for the trajectory *y_traj*."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > problem.horizon * (1 + 1e-14)):
        raise DomainError(f"t must lie in [0, {problem.horizon}]")

    def integrand(s: np.ndarray) -> np.ndarray:
        return problem.g(s, y_traj(s))

    integral = frac_integral_left(integrand, problem.alpha, t, n_quad)
    result = problem.head(t) + integral
    return float(result) if np.ndim(result) == 0 else result


def _abm_weights(alpha: float, n: int) -> np.ndarray:
    """Corrector history weights ``a_0, ..., a_n`` for the step to ``t_{n+1}``."""
    j = np.arange(n + 1, dtype=float)
    a = (n - j + 2.0) ** (alpha + 1) + (n - j) ** (alpha + 1) - 2.0 * (n - j + 1.0) ** (
        alpha + 1
    )
    a[0] = n ** (alpha + 1) - (n - alpha) * (n + 1.0) ** alpha
    return a


def abm_march(problem: CaputoIVP, n_steps: int) -> SolutionGrid:
    r"""March the Volterra equation with the predictor-corrector scheme.

    With step :math:`k` and :math:`c = k^\alpha / \Gamma(\alpha + 2)`, the
    predictor is

    .. math::

        y^P_{n+1} = T(t_{n+1}) + c \left[(2^{\alpha + 1} - 1) g_n
            + \sum_{j = 0}^{n - 1} a_{j, n} g_j\right]

    (and :math:`T(t_1) + k^\alpha g_0 / \Gamma(\alpha + 1)` for the first
    step), followed by one correction

    .. math::

        y_{n+1} = T(t_{n+1}) + c \left[g(t_{n+1}, y^P_{n+1})
            + \sum_{j = 0}^{n} a_{j, n} g_j\right],

    where :math:`T` is the Taylor polynomial of the initial data. The returned
    grid stores the corrected values in both ``predicted`` and ``corrected``.
    """
    n_steps = _check_steps(n_steps)
    alpha = problem.alpha
    k = problem.horizon / n_steps
    t = k * np.arange(n_steps + 1)
    head = problem.head(t)

    y = np.empty(n_steps + 1)
    g = np.empty(n_steps + 1)
    y[0] = problem.initial_values[0]
    g[0] = problem.g(t[0], y[0])

    c = k**alpha / gamma(alpha + 2.0)
    for n in range(n_steps):
        a = _abm_weights(alpha, n)
        if n == 0:
            y_pred = head[1] + k**alpha / gamma(alpha + 1.0) * g[0]
        else:
            y_pred = head[n + 1] + c * (
                (2.0 ** (alpha + 1) - 1.0) * g[n] + np.dot(a[:n], g[:n])
            )

        y[n + 1] = head[n + 1] + c * (
            problem.g(t[n + 1], y_pred) + np.dot(a, g[: n + 1])
        )
        g[n + 1] = problem.g(t[n + 1], y[n + 1])

        if not (np.isfinite(y[n + 1]) and np.isfinite(g[n + 1])):
            raise NonFiniteError(f"solution became non-finite at step {n + 1}")

    return SolutionGrid(
        times=t, predicted=y, corrected=y.copy(), residuals=np.full_like(y, np.nan)
    )


def fgj_correct(
    problem: CaputoIVP,
    grid: SolutionGrid,
    N: int = DEFAULT_QUAD_N,
    *,
    degree: int | None = None,
) -> SolutionGrid:
    r"""Recompute every step with an *N*-point fractional Gauss-Jacobi rule.

    For the step to :math:`t_{n+1}`,

    .. math::

        y_{n+1} = T(t_{n+1}) + \frac{(t_{n+1}/2)^\alpha}{\Gamma(\alpha)}
            \sum_{k = 1}^N l_k\, g(\tau_k, P_n(\tau_k)),
        \qquad \tau_k = \tfrac{t_{n+1}}{2}(x_k + 1),

    where :math:`P_n` interpolates the already corrected values
    :math:`y_0, \dots, y_n` and the predicted value at :math:`t_{n+1}`.
    """
    if N < 2:
        raise DomainError(f"quadrature size must be >= 2, got N={N}")
    if degree is None:
        degree = settings.interp_degree

    alpha = problem.alpha
    t = grid.times
    k = grid.step
    head = problem.head(t)
    rule = get_rule(JacobiParams.fractional(alpha), N)
    scale = 1.0 / gamma(alpha)

    y = np.array(grid.corrected, dtype=float)
    predicted = grid.predicted
    for n in range(grid.n_steps):
        values = np.concatenate([y[: n + 1], predicted[n + 1 : n + 2]])
        P = EquispacedInterpolant(float(t[0]), k, values, degree)

        tn = t[n + 1]
        tau = 0.5 * tn * (rule.nodes + 1.0)
        integral = (0.5 * tn) ** alpha * scale * np.dot(
            rule.weights, problem.g(tau, P(tau))
        )
        y[n + 1] = head[n + 1] + integral

        if not np.isfinite(y[n + 1]):
            raise NonFiniteError(f"corrected solution became non-finite at step {n + 1}")

    trajectory = EquispacedInterpolant(float(t[0]), k, y, degree)
    residuals = np.abs(y - volterra_rhs(problem, trajectory, t, N))

    return SolutionGrid(times=t, predicted=predicted, corrected=y, residuals=residuals)


def solve_ivp(
    problem: CaputoIVP, n_steps: int, N: int = DEFAULT_QUAD_N
) -> SolutionGrid:
    """Predictor-corrector march followed by the Gauss-Jacobi correction."""
    return fgj_correct(problem, abm_march(problem, n_steps), N)
