r"""Solver for fractional variational problems with Lagrangians

.. math::

    L(t, y, {}^C D^\alpha y) = \tfrac{1}{2} ({}^C D^\alpha y)^2 + f(t, y),
    \qquad 1 < \alpha < 2.

Stationary points satisfy
:math:`{}_t D_b^\alpha ({}^C_a D_t^\alpha y) + g(t, y) = 0` with
:math:`g = \partial f / \partial y`. Applying the right integral and the
boundary data :math:`y(0) = u_a`, :math:`y(1) = u_b` gives the integral
equation

.. math::

    y(t) = u_a + (u_b - u_a) t + I^\alpha h(t) - t\, I^\alpha h(1),
    \qquad h(t) = -{}_t I_1^\alpha g(\cdot, y)(t),

which is solved by a forward march repeated over several sweeps. Problems on
a general interval :math:`[a, b]` are mapped onto :math:`[0, 1]`, which
multiplies :math:`g` by :math:`(b - a)^{2\alpha}`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from fracquad.config import settings
from fracquad.errors import DomainError, NonFiniteError
from fracquad.fde import SolutionGrid, _abm_weights
from fracquad.fracops import DEFAULT_QUAD_N, TestPointSet, caputo_deriv_left
from fracquad.interp import EquispacedInterpolant
from fracquad.jacobi import JacobiParams
from fracquad.quadrature import get_rule
from fracquad.specfun import gamma

Coupling = Callable[[Any, Any], Any]

#: Indicative bound for :func:`euler_lagrange_residual` on converged runs.
EULER_LAGRANGE_BAR = 1.0e-2
OUTER_QUAD_N = 64


def _call2(fn: Coupling, t: np.ndarray, y: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    try:
        result = np.asarray(fn(t, y), dtype=float)
        return np.broadcast_to(result, np.broadcast(t, y).shape).astype(float)
    except (TypeError, ValueError):
        tt, yy = np.broadcast_arrays(t, y)
        return np.array(
            [float(fn(ti, yi)) for ti, yi in zip(tt.ravel(), yy.ravel())]
        ).reshape(tt.shape)


@dataclass(frozen=True)
class FvpProblem:
    """Boundary-value problem arising from a fractional variational problem."""

    alpha: float
    u_a: float
    u_b: float
    g: Coupling = field(compare=False)
    interval: tuple[float, float] = (0.0, 1.0)
    f_potential: Coupling | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not 1.0 < self.alpha < 2.0:
            raise DomainError(f"alpha must lie in (1, 2), got alpha={self.alpha}")
        a, b = (float(v) for v in self.interval)
        if not a < b:
            raise DomainError(f"interval must satisfy a < b, got [{a}, {b}]")
        object.__setattr__(self, "interval", (a, b))

    @property
    def length(self) -> float:
        a, b = self.interval
        return b - a

    def coupling(self, t: np.ndarray, y: np.ndarray) -> np.ndarray:
        return _call2(self.g, t, y)

    def unit_coupling(self, tau: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Coupling of the problem mapped onto :math:`[0, 1]`."""
        a, _ = self.interval
        L = self.length
        return L ** (2.0 * self.alpha) * _call2(self.g, a + L * np.asarray(tau), y)

    def line(self, tau: np.ndarray) -> np.ndarray:
        """Affine interpolant of the boundary data, exact at both ends."""
        tau = np.asarray(tau, dtype=float)
        return self.u_a * (1.0 - tau) + self.u_b * tau


@dataclass(frozen=True)
class FvpSolution:
    grid: SolutionGrid
    functional_value: float | None
    bc_error: tuple[float, float]
    fixed_point_residual: float
    sweeps: int
    residual_history: tuple[float, ...] = ()


class _UnitOperators:
    """Quadrature-based operators of the integral equation on :math:`[0, 1]`."""

    def __init__(self, problem: FvpProblem, N: int) -> None:
        alpha = problem.alpha
        self.problem = problem
        self.alpha = alpha
        self.left = get_rule(JacobiParams.fractional(alpha), N)
        self.right = get_rule(JacobiParams(0.0, alpha - 1.0), N)
        self.inv_gamma = 1.0 / gamma(alpha)

    def h(self, s: np.ndarray, y: Callable[[Any], Any]) -> np.ndarray:
        """:math:`h(s) = -{}_s I_1^\\alpha g(\\cdot, y)` at each entry of *s*."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        half = 0.5 * (1.0 - s)
        u = s[..., None] + half[..., None] * (self.right.nodes + 1.0)
        gu = self.problem.unit_coupling(u, y(u))
        return -(half**self.alpha) * self.inv_gamma * (gu @ self.right.weights)

    def left_integral_of_h(self, t: np.ndarray, y: Callable[[Any], Any]) -> np.ndarray:
        """:math:`I^\\alpha h(t)` at each entry of *t*."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tau = 0.5 * t[:, None] * (self.left.nodes + 1.0)
        hv = self.h(tau, y)
        return (0.5 * t) ** self.alpha * self.inv_gamma * (hv @ self.left.weights)

    def rhs(self, t: np.ndarray, y: Callable[[Any], Any]) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c = self.left_integral_of_h(np.array([1.0]), y)[0]
        return self.problem.line(t) + self.left_integral_of_h(t, y) - t * c


def _unit_trajectory(
    problem: FvpProblem, y_traj: Callable[[Any], Any]
) -> Callable[[Any], Any]:
    a, _ = problem.interval
    L = problem.length
    return lambda tau: y_traj(a + L * np.asarray(tau))


def h_operator(
    problem: FvpProblem,
    y_traj: Callable[[Any], Any],
    t: float | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
) -> float | np.ndarray:
    r""":math:`h(t) = -{}_t I_b^\alpha g(\cdot, y)(t)` on the original interval."""
    a, b = problem.interval
    ta = np.asarray(t, dtype=float)
    if np.any(ta < a) or np.any(ta > b):
        raise DomainError(f"t must lie in [{a}, {b}]")

    rule = get_rule(JacobiParams(0.0, problem.alpha - 1.0), n_quad)
    tv = np.atleast_1d(ta)
    half = 0.5 * (b - tv)
    u = tv[:, None] + half[:, None] * (rule.nodes + 1.0)
    gu = problem.coupling(u, y_traj(u))
    result = -(half**problem.alpha) / gamma(problem.alpha) * (gu @ rule.weights)
    result = np.where(tv == b, 0.0, result)

    return float(result[0]) if ta.ndim == 0 else result


def integral_equation_rhs(
    problem: FvpProblem,
    y_traj: Callable[[Any], Any],
    t: float | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
) -> float | np.ndarray:
    """Right-hand side of the integral equation, evaluated on the original interval."""
    a, b = problem.interval
    ta = np.asarray(t, dtype=float)
    if np.any(ta < a) or np.any(ta > b):
        raise DomainError(f"t must lie in [{a}, {b}]")

    ops = _UnitOperators(problem, n_quad)
    result = ops.rhs((np.atleast_1d(ta) - a) / problem.length, _unit_trajectory(problem, y_traj))
    return float(result[0]) if ta.ndim == 0 else result


def fvp_march(
    problem: FvpProblem,
    n_steps: int,
    N: int = DEFAULT_QUAD_N,
    *,
    max_sweeps: int | None = None,
    tol: float | None = None,
    degree: int | None = None,
    functional_n_quad: int = 64,
) -> FvpSolution:
    r"""Solve the boundary-value problem on an equispaced grid of *n_steps* steps.

    The first sweep predicts each :math:`y_{n+1}` with rectangle weights
    :math:`b_j = \frac{k^\alpha}{\alpha}((n + 1 - j)^\alpha - (n - j)^\alpha)`,
    refines it with the trapezoidal weights :math:`a_j`, and then corrects it
    with the fractional Gauss-Jacobi rule of size *N* applied through a local
    interpolant of the trajectory. The constant :math:`I^\alpha h(1)` is taken
    from the current trajectory, and is updated at the last step so that
    :math:`y(1) = u_b` holds exactly. Later sweeps repeat the correction with
    the previous sweep as prediction until the fixed-point residual drops below
    *tol* or stops decreasing.
    """
    if n_steps < 2 or int(n_steps) != n_steps:
        raise DomainError(f"n_steps must be an integer >= 2, got {n_steps}")
    if N < 2:
        raise DomainError(f"quadrature size must be >= 2, got N={N}")
    if max_sweeps is None:
        max_sweeps = settings.fvp_max_sweeps
    if tol is None:
        tol = settings.fvp_tol
    if degree is None:
        degree = settings.interp_degree

    alpha = problem.alpha
    ops = _UnitOperators(problem, N)
    k = 1.0 / n_steps
    tau = k * np.arange(n_steps + 1)
    line = problem.line(tau)

    def interpolant(values: np.ndarray) -> EquispacedInterpolant:
        return EquispacedInterpolant(0.0, k, values, degree)

    y = line.copy()
    P = interpolant(y)
    c = ops.left_integral_of_h(np.array([1.0]), P)[0]
    trap = k**alpha / (alpha * (alpha + 1.0))

    history: list[float] = []
    predicted = y.copy()
    for sweep in range(max_sweeps):
        predicted = y.copy()
        for n in range(n_steps):
            tn = tau[n + 1]
            if sweep == 0:
                hv = ops.h(tau[: n + 1], P)
                j = np.arange(n + 1, dtype=float)
                b = k**alpha / alpha * ((n + 1.0 - j) ** alpha - (n - j) ** alpha)
                y[n + 1] = line[n + 1] + ops.inv_gamma * np.dot(b, hv) - tn * c
                P = interpolant(y)

                a = trap * _abm_weights(alpha, n)
                h_new = ops.h(np.array([tn]), P)[0]
                y[n + 1] = (
                    line[n + 1]
                    + ops.inv_gamma * (np.dot(a, hv) + trap * h_new)
                    - tn * c
                )
                P = interpolant(y)
                predicted[n + 1] = y[n + 1]

            integral = ops.left_integral_of_h(np.array([tn]), P)[0]
            if n == n_steps - 1:
                c = integral
            y[n + 1] = line[n + 1] + integral - tn * c
            P = interpolant(y)

            if not np.isfinite(y[n + 1]):
                raise NonFiniteError(
                    f"solution became non-finite at step {n + 1} of sweep {sweep + 1}"
                )

        residual = float(np.max(np.abs(y - ops.rhs(tau, P))))
        history.append(residual)
        if residual <= tol or (len(history) > 1 and residual >= history[-2]):
            break

    residuals = np.abs(y - ops.rhs(tau, P))
    a, _ = problem.interval
    grid = SolutionGrid(
        times=a + problem.length * tau,
        predicted=predicted,
        corrected=y.copy(),
        residuals=residuals,
    )

    bc_error = (abs(float(y[0]) - problem.u_a), abs(float(y[-1]) - problem.u_b))
    solution = FvpSolution(
        grid=grid,
        functional_value=None,
        bc_error=bc_error,
        fixed_point_residual=float(np.max(residuals)),
        sweeps=len(history),
        residual_history=tuple(history),
    )

    if problem.f_potential is not None:
        value = evaluate_functional(problem, solution, functional_n_quad)
        solution = FvpSolution(
            grid=grid,
            functional_value=value,
            bc_error=bc_error,
            fixed_point_residual=solution.fixed_point_residual,
            sweeps=solution.sweeps,
            residual_history=solution.residual_history,
        )

    return solution


def _grid_of(solution: FvpSolution | SolutionGrid) -> SolutionGrid:
    return solution.grid if isinstance(solution, FvpSolution) else solution


# generalized Taylor fit at the left end: polynomial degrees and the number
# of singular exponents alpha + j
_FIT_POINTS = 10
_FIT_DEGREES = 4
_FIT_SINGULAR = 3
# singular exponents this close to an integer are collinear with the
# polynomial columns and are left in the regular part
_FIT_SEPARATION = 0.05


def singular_coefficients(
    alpha: float, s: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    r"""Coefficients :math:`c_j` of :math:`s^{\alpha + j}` in the behaviour of *y* near 0.

    Solutions of the integral equation expand as
    :math:`y = y_0 + y_1 s + \sum_j c_j s^{\alpha + j}` because *h* is smooth
    at the left end. The coefficients are fitted by least squares to the
    first grid values, with extra polynomial columns absorbing the
    regular part. Returns ``(exponents, coefficients)``.
    """
    exps = np.array(
        [
            alpha + j
            for j in range(_FIT_SINGULAR)
            if abs(alpha + j - round(alpha + j)) >= _FIT_SEPARATION
        ]
    )
    k = min(_FIT_POINTS, s.size)
    if exps.size == 0 or k < _FIT_DEGREES + exps.size + 1:
        return exps[:0], np.zeros(0)

    scale = s[1]
    x = s[:k] / scale
    A = np.column_stack([x**p for p in range(_FIT_DEGREES)] + [x**e for e in exps])
    coef, *_ = np.linalg.lstsq(A, y[:k], rcond=None)
    return exps, coef[_FIT_DEGREES:] / scale**exps


def caputo_of_grid(
    problem: FvpProblem,
    solution: FvpSolution | SolutionGrid,
    t: np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
) -> np.ndarray:
    r"""Caputo derivative :math:`{}^C_a D_t^\alpha y` of the grid trajectory.

    Near the left end :math:`y'' \sim s^{\alpha - 2}` is singular, which a
    polynomial interpolant cannot follow. The fitted terms
    :math:`c_j s^{\alpha + j}` from :func:`singular_coefficients` are
    differentiated in closed form,
    :math:`{}^C D^\alpha s^{\alpha + j} = \Gamma(\alpha + j + 1) s^j / j!`,
    and only the regular remainder goes through
    :math:`{}_a I_t^{2 - \alpha}` of the interpolant's second derivative.
    """
    grid = _grid_of(solution)
    a, _ = problem.interval
    alpha = problem.alpha
    s_grid = grid.times - a
    exps, coef = singular_coefficients(alpha, s_grid, grid.corrected)

    def singular(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return sum((c * s**e for e, c in zip(exps, coef)), np.zeros_like(s))

    P = EquispacedInterpolant.from_grid(grid.times, grid.corrected - singular(s_grid))

    def y2(s: np.ndarray) -> np.ndarray:
        return P.derivative(a + np.asarray(s), order=2)

    s = np.asarray(t, dtype=float) - a
    regular = np.asarray(caputo_deriv_left(y2, alpha - 1.0, s, n_quad))
    closed = sum(
        (c * gamma(e + 1.0) / gamma(e + 1.0 - alpha) * s ** (e - alpha) for e, c in zip(exps, coef)),
        np.zeros_like(s),
    )
    return regular + closed


def evaluate_functional(
    problem: FvpProblem,
    solution: FvpSolution | SolutionGrid,
    n_quad: int = 64,
) -> float:
    r"""Value of :math:`J[y] = \int_a^b \tfrac12 ({}^C D^\alpha y)^2 + f(t, y) \,\mathrm{d}t`
    by Gauss-Legendre quadrature of size *n_quad*."""
    if problem.f_potential is None:
        raise DomainError("evaluating the functional needs f_potential")

    grid = _grid_of(solution)
    a, b = problem.interval
    rule = get_rule(JacobiParams(0.0, 0.0), n_quad)
    t = a + 0.5 * (b - a) * (rule.nodes + 1.0)

    dy = caputo_of_grid(problem, grid, t, n_quad)
    y = grid.interpolant()(t)
    integrand = 0.5 * dy**2 + _call2(problem.f_potential, t, y)

    return float(0.5 * (b - a) * np.dot(rule.weights, integrand))


def euler_lagrange_residual(
    problem: FvpProblem,
    solution: FvpSolution | SolutionGrid,
    t_samples: TestPointSet | np.ndarray,
    n_quad: int = DEFAULT_QUAD_N,
) -> np.ndarray:
    r"""Pointwise residual of :math:`{}_t D_b^\alpha ({}^C D^\alpha y) + g(t, y)`.

    The right Riemann-Liouville derivative is the second derivative of
    :math:`{}_t I_b^{2 - \alpha}` applied to the Caputo derivative of the grid
    trajectory (see :func:`caputo_of_grid`), taken by a five-point central
    difference. Converged runs stay below :data:`EULER_LAGRANGE_BAR`.
    """
    if not isinstance(t_samples, TestPointSet):
        t_samples = TestPointSet(t_samples)
    t = t_samples.points

    a, b = problem.interval
    if np.any(t <= a) or np.any(t >= b):
        raise DomainError(f"samples must lie in the open interval ({a}, {b})")

    grid = _grid_of(solution)
    beta = 2.0 - problem.alpha
    # phi vanishes like (b - u)^alpha at the right end, which the weight does
    # not absorb; the stencil amplifies that quadrature error by delta^-2
    rule = get_rule(JacobiParams(0.0, beta - 1.0), max(n_quad, OUTER_QUAD_N))
    inv_gamma = 1.0 / gamma(beta)

    def outer(s: np.ndarray) -> np.ndarray:
        half = 0.5 * (b - s)
        u = s[:, None] + half[:, None] * (rule.nodes + 1.0)
        phi = caputo_of_grid(problem, grid, u.ravel(), n_quad).reshape(u.shape)
        return half**beta * inv_gamma * (phi @ rule.weights)

    delta = np.minimum(1.0e-2 * (b - a), 0.4 * np.minimum(t - a, b - t))
    stencil = (
        -outer(t + 2 * delta)
        + 16 * outer(t + delta)
        - 30 * outer(t)
        + 16 * outer(t - delta)
        - outer(t - 2 * delta)
    ) / (12 * delta**2)

    y = grid.interpolant()(t)
    return stencil + problem.coupling(t, y)
