"""Local polynomial interpolation on equispaced grids.

Each evaluation point uses the :math:`d + 1` grid values whose window is
centred on it (clipped at the ends of the grid), evaluated in barycentric form.
Keeping the degree small avoids the Runge instability of a single
interpolant through all grid values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fracquad.errors import DomainError


# below this offset from a node w / (u - j) could overflow; the weights are
# bounded by binom(d, d // 2), so snapping to the node value loses nothing
_SNAP = 1e-300


def _barycentric_weights(d: int) -> np.ndarray:
    return np.array([(-1.0) ** j * math.comb(d, j) for j in range(d + 1)])


def _differentiation_matrix(d: int) -> np.ndarray:
    """Derivative matrix for the nodes ``0, 1, ..., d`` (unit spacing)."""
    w = _barycentric_weights(d)
    u = np.arange(d + 1, dtype=float)
    with np.errstate(divide="ignore"):
        D = (w[None, :] / w[:, None]) / (u[:, None] - u[None, :])
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True)
class EquispacedInterpolant:
    """Piecewise interpolant of *values* at ``t0 + j h`` of local degree *degree*."""

    t0: float
    h: float
    values: np.ndarray = field(repr=False)
    degree: int = 12

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise DomainError(f"grid spacing must be positive, got h={self.h}")
        if self.degree < 0:
            raise DomainError(f"degree must be non-negative, got {self.degree}")

        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("interpolation needs a non-empty 1D array of values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_grid(
        cls, times: np.ndarray, values: np.ndarray, degree: int = 12
    ) -> EquispacedInterpolant:
        times = np.asarray(times, dtype=float)
        if times.size < 2:
            return cls(float(times[0]), 1.0, values, degree)

        h = (times[-1] - times[0]) / (times.size - 1)
        if not h > 0 or np.any(np.diff(times) <= 0):
            raise DomainError("interpolation times must be strictly increasing")
        if not np.allclose(np.diff(times), h, rtol=1e-10, atol=0):
            raise DomainError("interpolation times must be equispaced")

        return cls(float(times[0]), float(h), values, degree)

    @property
    def local_degree(self) -> int:
        return min(self.degree, self.values.size - 1)

    def _windows(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.local_degree
        u = (x - self.t0) / self.h
        start = np.clip(np.floor(u - 0.5 * d + 0.5), 0, self.values.size - 1 - d)
        start = start.astype(int)
        return start, u - start

    def _evaluate(self, x: np.ndarray, nodal: np.ndarray) -> np.ndarray:
        d = self.local_degree
        start, u = self._windows(x)
        idx = start[..., None] + np.arange(d + 1)
        y = nodal[idx]
        if d == 0:
            return y[..., 0]

        w = _barycentric_weights(d)
        diff = u[..., None] - np.arange(d + 1)
        hit = np.abs(diff) < _SNAP
        with np.errstate(divide="ignore", invalid="ignore"):
            q = w / diff
            result = np.sum(q * y, axis=-1) / np.sum(q, axis=-1)

        exact = np.any(hit, axis=-1)
        if np.any(exact):
            result[exact] = y[exact][hit[exact]]

        return result

    def __call__(self, x: float | np.ndarray) -> float | np.ndarray:
        xa = np.asarray(x, dtype=float)
        result = self._evaluate(np.atleast_1d(xa), self.values)
        return float(result[0]) if xa.ndim == 0 else result.reshape(xa.shape)

    def derivative(self, x: float | np.ndarray, order: int = 1) -> float | np.ndarray:
        """Value of the *order*-th derivative of the local interpolants at *x*.

        Derivative values are formed at the window nodes by the barycentric
        differentiation matrix and then interpolated, which is exact because
        the derivative of a degree *d* polynomial has degree below *d*.
        """
        if order < 0:
            raise DomainError(f"derivative order must be non-negative, got {order}")

        xa = np.asarray(x, dtype=float)
        xv = np.atleast_1d(xa).ravel()
        if order == 0:
            result = self._evaluate(xv, self.values)
        elif order > self.local_degree:
            result = np.zeros_like(xv)
        else:
            d = self.local_degree
            D = np.linalg.matrix_power(_differentiation_matrix(d), order)
            start, u = self._windows(xv)
            idx = start[:, None] + np.arange(d + 1)
            dy = (self.values[idx] @ D.T) / self.h**order

            w = _barycentric_weights(d)
            diff = u[:, None] - np.arange(d + 1)
            hit = np.abs(diff) < _SNAP
            with np.errstate(divide="ignore", invalid="ignore"):
                q = w / diff
                result = np.sum(q * dy, axis=1) / np.sum(q, axis=1)
            exact = np.any(hit, axis=1)
            if np.any(exact):
                result[exact] = dy[exact][hit[exact]]

        return float(result[0]) if xa.ndim == 0 else result.reshape(xa.shape)
