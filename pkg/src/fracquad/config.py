"""Tunable constants shared by the quadrature and solver modules."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Settings:
    #: below this size the Newton path defers to the eigenvalue method
    newton_min_n: int = 30
    #: from this size on, Newton uses the asymptotic expansion for values
    asymptotic_min_n: int = 100
    #: interior expansion requires theta >= boundary_threshold / sqrt(n)
    boundary_threshold: float = 0.4
    #: number of terms of the interior expansion used inside Newton
    series_terms: int = 10
    #: relative size of the neglected-term bound accepted inside Newton
    series_tol: float = 1e-15
    newton_tol: float = 1e-14
    #: largest size for which the eigenvalue method forms full eigenvectors
    eigenvector_max_n: int = 1000
    newton_max_iter: int = 20
    #: "gatteschi" or "olver" initial guesses near the endpoints
    boundary_guess: str = "gatteschi"
    #: degree cap of the sliding equispaced interpolant
    interp_degree: int = 12
    fvp_max_sweeps: int = 10
    fvp_tol: float = 1e-13


settings = Settings()
