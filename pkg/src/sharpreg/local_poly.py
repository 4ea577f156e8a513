"""Local polynomial fits over empirical inner products.

Fits are unweighted least squares on the design points inside an interval
``I = I(x, h)``, expressed through the normalised Gram matrix
``X_I[p, q] = <(y - x)^p, (y - x)^q>_I``. When its smallest eigenvalue is
at most ``1 / sqrt(n * mass(I))`` that amount is added to the diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .bandwidth import interval_at
from .design import Dataset, Interval, points_in
from .linalg import jacobi_eigenvalues, smallest_eigenvalue


@dataclass(frozen=True)
class LocalFit:
    theta_hat: NDArray[np.float64]
    interval: Interval
    k: int
    mass: float
    regularized: bool
    gamma_ok: bool
    lambda_min: float
    solved_lambda_min: float


def gram_system(
    d: Dataset, I: Interval, k: int
) -> tuple[NDArray[np.float64], NDArray[np.float64], int]:
    """Return ``(X_I, Y_I, count)`` for the monomials centred at ``I.anchor``."""
    xs, ys = points_in(d, I)
    m = xs.size
    if m == 0:
        return np.zeros((k + 1, k + 1)), np.zeros(k + 1), 0
    u = xs - I.anchor
    powers = np.vander(u, 2 * k + 1, increasing=True)
    moments = powers.mean(axis=0)
    idx = np.arange(k + 1)
    X = moments[idx[:, None] + idx[None, :]]
    Y = (powers[:, : k + 1] * ys[:, None]).mean(axis=0)
    return X, Y, m


def lpa_fit(d: Dataset, I: Interval, k: int) -> LocalFit:
    X, Y, m = gram_system(d, I, k)
    mass = m / d.n
    if m == 0:
        return LocalFit(np.zeros(k + 1), I, k, 0.0, False, False, 0.0, 0.0)
    lam = smallest_eigenvalue(X)
    ridge = 1.0 / math.sqrt(m)  # = 1 / sqrt(n * mass)
    regularized = lam <= ridge
    Xbar = X + ridge * np.eye(k + 1) if regularized else X
    # LAPACK gesv: LU with partial pivoting
    theta = np.linalg.solve(Xbar, Y)
    if k >= 1:
        norms = np.sqrt(np.diagonal(X)[1:])
        gamma = bool(norms.min() >= 1.0 / math.sqrt(d.n))
    else:
        gamma = True
    return LocalFit(
        theta, I, k, mass, regularized, gamma, lam, lam + ridge if regularized else lam
    )


def derivative_estimates(
    d: Dataset, x_j: float, h_n: float, k: int
) -> tuple[NDArray[np.float64], bool]:
    """``m! * theta_m`` for ``m = 1..k`` from the fit on ``I(x_j, h_n)``, plus the Gamma flag."""
    if k == 0:
        return np.zeros(0), False
    fit = lpa_fit(d, interval_at(x_j, h_n), k)
    facts = np.array([math.factorial(m) for m in range(1, k + 1)], dtype=float)
    return facts * fit.theta_hat[1:], fit.gamma_ok


def boundary_estimate(d: Dataset, x_j: float, t_n: float, k: int = 0) -> float:
    """Intercept of the degree-``k`` fit on ``I(x_j, t_n)``."""
    return float(lpa_fit(d, interval_at(x_j, t_n), k).theta_hat[0])


@dataclass(frozen=True)
class ReferenceGram:
    k: int
    G: NDArray[np.float64]
    lam: float
    chi: NDArray[np.float64]


def reference_moments(k: int) -> NDArray[np.float64]:
    m = np.arange(2 * k + 1)
    return (1.0 + (-1.0) ** m) / (2.0 * (m + 1.0))


def reference_gram(k: int) -> ReferenceGram:
    if not 0 <= k <= 8:
        raise ValueError("reference Gram matrix is tabulated for 0 <= k <= 8")
    chi = reference_moments(k)
    idx = np.arange(k + 1)
    diag = chi[2 * idx]
    G = chi[idx[:, None] + idx[None, :]] / np.sqrt(diag[:, None] * diag[None, :])
    return ReferenceGram(k, G, float(jacobi_eigenvalues(G)[0]), chi)
