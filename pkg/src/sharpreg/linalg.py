"""Small dense symmetric eigenproblems by cyclic Jacobi rotations."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

JACOBI_TOL = 1e-13
JACOBI_SWEEPS = 100


def jacobi_eigenvalues(
    a: ArrayLike, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_SWEEPS
) -> NDArray[np.float64]:
    """Eigenvalues of a symmetric matrix, sorted ascending.

    Sweeps stop once the off-diagonal Frobenius mass falls below
    ``tol`` relative to the whole matrix.
    """
    m = np.array(a, dtype=float)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("square matrix required")
    if not np.allclose(m, m.T, rtol=1e-12, atol=1e-14):
        raise ValueError("symmetric matrix required")
    if n == 1:
        return m.diagonal().copy()
    scale = math.sqrt(float(np.sum(m * m))) or 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.triu(m, 1) ** 2)) * 2.0)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                tau = (m[q, q] - m[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau  # tau * tau would overflow
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * c
                rp, rq = m[p, :].copy(), m[q, :].copy()
                m[p, :] = c * rp - sn * rq
                m[q, :] = sn * rp + c * rq
                cp, cq = m[:, p].copy(), m[:, q].copy()
                m[:, p] = c * cp - sn * cq
                m[:, q] = sn * cp + c * cq
    return np.sort(m.diagonal())


def smallest_eigenvalue(a: ArrayLike) -> float:
    return float(jacobi_eigenvalues(a)[0])
