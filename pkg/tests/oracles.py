"""Slow, direct reference implementations used only by the tests."""

import math

import mpmath
import numpy as np

BRUTE_STEP = 1e-6
_STEPS = 1_000_000
_CHUNK = 50_000


def brute_bandwidth(xs, x, s, n=None):
    """Scan ``h = k * 1e-6`` upward and return the first ``h`` meeting the rate condition.

    ``count(h)`` is the number of design points in the closed interval
    ``[x, x + h]`` (``x <= 1/2``) or ``[x - h, x]``. The condition is
    ``h**(2s) * count(h) >= log n`` with ``count > 0``. Returns 1.0 when no
    grid value qualifies.
    """
    xs = np.sort(np.asarray(xs, dtype=float))
    n = xs.size if n is None else n
    logn = math.log(n)
    dist = xs[xs >= x] - x if x <= 0.5 else x - xs[xs <= x]
    dist = np.sort(dist)
    for a in range(0, _STEPS + 1, _CHUNK):
        h = np.arange(a, min(a + _CHUNK, _STEPS + 1)) * BRUTE_STEP
        c = np.searchsorted(dist, h, side="right")
        ok = (c > 0) & (h ** (2 * s) * c >= logn)
        if ok.any():
            return float(h[np.argmax(ok)])
    return 1.0


def naive_kernel_sums(xs, ys, fam, x_j, H_j):
    w = np.array([float(fam.kernel((xi - x_j) / (fam.c * H_j))) for xi in xs])
    return float(np.sum(w * ys)), float(np.sum(w))


def char_poly_eigenvalues(a, dps=60):
    """Eigenvalues of a 2x2 or 3x3 symmetric matrix as roots of its characteristic polynomial.

    Coefficients and roots are computed in multiprecision, so repeated
    eigenvalues come out accurate too.
    """
    a = np.asarray(a, dtype=float)
    if a.shape not in ((2, 2), (3, 3)):
        raise ValueError("2x2 or 3x3 only")
    if np.array_equal(a, a[0, 0] * np.eye(a.shape[0])):
        return np.full(a.shape[0], a[0, 0])
    scale = float(np.abs(a).max())
    with mpmath.workdps(dps):
        m = mpmath.matrix((a / scale).tolist())
        k = a.shape[0]
        tr = sum(m[i, i] for i in range(k))
        if k == 2:
            det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        else:
            det = (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
                   - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
                   + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))
        if k == 2:
            coeffs = [1, -tr, det]
        else:
            minors = sum(m[i, i] * m[j, j] - m[i, j] ** 2 for i in range(3) for j in range(i + 1, 3))
            coeffs = [1, -tr, minors, -det]
        roots = mpmath.polyroots(coeffs, maxsteps=2000, extraprec=200)
        return np.sort([float(mpmath.re(r) * scale) for r in roots])
