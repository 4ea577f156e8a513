"""Adaptive composite Simpson quadrature for piecewise smooth integrands."""

from __future__ import annotations

import math
from typing import Callable, Iterable, Sequence

Integrand = Callable[[float], float]


def _simpson(fa: float, fm: float, fb: float, a: float, b: float) -> float:
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(
    f: Integrand,
    a: float,
    b: float,
    tol: float = 1e-13,
    max_depth: int = 60,
) -> float:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson with Richardson correction.

    The recursion is driven by an explicit stack, so deep refinement near
    singular points (e.g. ``|t|**0.25`` at the origin) does not hit the
    interpreter recursion limit.
    """
    if b == a:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    total = 0.0
    stack = [(a, b, fa, fm, fb, _simpson(fa, fm, fb, a, b), tol, 0)]
    while stack:
        a0, b0, fa0, fm0, fb0, whole, eps, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        left = _simpson(fa0, flm, fm0, a0, m0)
        right = _simpson(fm0, frm, fb0, m0, b0)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            total += left + right + delta / 15.0
        else:
            # floor on the split tolerance keeps cusp refinement finite
            half = max(0.5 * eps, 1e-18)
            stack.append((a0, m0, fa0, flm, fm0, left, half, depth + 1))
            stack.append((m0, b0, fm0, frm, fb0, right, half, depth + 1))
    return total


def integrate_pieces(
    f: Integrand,
    knots: Sequence[float] | Iterable[float],
    tol: float = 1e-13,
) -> float:
    """Sum adaptive Simpson integrals over consecutive knot intervals.

    ``knots`` must be sorted; the integrand only needs to be smooth
    inside each piece.
    """
    pts = sorted(set(float(k) for k in knots))
    if len(pts) < 2:
        return 0.0
    per_piece = tol / (len(pts) - 1)
    return math.fsum(
        adaptive_simpson(f, lo, hi, per_piece) for lo, hi in zip(pts[:-1], pts[1:])
    )
