"""Positive roots of the low-degree polynomials that define threshold powers."""

from __future__ import annotations

import math
from typing import Sequence

from scipy.optimize import brentq

__all__ = ["NoRootError", "positive_root", "positive_roots"]


class NoRootError(ValueError):
    """The polynomial has no root in ``(0, bracket_hi]``."""


def _trim(coeffs: Sequence[float]) -> list[float]:
    c = [float(v) for v in coeffs]
    while c and c[0] == 0.0:
        c.pop(0)
    if len(c) not in (3, 4):
        raise ValueError(f"expected a quadratic or cubic, got degree {len(c) - 1}")
    return c


def _horner(c: Sequence[float], x: float) -> float:
    acc = 0.0
    for v in c:
        acc = acc * x + v
    return acc


def _deriv(c: Sequence[float]) -> list[float]:
    n = len(c) - 1
    return [v * (n - i) for i, v in enumerate(c[:-1])]


def _default_hi(c: Sequence[float]) -> float:
    # Cauchy bound on root magnitude, widened.
    return 1e6 * (1.0 + max(abs(v / c[0]) for v in c[1:]))


def _quadratic_roots(c: Sequence[float]) -> list[float]:
    a, b, k = c
    disc = b * b - 4.0 * a * k
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    # cancellation-free pair
    t = -0.5 * (b + math.copysign(sq, b))
    roots = [t / a]
    if t != 0.0:
        roots.append(k / t)
    return sorted(roots)


def _polish(c: Sequence[float], x: float, lo: float, hi: float) -> float:
    dc = _deriv(c)
    for _ in range(3):
        slope = _horner(dc, x)
        if slope == 0.0:
            break
        nxt = x - _horner(c, x) / slope
        if not lo <= nxt <= hi or abs(_horner(c, nxt)) > abs(_horner(c, x)):
            break
        x = nxt
    return x


def positive_roots(coeffs: Sequence[float], bracket_hi: float | None = None) -> list[float]:
    """All roots in ``(0, bracket_hi]``, ascending.

    ``coeffs`` are highest-degree first. Quadratics are solved in closed
    form; cubics are split into monotone pieces at their critical points and
    each sign change is bracketed, solved and Newton-polished. Evaluation
    uses scalar Horner loops since the inputs are tiny.
    """
    c = _trim(coeffs)
    hi = _default_hi(c) if bracket_hi is None else float(bracket_hi)
    if len(c) == 3:
        return [x for x in _quadratic_roots(c) if 0.0 < x <= hi]
    knots = [0.0] + [x for x in _quadratic_roots(_deriv(c)) if 0.0 < x < hi] + [hi]

    def f(t):
        return _horner(c, t)

    found = []
    for a, b in zip(knots[:-1], knots[1:]):
        fa, fb = f(a), f(b)
        if fb == 0.0:
            found.append(b)
        elif fa * fb < 0:
            x = brentq(f, a, b, xtol=1e-15, rtol=1e-15)
            found.append(_polish(c, x, a, b))
    return [x for x in found if x > 0.0]


def positive_root(coeffs: Sequence[float], bracket_hi: float | None = None) -> float:
    """Smallest root in ``(0, bracket_hi]``; raises :class:`NoRootError`."""
    roots = positive_roots(coeffs, bracket_hi)
    if not roots:
        raise NoRootError(f"no positive root of {list(coeffs)} below {bracket_hi}")
    return roots[0]
