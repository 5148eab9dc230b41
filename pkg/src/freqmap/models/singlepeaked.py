"""Single-peaked vote distributions on the axis 0 < 1 < ... < m-1.

Walsh: uniform over all 2^(m-1) single-peaked votes.
Conitzer (random peak): uniform peak, then grow the interval one step left or
right with a fair coin, forced at the axis ends.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..errors import DomainError
from .trees import _halved_binomials


def walsh_matrix(m: int, exact: bool = False) -> np.ndarray:
    """Closed form: with ``n = m-1-i``, ``P(j at i) = C(n, j)/2^(n+1) + C(n, j-i)/2^(n+1)``."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    h = _halved_binomials(m, exact)
    zero = Fraction(0) if exact else 0.0
    half = Fraction(1, 2) if exact else 0.5
    out = np.full((m, m), zero, dtype=object if exact else float)
    for i in range(m):
        n = m - 1 - i
        row = h[n]
        for j in range(m):
            val = zero
            if j <= n:
                val += half * row[j]
            if 0 <= j - i <= n:
                val += half * row[j - i]
            out[i, j] = val
    return out


def _extend_probs(m: int, exact: bool):
    one = Fraction(1) if exact else 1.0
    half = Fraction(1, 2) if exact else 0.5
    zero = Fraction(0) if exact else 0.0

    def grow_right(lo, hi):
        if hi == m - 1:
            return zero
        return one if lo == 0 else half

    def grow_left(lo, hi):
        if lo == 0:
            return zero
        return one if hi == m - 1 else half

    return grow_left, grow_right


def interval_probabilities(m: int, exact: bool = False) -> np.ndarray:
    """``f[lo, hi]``: probability that the top ``hi-lo+1`` positions hold exactly ``lo..hi``."""
    zero = Fraction(0) if exact else 0.0
    grow_left, grow_right = _extend_probs(m, exact)
    f = np.full((m, m), zero, dtype=object if exact else float)
    for lo in range(m):
        f[lo, lo] = Fraction(1, m) if exact else 1.0 / m
    for width in range(1, m):
        for lo in range(m - width):
            hi = lo + width
            f[lo, hi] = f[lo, hi - 1] * grow_right(lo, hi - 1) + f[lo + 1, hi] * grow_left(lo + 1, hi)
    return f


def conitzer_matrix(m: int, exact: bool = False) -> np.ndarray:
    """Random-peak frequency matrix via the interval probabilities; valid for every ``m``.

    Candidate ``j`` takes position ``i >= 1`` when the top ``i`` positions are
    the interval just right of ``j`` and it grows left, or the interval just
    left of ``j`` and it grows right.
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    f = interval_probabilities(m, exact)
    grow_left, grow_right = _extend_probs(m, exact)
    zero = Fraction(0) if exact else 0.0
    out = np.full((m, m), zero, dtype=object if exact else float)
    for j in range(m):
        out[0, j] = f[j, j]
        for i in range(1, m):
            val = zero
            if j + i <= m - 1:
                val += f[j + 1, j + i] * grow_left(j + 1, j + i)
            if j - i >= 0:
                val += f[j - i, j - 1] * grow_right(j - i, j - 1)
            out[i, j] = val
    return out


def conitzer_closed_form(m: int) -> np.ndarray:
    """Case table for even ``m`` (exact Fractions), mirrored for the right half of the axis."""
    if m % 2:
        raise DomainError("the closed form holds for even m only")
    out = np.full((m, m), Fraction(0), dtype=object)
    for j1 in range(1, m // 2 + 1):  # 1-based candidate on the left half
        for i1 in range(1, m + 1):
            if i1 < j1:
                val = Fraction(2, 2 * m)
            elif i1 == j1:
                val = Fraction(j1 + 1, 2 * m)
            elif i1 < m - j1 + 1:
                val = Fraction(1, 2 * m)
            elif i1 == m - j1 + 1:
                val = Fraction(m - j1 + 1, 2 * m)
            else:
                val = Fraction(0)
            out[i1 - 1, j1 - 1] = val
            out[i1 - 1, m - j1] = val
    return out
