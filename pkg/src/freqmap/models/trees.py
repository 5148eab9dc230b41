"""Frequency matrices of uniform distributions over group-separable votes."""

from __future__ import annotations

from fractions import Fraction
from math import comb

import numpy as np

from ..core import GSTree
from ..errors import DomainError


def gs_tree_matrix(tree: GSTree, exact: bool = False) -> np.ndarray:
    """Each internal node's children are reversed by an independent fair coin.

    For a node ``x`` with parent ``p``, ``before[x][t]`` is the probability that
    exactly ``t`` candidates precede the subtree of ``x``: half the time the
    parent keeps its order and the left siblings' leaves come first, half the
    time the right siblings' do. O(m^2) arithmetic.
    """
    tree.validate()
    m = tree.m
    half = Fraction(1, 2) if exact else 0.5
    zero = Fraction(0) if exact else 0.0
    out = np.full((m, m), zero, dtype=object if exact else float)
    root = np.full(m, zero, dtype=object if exact else float)
    root[0] = Fraction(1) if exact else 1.0

    def descend(node: GSTree, before: np.ndarray):
        sizes = [c.m if isinstance(c, GSTree) else 1 for c in node.children]
        total = sum(sizes)
        left = 0
        for child, size in zip(node.children, sizes):
            right = total - left - size
            f = np.full(m, zero, dtype=before.dtype)
            f[left:] += half * before[: m - left]
            f[right:] += half * before[: m - right]
            if isinstance(child, GSTree):
                descend(child, f)
            else:
                out[:, child] = f
            left += size

    descend(tree, root)
    return out


def _halved_binomials(n: int, exact: bool) -> list:
    """rows[r][k] = C(r, k) / 2**r for r < n, built by Pascal's rule with halving."""
    if exact:
        return [[Fraction(comb(r, k), 2**r) for k in range(r + 1)] for r in range(n)]
    rows = [np.ones(1)]
    for r in range(1, n):
        prev = rows[-1]
        row = np.zeros(r + 1)
        row[:-1] += prev / 2
        row[1:] += prev / 2
        rows.append(row)
    return rows


def caterpillar_matrix(m: int, exact: bool = False) -> np.ndarray:
    """Closed form for the caterpillar tree over 0, 1, ..., m-1.

    Candidate ``j`` (0-based) lands at position ``i`` with probability
    ``C(j, i)/2^(j+1) [i <= j] + C(j, i-(m-1-j))/2^(j+1) [i >= m-1-j]``.
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    h = _halved_binomials(m, exact)
    zero = Fraction(0) if exact else 0.0
    half = Fraction(1, 2) if exact else 0.5
    out = np.full((m, m), zero, dtype=object if exact else float)
    if m == 1:
        out[0, 0] = Fraction(1) if exact else 1.0
        return out
    for j in range(m):
        row = h[j]
        for i in range(m):
            val = zero
            if i <= j:
                val += half * row[i]
            shift = i - (m - 1 - j)
            if 0 <= shift <= j:
                val += half * row[shift]
            out[i, j] = val
    return out
