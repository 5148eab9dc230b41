"""Mallows frequency matrices.

Two independent routes compute the same matrix:

* the counting route: exact integer tables of rankings by swap distance and
  by (central rank, position), combined into a polynomial in ``phi``;
* the insertion route: a float Markov chain over the position of one
  candidate while later candidates are inserted (see
  :func:`freqmap.kernels.mallows_chain`), O(m^3) and usable for large ``m``.

The counting route is the default; it is capped at ``MAX_TABLE_M`` candidates
because its tables grow like m^4.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .. import kernels
from ..core import as_ranking
from ..errors import DimensionError, DomainError, ResourceError

MAX_TABLE_M = 50
INT64_SAFE_M = 20  # 20! < 2**63
BISECTION_TOL = 1e-10


# ---------------------------------------------------------------------------
# Mahonian numbers


@lru_cache(maxsize=None)
def _mahonian_rows(m: int) -> tuple[tuple[int, ...], ...]:
    rows: list[tuple[int, ...]] = [(1,)]
    for size in range(1, m + 1):
        prev = rows[-1]
        kmax = size * (size - 1) // 2
        row = [0] * (kmax + 1)
        for k in range(kmax + 1):
            val = prev[k] if k < len(prev) else 0
            if k >= 1:
                val += row[k - 1]
            if k - size >= 0 and k - size < len(prev):
                val -= prev[k - size]
            row[k] = val
        rows.append(tuple(row))
    return tuple(rows)


@dataclass(frozen=True)
class MahonianTable:
    """Counts ``S(size, k)`` of rankings of ``size`` items with ``k`` inversions, for size <= m."""

    m: int
    rows: tuple[tuple[int, ...], ...]

    def S(self, size: int, k: int) -> int:
        if size < 0 or size > self.m or k < 0:
            return 0
        row = self.rows[size]
        return row[k] if k < len(row) else 0

    def row(self, size: int) -> tuple[int, ...]:
        return self.rows[size]


def mahonian(m: int) -> MahonianTable:
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    return MahonianTable(m, _mahonian_rows(m))


# ---------------------------------------------------------------------------
# Position counts T(m, k, j, i)


@lru_cache(maxsize=8)
def position_count_table(m: int) -> np.ndarray:
    """Exact table ``T[j, i, k]`` (0-based central rank j, position i, distance k).

    Counts rankings at swap distance ``k`` from the identity that put the
    candidate of central rank ``j`` at position ``i``. dtype is int64 up to
    ``INT64_SAFE_M`` candidates and Python ints (object) above.
    """
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    dtype = np.int64 if m <= INT64_SAFE_M else object
    S = _mahonian_rows(m)
    kmax = m * (m - 1) // 2
    out = np.zeros((m, m, kmax + 1), dtype=dtype)
    for j in range(m):
        size = j + 1
        # candidate j is the newest of the first `size`; at position x it sits
        # above size-1-x older candidates, one inversion each
        ks = size * (size - 1) // 2
        cur = np.zeros((size, ks + 1), dtype=dtype)
        srow = S[size - 1]
        for x in range(size):
            shift = size - 1 - x
            cur[x, shift : shift + len(srow)] = np.array(srow, dtype=dtype)
        for size in range(j + 2, m + 1):
            cur = _grow(cur, size, dtype)
        out[j, :, :] = cur
    out.setflags(write=False)
    return out


def _grow(cur: np.ndarray, size: int, dtype) -> np.ndarray:
    """Add item ``size-1`` to every ranking counted in ``cur`` (``size-1`` items)."""
    kprev = cur.shape[1] - 1
    knew = size * (size - 1) // 2
    zero = np.zeros((cur.shape[0], 1), dtype=dtype)
    pref = np.concatenate([zero, np.cumsum(cur, axis=1)], axis=1)  # pref[x, k+1] = sum_{<=k}
    ks = np.arange(knew + 1)

    def window(rows: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        # sum_{d=lo}^{hi} cur[row, k-d] for every k, per row
        top = np.clip(ks[None, :] - lo[:, None], -1, kprev) + 1
        bot = np.clip(ks[None, :] - hi[:, None] - 1, -1, kprev) + 1
        p = pref[rows]
        return np.take_along_axis(p, top, axis=1) - np.take_along_axis(p, bot, axis=1)

    new = np.zeros((size, knew + 1), dtype=dtype)
    # item stays at x: new item lands below it, d = 0..size-x-2 inversions
    stay = np.arange(size - 1)
    new[stay] += window(stay, np.zeros(size - 1, np.int64), size - stay - 2)
    # item moves from x-1 to x: new item lands above, d = size-x..size-1
    moved = np.arange(1, size)
    new[moved] += window(moved - 1, size - moved, np.full(size - 1, size - 1))
    return new


def mallows_position_counts(m: int, k: int, j: int, i: int) -> int:
    """T(m, k, j, i) with 1-based ``j`` (central rank) and ``i`` (position).

    Out-of-range arguments give 0.
    """
    if m < 1 or not (1 <= j <= m and 1 <= i <= m) or not 0 <= k <= m * (m - 1) // 2:
        return 0
    return int(position_count_table(m)[j - 1, i - 1, k])


# ---------------------------------------------------------------------------
# Expected swap distance and the normalized dispersion


def _horner(coeffs: Sequence, x):
    """sum_k coeffs[k] * x**k, evaluated from the highest power down."""
    acc = coeffs[-1] * (x * 0 + 1)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


@lru_cache(maxsize=None)
def _mahonian_float(m: int) -> np.ndarray:
    return np.array([float(s) for s in _mahonian_rows(m)[m]])


def expected_swap_distance(m: int, phi):
    """E[swap distance to the central vote] under Mallows(phi); vectorizes over ``phi``."""
    phi = np.asarray(phi, dtype=float)
    if m < 2:
        return np.zeros_like(phi)
    if m > 150:
        return _expected_swap_product(m, phi)
    s = _mahonian_float(m)
    num = _horner(s * np.arange(s.size), phi)
    den = _horner(s, phi)
    return num / den


def _expected_swap_product(m: int, phi) -> np.ndarray:
    """Same expectation through the factorization of the Mahonian generating function."""
    phi = np.asarray(phi, dtype=float)
    total = np.zeros_like(phi)
    for size in range(2, m + 1):
        d = np.arange(size, dtype=float)
        pw = phi[..., None] ** d
        pw[..., 0] = 1.0
        total = total + (pw * d).sum(axis=-1) / pw.sum(axis=-1)
    return total


def norm_phi_to_phi(m: int, norm_phi):
    """Dispersion whose expected swap distance is ``norm_phi / 2`` of the maximum.

    Bisection on the (increasing) expected distance until it is within
    ``BISECTION_TOL`` of the target. Accepts scalars or arrays.
    """
    arr = np.asarray(norm_phi, dtype=float)
    if np.any((arr < 0) | (arr > 1)):
        raise DomainError("norm_phi must lie in [0, 1]")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = arr.copy()
    if m >= 2:
        target = arr / 2 * (m * (m - 1) / 2)
        inner = (arr > 0) & (arr < 1)
        lo = np.zeros(inner.sum())
        hi = np.ones(inner.sum())
        goal = target[inner]
        res = np.full(goal.shape, np.nan)
        for _ in range(200):
            mid = (lo + hi) / 2
            val = expected_swap_distance(m, mid)
            hit = np.isnan(res) & (np.abs(val - goal) <= BISECTION_TOL)
            res[hit] = mid[hit]
            if not np.isnan(res).any():
                break
            below = val < goal
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        left = np.isnan(res)  # interval exhausted before reaching the tolerance
        res[left] = ((lo + hi) / 2)[left]
        out[inner] = res
    return float(out[0]) if scalar else out


def phi_to_norm_phi(m: int, phi):
    if m < 2:
        return np.zeros_like(np.asarray(phi, dtype=float))
    return 2 * expected_swap_distance(m, phi) / (m * (m - 1) / 2)


# ---------------------------------------------------------------------------
# Matrices


def _as_exact(phi) -> Fraction:
    if isinstance(phi, Fraction):
        return phi
    if isinstance(phi, (int, np.integer)):
        return Fraction(int(phi))
    if isinstance(phi, str):
        return Fraction(phi)
    return Fraction(repr(float(phi)))


def _table_matrix(m: int, phi, exact: bool) -> np.ndarray:
    T = position_count_table(m)
    if exact:
        x = _as_exact(phi)
        S = _mahonian_rows(m)[m]
        z = _horner([Fraction(s) for s in S], x)
        out = np.empty((m, m), dtype=object)
        for j in range(m):
            for i in range(m):
                out[i, j] = _horner([int(t) for t in T[j, i]], x) / z
        return out
    coeffs = np.asarray(T, dtype=float)  # [j, i, k]
    z = _horner(_mahonian_float(m), float(phi))
    vals = _horner([coeffs[:, :, k] for k in range(coeffs.shape[2])], float(phi))
    return (vals / z).T.copy()


def _check_phi(phi):
    if not 0 <= float(phi) <= 1:
        raise DomainError(f"phi must lie in [0, 1], got {phi}")


def identity_mallows_matrix(m: int, phi, exact: bool = False, method: str = "table",
                            max_table_m: int = MAX_TABLE_M) -> np.ndarray:
    """Frequency matrix for central vote 0 > 1 > ... > m-1; column j = central rank j."""
    _check_phi(phi)
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if method == "auto":
        method = "table" if m <= max_table_m else "chain"
    if method == "table":
        if m > max_table_m:
            raise ResourceError(
                f"m={m} exceeds the position-count table cap of {max_table_m}; "
                "raise max_table_m or use method='chain'"
            )
        return _table_matrix(m, phi, exact)
    if method == "chain":
        if exact:
            raise DomainError("the insertion-chain route is float only")
        return kernels.mallows_chain(m, float(phi))
    raise DomainError(f"unknown method {method!r}")


def _place_columns(g: np.ndarray, central) -> np.ndarray:
    if central is None:
        return g
    order = as_ranking(central, g.shape[0])
    out = np.empty_like(g)
    out[:, order] = g
    return out


def mallows_matrix(m: int, phi, central: Sequence[int] | None = None, exact: bool = False,
                   method: str = "table", max_table_m: int = MAX_TABLE_M) -> np.ndarray:
    """Frequency matrix of Mallows(central, phi).

    ``central`` defaults to 0 > 1 > ... > m-1; other central votes permute the
    columns. ``method`` is ``"table"`` (exact counting, capped at
    ``max_table_m``), ``"chain"`` (float insertion chain) or ``"auto"``.
    """
    g = identity_mallows_matrix(m, phi, exact=exact, method=method, max_table_m=max_table_m)
    return _place_columns(g, central)


def mallows_matrices(m: int, phis, method: str = "auto") -> np.ndarray:
    """Stack of identity-central Mallows matrices for every ``phi`` in ``phis``."""
    phis = np.asarray(phis, dtype=float)
    if np.any((phis < 0) | (phis > 1)):
        raise DomainError("phi must lie in [0, 1]")
    if method == "auto":
        method = "table" if m <= MAX_TABLE_M else "chain"
    if method == "chain":
        return np.stack([kernels.mallows_chain(m, float(p)) for p in phis])
    if m > MAX_TABLE_M:
        raise ResourceError(f"m={m} exceeds the position-count table cap of {MAX_TABLE_M}")
    coeffs = np.asarray(position_count_table(m), dtype=float)
    x = phis[:, None, None]
    vals = _horner([coeffs[:, :, k][None] for k in range(coeffs.shape[2])], x)
    z = _horner(_mahonian_float(m), phis)
    return np.transpose(vals / z[:, None, None], (0, 2, 1)).copy()


def reversal_mixture_matrix(m: int, phi, psi, p, central: Sequence[int] | None = None,
                            exact: bool = False, method: str = "table") -> np.ndarray:
    """``p * Mallows(central, phi) + (1 - p) * Mallows(reverse(central), psi)``."""
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    center = np.arange(m) if central is None else as_ranking(central, m)
    a = mallows_matrix(m, phi, center, exact=exact, method=method)
    b = mallows_matrix(m, psi, center[::-1], exact=exact, method=method)
    if exact:
        p = _as_exact(p)
    return p * a + (1 - p) * b


def mallows_filter_matrix(base: np.ndarray, phi, exact: bool = False, method: str = "auto") -> np.ndarray:
    """Matrix of "draw from base, then perturb with Mallows(phi) around the draw".

    Equals ``Mallows(identity, phi) @ base``.
    """
    base = np.asarray(base)
    if base.ndim != 2 or base.shape[0] != base.shape[1]:
        raise DimensionError(f"base must be square, got shape {base.shape}")
    g = identity_mallows_matrix(base.shape[0], phi, exact=exact, method=method)
    if exact:
        return np.dot(g, base)
    return g @ np.asarray(base, dtype=float)
