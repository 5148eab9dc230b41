"""Earth mover's distance and the positionwise distance between frequency matrices."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Election, frequency_matrix
from .errors import DimensionError, DomainError

INPUT_TOL = 1e-9


def normalizer(m: int) -> float:
    """Largest possible raw positionwise distance between m x m matrices: (m^2 - 1) / 3."""
    return (m * m - 1) / 3


def _distribution(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < -INPUT_TOL):
        raise DomainError(f"{name} has negative entries")
    total = x.sum()
    if abs(total - 1) > INPUT_TOL:
        raise DomainError(f"{name} sums to {total!r}, not 1")
    return np.clip(x, 0.0, None) / total


def emd(x, y) -> float:
    """EMD between two distributions on positions 0..n-1 with cost |i - j| per unit."""
    a = _distribution(x, "x")
    b = _distribution(y, "y")
    if a.shape != b.shape:
        raise DimensionError(f"length mismatch: {a.size} vs {b.size}")
    return float(np.abs(np.cumsum(a - b)[:-1]).sum())


def prepare(a) -> np.ndarray:
    """Validate a frequency matrix for the metric and renormalize its columns.

    Columns must be within ``INPUT_TOL`` of summing to one; tiny negative drift
    is clipped.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if np.any(a < -INPUT_TOL):
        raise DomainError("frequency matrix has negative entries")
    sums = a.sum(axis=0)
    if np.any(np.abs(sums - 1) > INPUT_TOL):
        worst = float(np.max(np.abs(sums - 1)))
        raise DomainError(f"columns must sum to 1 (worst deviation {worst:.3g})")
    return np.clip(a, 0.0, None) / sums


def emd_cost_matrix(a, b) -> np.ndarray:
    """``C[x, y] = EMD(column x of a, column y of b)``."""
    a = prepare(a)
    b = prepare(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return kernels.emd_cost_matrix(np.cumsum(a, axis=0), np.cumsum(b, axis=0))


@dataclass(frozen=True)
class DistanceReport:
    """Outcome of a positionwise comparison.

    ``assignment[x]`` is the column of the second matrix matched with column
    ``x`` of the first. It is *a* minimizer; ties are resolved by the scan
    order of the assignment solver.
    """

    raw: float
    normalized: float
    assignment: tuple[int, ...]
    m: int

    def to_dict(self, one_based: bool = True) -> dict:
        shift = 1 if one_based else 0
        return {
            "m": self.m,
            "raw": self.raw,
            "normalized": self.normalized,
            "assignment": [s + shift for s in self.assignment],
        }


def positionwise_distance(a, b) -> DistanceReport:
    cost = emd_cost_matrix(a, b)
    m = cost.shape[0]
    assign = kernels.linear_assignment(cost)
    raw = kernels.assigned_sum(cost, assign)
    norm = raw / normalizer(m) if m > 1 else 0.0
    return DistanceReport(raw=raw, normalized=norm, assignment=tuple(int(s) for s in assign), m=m)


def npos(a, b) -> float:
    return positionwise_distance(a, b).normalized


def election_distance(e: Election, f) -> DistanceReport:
    """Positionwise distance between an election and another election or a matrix."""
    fa = frequency_matrix(e)
    fb = frequency_matrix(f) if isinstance(f, Election) else np.asarray(f, dtype=float)
    if fb.shape != fa.shape:
        raise DimensionError(f"candidate counts differ: {fa.shape[0]} vs {fb.shape[0]}")
    return positionwise_distance(fa, fb)


def _cums(mats) -> np.ndarray:
    prepared = [prepare(x) for x in mats]
    m = prepared[0].shape[0]
    if any(x.shape != (m, m) for x in prepared):
        raise DimensionError("all matrices must share the same size")
    return np.cumsum(np.stack(prepared), axis=1)


def _run_pairs(cums, left, right, threads: int) -> np.ndarray:
    if threads <= 1 or left.size < 64:
        return kernels.pairs_raw(cums, left, right)
    chunks = np.array_split(np.arange(left.size), threads * 4)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: kernels.pairs_raw(cums, left[idx], right[idx]), chunks))
    return np.concatenate(parts)


def distances_to(a, mats, normalized: bool = True, threads: int = 1) -> np.ndarray:
    """Distances from ``a`` to each matrix in ``mats`` (an ``(G, m, m)`` stack or list)."""
    cums = _cums([a, *list(mats)])
    g = cums.shape[0] - 1
    raw = _run_pairs(cums, np.zeros(g, np.int64), np.arange(1, g + 1), threads)
    m = cums.shape[1]
    return raw / normalizer(m) if normalized and m > 1 else raw


def pairwise_distances(mats, normalized: bool = True, threads: int = 1) -> np.ndarray:
    """Symmetric matrix of positionwise distances between all given matrices."""
    cums = _cums(mats)
    k = cums.shape[0]
    left, right = np.triu_indices(k, k=1)
    raw = _run_pairs(cums, left, right, threads)
    out = np.zeros((k, k))
    out[left, right] = raw
    out[right, left] = raw
    m = cums.shape[1]
    return out / normalizer(m) if normalized and m > 1 else out
