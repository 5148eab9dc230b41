"""Fitting model parameters to elections, and the Kemeny-based dispersion estimate."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .core import Election, frequency_matrix
from .errors import DomainError, ResourceError
from .metric import distances_to
from .models import conitzer_matrix, mallows_matrices, norm_phi_to_phi, walsh_matrix

FIT_FAMILIES = ("mallows", "phi-conitzer", "phi-walsh", "mallows-mixture")
KEMENY_MAX_M = 16


def grid(step: float, stop: float = 1.0) -> np.ndarray:
    """``0, step, 2*step, ..., stop``; ``stop / step`` must be a whole number."""
    if not 0 < step <= stop:
        raise DomainError(f"grid step must lie in (0, {stop}], got {step}")
    count = stop / step
    k = round(count)
    if abs(count - k) > 1e-9:
        raise DomainError(f"grid step {step} does not divide {stop}")
    return np.round(np.arange(k + 1) * step, 12)


@lru_cache(maxsize=32)
def _family_matrices(family: str, m: int, step: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(norm-phi grid, raw phi grid, stacked matrices), cached across elections."""
    norm = grid(step)
    phis = np.asarray(norm_phi_to_phi(m, norm))
    mats = mallows_matrices(m, phis)
    if family == "phi-conitzer":
        mats = mats @ conitzer_matrix(m)
    elif family == "phi-walsh":
        mats = mats @ walsh_matrix(m)
    for a in (norm, phis, mats):
        a.setflags(write=False)
    return norm, phis, mats


@dataclass(frozen=True)
class FitResult:
    """Best grid point for one family.

    For the mixture, ``p`` is the weight of the less likely component
    (the fit is symmetric in ``p`` and ``1 - p``).
    """

    family: str
    norm_phi: float
    phi: float
    distance: float
    grid_step: float
    p: float | None = None

    def to_dict(self) -> dict:
        out = {"family": self.family, "norm_phi": self.norm_phi, "phi": self.phi, "distance": self.distance,
               "grid_step": self.grid_step}
        if self.p is not None:
            out["p"] = self.p
        return out


def fit_model(e: Election | np.ndarray, family: str, grid_step: float = 0.001, p_step: float = 0.05,
              threads: int = 1) -> FitResult:
    """Grid point whose model matrix is closest (normalized) to the election.

    Ties go to the smaller norm-phi, then the smaller p. Accepts an election
    or a frequency matrix.
    """
    if family not in FIT_FAMILIES:
        raise DomainError(f"cannot fit family {family!r}; expected one of {', '.join(FIT_FAMILIES)}")
    if isinstance(e, Election):
        if e.n < 1:
            raise DomainError("cannot fit an empty election")
        target = frequency_matrix(e)
    else:
        target = np.asarray(e, dtype=float)
    m = target.shape[0]
    base = "mallows" if family == "mallows-mixture" else family
    norm, phis, mats = _family_matrices(base, m, float(grid_step))
    if family != "mallows-mixture":
        d = distances_to(target, mats, threads=threads)
        k = int(np.argmin(d))
        return FitResult(family, float(norm[k]), float(phis[k]), float(d[k]), grid_step)
    ps = grid(p_step, 0.5)
    flipped = mats[:, :, ::-1]
    stack = (1 - ps)[None, :, None, None] * mats[:, None] + ps[None, :, None, None] * flipped[:, None]
    d = distances_to(target, stack.reshape(-1, m, m), threads=threads).reshape(len(norm), len(ps))
    a, b = np.unravel_index(int(np.argmin(d)), d.shape)
    return FitResult(family, float(norm[a]), float(phis[a]), float(d[a, b]), grid_step, p=float(ps[b]))


# ---------------------------------------------------------------------------
# Kemeny


@dataclass(frozen=True)
class KemenyEstimate:
    consensus: tuple[int, ...]
    total_distance: int
    n: int
    phi_hat: float
    norm_phi_hat: float

    def to_dict(self, one_based: bool = True) -> dict:
        shift = 1 if one_based else 0
        return {
            "consensus": [c + shift for c in self.consensus],
            "total_distance": self.total_distance,
            "n": self.n,
            "phi_hat": self.phi_hat,
            "norm_phi_hat": self.norm_phi_hat,
        }


def majority_counts(e: Election) -> np.ndarray:
    """``w[a, b]``: number of voters ranking ``a`` above ``b``."""
    m = e.m
    pos = np.empty_like(e.rankings)
    pos[np.arange(pos.shape[0])[:, None], e.rankings] = np.arange(m)[None, :]
    above = pos[:, :, None] < pos[:, None, :]
    return np.einsum("r,rab->ab", e.counts, above.astype(np.int64))


def _kemeny(e: Election) -> tuple[tuple[int, ...], int]:
    m = e.m
    if m > KEMENY_MAX_M:
        raise ResourceError(f"exact Kemeny is capped at m={KEMENY_MAX_M}, got m={m}")
    top, best = kernels.kemeny_tables(majority_counts(e))
    s = (1 << m) - 1
    order = []
    while s:
        for c in range(m):
            if (s >> c) & 1 and top[c, s] + best[s ^ (1 << c)] == best[s]:
                order.append(c)
                s ^= 1 << c
                break
    return tuple(order), int(best[(1 << m) - 1])


def kemeny_consensus(e: Election) -> tuple[int, ...]:
    """Ranking minimizing the total swap distance; the lexicographically smallest among optima."""
    return _kemeny(e)[0]


def kemeny_mle_phi(e: Election) -> KemenyEstimate:
    """Dispersion whose expected swap distance equals the mean distance to the Kemeny consensus."""
    consensus, total = _kemeny(e)
    m = e.m
    pairs = m * (m - 1) / 2
    norm = 0.0 if m < 2 else min(1.0, 2 * (total / e.n) / pairs)
    return KemenyEstimate(consensus, total, e.n, float(norm_phi_to_phi(m, norm)), norm)
