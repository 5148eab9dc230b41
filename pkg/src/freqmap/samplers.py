"""Random elections drawn from every model family.

Randomness comes from numpy's PCG64 generator seeded through ``SeedSequence``.
Each trial of a batch gets its own child stream (``SeedSequence(seed).spawn``),
so results do not depend on how trials are scheduled across threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Election, GSTree, as_ranking
from .errors import DomainError
from .metric import distances_to
from .models import (
    CONITZER,
    FILTERED,
    GS_TREE,
    IC,
    MALLOWS,
    MIXTURE,
    WALSH,
    ModelSpec,
    model_matrix,
)

SEED_MAX = 2**64 - 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_check_seed(seed))))


def trial_rngs(seed: int, trials: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(_check_seed(seed)).spawn(trials)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


@dataclass(frozen=True)
class SampleRequest:
    spec: ModelSpec
    n: int
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError(f"n must be at least 1, got {self.n}")
        _check_seed(self.seed)


# ---------------------------------------------------------------------------
# per-family samplers; each returns an (n, m) array with row[pos] = candidate


def _ic(m: int, n: int, rng) -> np.ndarray:
    return np.argsort(rng.random((n, m)), axis=1, kind="stable")


def _mallows_identity(m: int, n: int, phi: float, rng) -> np.ndarray:
    """Repeated insertion: item t goes to slot q in [0, t] with weight phi^(t-q)."""
    ins = np.zeros((n, m), np.int64)
    u = rng.random((n, m))
    for t in range(1, m):
        w = np.power(phi, np.arange(t, -1, -1, dtype=float))
        cdf = np.cumsum(w)
        ins[:, t] = np.minimum(np.searchsorted(cdf, u[:, t] * cdf[-1], side="right"), t)
    return kernels.decode_insertions(ins)


def _mallows(m: int, n: int, phi: float, central, rng) -> np.ndarray:
    central = np.arange(m) if central is None else as_ranking(central, m)
    return central[_mallows_identity(m, n, phi, rng)]


def _tree_offsets(tree: GSTree, m: int):
    nodes = tree.internal_nodes()
    index = {id(x): k for k, x in enumerate(nodes)}
    base = np.zeros((m, len(nodes)), np.int64)
    delta = np.zeros((m, len(nodes)), np.int64)

    def walk(node: GSTree):
        k = index[id(node)]
        sizes = [c.m if isinstance(c, GSTree) else 1 for c in node.children]
        total = sum(sizes)
        left = 0
        for child, size in zip(node.children, sizes):
            leaves = child.leaves() if isinstance(child, GSTree) else [child]
            right = total - left - size
            base[leaves, k] = left
            delta[leaves, k] = right - left
            if isinstance(child, GSTree):
                walk(child)
            left += size

    walk(tree)
    return base.sum(axis=1), delta


def _gs_tree(tree: GSTree, n: int, rng) -> np.ndarray:
    """One fair coin per internal node decides whether its children are reversed."""
    m = tree.m
    base, delta = _tree_offsets(tree, m)
    coins = rng.integers(0, 2, size=(n, delta.shape[1]), dtype=np.int64)
    pos = base[None, :] + coins @ delta.T
    return np.argsort(pos, axis=1, kind="stable")


def _conitzer(m: int, n: int, rng) -> np.ndarray:
    """Uniform peak, then extend the top interval left or right by a fair coin."""
    out = np.empty((n, m), np.int64)
    lo = rng.integers(0, m, size=n)
    hi = lo.copy()
    out[:, 0] = lo
    coins = rng.random((n, max(m - 1, 0))) < 0.5
    for i in range(1, m):
        go_left = np.where(lo == 0, False, np.where(hi == m - 1, True, coins[:, i - 1]))
        lo = np.where(go_left, lo - 1, lo)
        hi = np.where(go_left, hi, hi + 1)
        out[:, i] = np.where(go_left, lo, hi)
    return out


def _walsh(m: int, n: int, rng) -> np.ndarray:
    """Caterpillar votes mapped onto single-peaked ones (inverse permutation, reversed)."""
    if m == 1:
        return np.zeros((n, 1), np.int64)
    cat = _gs_tree(GSTree.caterpillar(m), n, rng)
    inv = np.empty_like(cat)
    rows = np.arange(n)[:, None]
    inv[rows, cat] = np.arange(m)[None, :]
    return inv[:, ::-1].copy()


def sample_rankings(spec: ModelSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. votes from ``spec`` as an ``(n, m)`` array (row[pos] = candidate)."""
    m = spec.m
    fam = spec.family
    if fam == IC:
        return _ic(m, n, rng)
    if fam == MALLOWS:
        return _mallows(m, n, spec.dispersion(), spec.central, rng)
    if fam == MIXTURE:
        central = np.arange(m) if spec.central is None else as_ranking(spec.central, m)
        keep = rng.random(n) < float(spec.p)
        out = np.empty((n, m), np.int64)
        out[keep] = _mallows(m, int(keep.sum()), spec.dispersion(), central, rng)
        out[~keep] = _mallows(m, int((~keep).sum()), spec.reverse_dispersion(), central[::-1], rng)
        return out
    if fam == CONITZER:
        return _conitzer(m, n, rng)
    if fam == WALSH:
        return _walsh(m, n, rng)
    if fam == GS_TREE:
        return _gs_tree(spec.tree, n, rng)
    if fam == FILTERED:
        base = sample_rankings(spec.base, n, rng)
        noise = _mallows_identity(m, n, spec.dispersion(), rng)
        return np.take_along_axis(base, noise, axis=1)
    raise DomainError(f"no sampler for family {fam!r}")


def sample_election(req: SampleRequest) -> Election:
    rng = make_rng(req.seed)
    return Election.from_votes(sample_rankings(req.spec, int(req.n), rng), m=req.spec.m)


def rankings_frequency(orders: np.ndarray) -> np.ndarray:
    """Frequency matrix straight from an ``(n, m)`` ranking array."""
    n, m = orders.shape
    out = np.empty((m, m))
    for pos in range(m):
        out[pos] = np.bincount(orders[:, pos], minlength=m)
    return out / n


@dataclass(frozen=True)
class VarianceSummary:
    mean: float
    q10: float
    q90: float
    distances: tuple[float, ...]

    def to_dict(self) -> dict:
        return {"mean": self.mean, "q10": self.q10, "q90": self.q90, "trials": len(self.distances)}


def empirical_matrix_distance(spec: ModelSpec, n: int, trials: int, seed: int = 0,
                              threads: int = 1) -> VarianceSummary:
    """Distances from ``trials`` sampled elections of ``n`` voters to the model's matrix."""
    if trials < 1:
        raise DomainError(f"trials must be at least 1, got {trials}")
    if n < 1:
        raise DomainError(f"n must be at least 1, got {n}")
    target = model_matrix(spec)
    rngs = trial_rngs(seed, trials)

    def one(rng):
        return rankings_frequency(sample_rankings(spec, n, rng))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mats = list(pool.map(one, rngs))
    else:
        mats = [one(r) for r in rngs]
    d = distances_to(target, np.stack(mats), threads=threads)
    return VarianceSummary(
        mean=float(d.mean()),
        q10=float(np.quantile(d, 0.1)),
        q90=float(np.quantile(d, 0.9)),
        distances=tuple(float(x) for x in d),
    )
