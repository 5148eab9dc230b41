"""Rankings, elections and frequency matrices.

Conventions used throughout the package:

* A ranking is a sequence ``order`` of candidate indices, best first, so
  ``order[i]`` is the candidate in position ``i``. Positions and candidates are
  0-based here; files and CLI output use 1-based positions.
* A frequency matrix is an ``m x m`` array whose entry ``[i, j]`` is the
  frequency of candidate ``j`` at position ``i`` (rows = positions). Float
  matrices are ``float64`` arrays; exact matrices are ``object`` arrays of
  :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimensionError, DomainError, StructureError

BISTOCHASTIC_TOL = 1e-9


def as_ranking(v: Sequence[int], m: int | None = None) -> np.ndarray:
    """Validate ``v`` as a permutation of ``range(m)`` and return it as an array."""
    arr = np.asarray(v, dtype=np.int64).reshape(-1)
    if m is not None and arr.size != m:
        raise DimensionError(f"ranking has {arr.size} entries, expected {m}")
    if not np.array_equal(np.sort(arr), np.arange(arr.size)):
        raise StructureError(f"not a permutation of 0..{arr.size - 1}: {arr.tolist()}")
    return arr


def position_of(v: Sequence[int], c: int) -> int:
    """Position (0-based) of candidate ``c`` in ranking ``v``."""
    arr = as_ranking(v)
    if not 0 <= c < arr.size:
        raise DomainError(f"candidate {c} out of range for m={arr.size}")
    return int(np.flatnonzero(arr == c)[0])


def positions(v: Sequence[int]) -> np.ndarray:
    """Inverse permutation: ``positions(v)[c]`` is the position of ``c``."""
    arr = as_ranking(v)
    inv = np.empty_like(arr)
    inv[arr] = np.arange(arr.size)
    return inv


def reverse(v: Sequence[int]) -> np.ndarray:
    return as_ranking(v)[::-1].copy()


def swap_distance(u: Sequence[int], v: Sequence[int]) -> int:
    """Kendall tau distance: number of candidate pairs the two rankings order differently."""
    a = as_ranking(u)
    b = as_ranking(v)
    if a.size != b.size:
        raise DimensionError(f"rankings have different lengths ({a.size} vs {b.size})")
    # relabel so that b becomes the identity; then count inversions of a
    seq = positions(b)[a]
    upper = np.triu(np.ones((seq.size, seq.size), dtype=bool), k=1)
    return int(np.count_nonzero((seq[:, None] > seq[None, :]) & upper))


@dataclass(frozen=True, eq=False)
class Election:
    """An election over ``m`` candidates stored as distinct rankings with multiplicities.

    ``rankings[r]`` is a ranking (best first) and ``counts[r]`` how many voters
    cast it. Use :meth:`from_votes` to build one from a flat list of votes.
    """

    m: int
    rankings: np.ndarray
    counts: np.ndarray
    names: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        rankings = np.asarray(self.rankings, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64).reshape(-1)
        if rankings.ndim != 2 or rankings.shape[1] != self.m:
            raise DimensionError(f"rankings must have shape (k, {self.m}), got {rankings.shape}")
        if rankings.shape[0] != counts.shape[0]:
            raise DimensionError("rankings and counts differ in length")
        if counts.size == 0 or counts.sum() < 1:
            raise DomainError("an election needs at least one vote")
        if np.any(counts < 1):
            raise DomainError("multiplicities must be positive")
        ok = np.all(np.sort(rankings, axis=1) == np.arange(self.m), axis=1)
        if not ok.all():
            bad = int(np.flatnonzero(~ok)[0])
            raise StructureError(f"row {bad} is not a permutation: {rankings[bad].tolist()}")
        if self.names is not None and len(self.names) != self.m:
            raise DimensionError("names must list every candidate")
        rankings.setflags(write=False)
        counts.setflags(write=False)
        object.__setattr__(self, "rankings", rankings)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_votes(cls, votes: Iterable[Sequence[int]], m: int | None = None, names=None) -> "Election":
        arr = np.asarray(list(votes) if not isinstance(votes, np.ndarray) else votes, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0:
            raise DomainError("an election needs at least one vote")
        if m is None:
            m = arr.shape[1]
        uniq, counts = np.unique(arr, axis=0, return_counts=True)
        return cls(m, uniq, counts, names)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Sequence[int], int]], m: int | None = None, names=None) -> "Election":
        pairs = list(pairs)
        if not pairs:
            raise DomainError("an election needs at least one vote")
        rankings = np.array([p[0] for p in pairs], dtype=np.int64)
        counts = np.array([p[1] for p in pairs], dtype=np.int64)
        return cls(rankings.shape[1] if m is None else m, rankings, counts, names)

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def votes(self) -> list[tuple[tuple[int, ...], int]]:
        return [(tuple(int(c) for c in r), int(k)) for r, k in zip(self.rankings, self.counts)]

    def expanded(self) -> np.ndarray:
        """All votes as an ``(n, m)`` array (multiplicities unrolled)."""
        return np.repeat(self.rankings, self.counts, axis=0)

    def same_votes(self, other: "Election") -> bool:
        return self.m == other.m and sorted(self.votes) == sorted(other.votes)


def frequency_matrix(e: Election, exact: bool = False) -> np.ndarray:
    """Fraction of voters putting candidate ``j`` at position ``i``, as ``F[i, j]``.

    Counts are accumulated as integers; ``exact=True`` returns Fractions.
    """
    if e.n < 1:
        raise DomainError("frequency matrix of an empty election is undefined")
    m = e.m
    tally = np.zeros((m, m), dtype=np.int64)
    pos = np.broadcast_to(np.arange(m), e.rankings.shape)
    np.add.at(tally, (pos, e.rankings), e.counts[:, None])
    n = e.n
    if exact:
        out = np.empty((m, m), dtype=object)
        for i in range(m):
            for j in range(m):
                out[i, j] = Fraction(int(tally[i, j]), n)
        return out
    return tally / n


def permutation_matrix(v: Sequence[int]) -> np.ndarray:
    arr = as_ranking(v)
    out = np.zeros((arr.size, arr.size))
    out[np.arange(arr.size), arr] = 1.0
    return out


def is_bistochastic(a: np.ndarray, tol: float = BISTOCHASTIC_TOL) -> bool:
    """Nonnegative square matrix whose rows and columns sum to one.

    Object (Fraction) matrices are checked exactly when ``tol == 0``.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    if a.dtype == object:
        if any(x < 0 for x in a.flat):
            return False
        rows = [sum(a[i, :]) for i in range(a.shape[0])]
        cols = [sum(a[:, j]) for j in range(a.shape[1])]
        return all(abs(s - 1) <= tol for s in rows + cols)
    if np.any(a < -tol):
        return False
    return bool(np.all(np.abs(a.sum(axis=0) - 1) <= tol) and np.all(np.abs(a.sum(axis=1) - 1) <= tol))


def to_float(a: np.ndarray) -> np.ndarray:
    return np.asarray(a, dtype=float)


def is_single_peaked_wrt(v: Sequence[int], axis: Sequence[int]) -> bool:
    """Every top-``t`` prefix of ``v`` is a contiguous interval of ``axis``."""
    order = as_ranking(v)
    ax = as_ranking(axis)
    if order.size != ax.size:
        raise DimensionError("vote and axis have different lengths")
    where = positions(ax)[order]
    lo = hi = where[0]
    for p in where[1:]:
        if p == lo - 1:
            lo = p
        elif p == hi + 1:
            hi = p
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Group-separable trees

Node = Union[int, "GSTree"]


@dataclass(frozen=True)
class GSTree:
    """Rooted ordered tree; leaves are candidate indices, internal nodes have >= 2 children."""

    children: tuple

    def __post_init__(self):
        kids = tuple(c if isinstance(c, GSTree) else _leaf(c) for c in self.children)
        if len(kids) < 2:
            raise StructureError("internal nodes need at least two children")
        object.__setattr__(self, "children", kids)

    @classmethod
    def from_nested(cls, nested) -> "GSTree":
        """Build from nested lists, e.g. ``[[0, 1], [2, 3]]``; validates the leaf set."""

        def build(x):
            if isinstance(x, (list, tuple)):
                return cls(tuple(build(c) for c in x))
            return _leaf(x)

        tree = build(nested)
        if not isinstance(tree, GSTree):
            raise StructureError("a tree needs at least one internal node")
        tree.validate()
        return tree

    def to_nested(self) -> list:
        return [c.to_nested() if isinstance(c, GSTree) else c for c in self.children]

    def leaves(self) -> list[int]:
        out: list[int] = []
        for c in self.children:
            out.extend(c.leaves() if isinstance(c, GSTree) else [c])
        return out

    @property
    def m(self) -> int:
        return len(self.leaves())

    def validate(self) -> "GSTree":
        leaves = self.leaves()
        if sorted(leaves) != list(range(len(leaves))):
            raise StructureError(f"leaves must be exactly 0..{len(leaves) - 1}, got {sorted(leaves)}")
        return self

    def frontier(self) -> list[int]:
        return self.leaves()

    def internal_nodes(self) -> list["GSTree"]:
        out = [self]
        for c in self.children:
            if isinstance(c, GSTree):
                out.extend(c.internal_nodes())
        return out

    @classmethod
    def flat(cls, m: int) -> "GSTree":
        if m < 2:
            raise StructureError("a flat tree needs at least two leaves")
        return cls(tuple(range(m)))

    @classmethod
    def caterpillar(cls, m: int) -> "GSTree":
        if m < 2:
            raise StructureError("a caterpillar tree needs at least two leaves")
        node = cls((m - 2, m - 1))
        for j in range(m - 3, -1, -1):
            node = cls((j, node))
        return node

    @classmethod
    def balanced(cls, m: int) -> "GSTree":
        if m < 2 or m & (m - 1):
            raise StructureError(f"balanced trees need m to be a power of two, got {m}")

        def build(lo, hi):
            if hi - lo == 1:
                return lo
            mid = (lo + hi) // 2
            return cls((build(lo, mid), build(mid, hi)))

        return build(0, m)


def _leaf(x) -> int:
    if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
        raise StructureError(f"leaf labels must be integers, got {x!r}")
    if x < 0:
        raise StructureError(f"leaf labels must be nonnegative, got {x}")
    return int(x)


def is_consistent_with_tree(v: Sequence[int], tree: GSTree) -> bool:
    """Can ``v`` be produced as the frontier of ``tree`` after reversing some internal nodes?"""
    tree.validate()
    order = as_ranking(v)
    if order.size != tree.m:
        raise DimensionError(f"vote has {order.size} candidates, tree has {tree.m}")

    def fits(node: Node, block: np.ndarray) -> bool:
        if not isinstance(node, GSTree):
            return True
        sets = [set(c.leaves()) if isinstance(c, GSTree) else {c} for c in node.children]
        for kids, groups in ((node.children, sets), (node.children[::-1], sets[::-1])):
            start = 0
            ok = True
            for kid, group in zip(kids, groups):
                part = block[start : start + len(group)]
                if set(part.tolist()) != group or not fits(kid, part):
                    ok = False
                    break
                start += len(group)
            if ok:
                return True
        return False

    return fits(tree, order)


def caterpillar_to_single_peaked(v: Sequence[int]) -> np.ndarray:
    """Map a caterpillar-consistent vote to the single-peaked vote paired with it.

    If candidate ``j`` sits at position ``i`` in ``v``, candidate ``i`` sits at
    position ``m - 1 - j`` in the result (0-based).
    """
    return positions(v)[::-1].copy()
