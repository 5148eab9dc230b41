"""Skeleton map: reference distributions embedded in the plane."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .compass import CompassKind, compass_matrix, compass_paths
from .errors import DimensionError, DomainError, UnsupportedDimensionError
from .metric import pairwise_distances
from .models import (
    caterpillar_matrix,
    conitzer_matrix,
    mallows_filter_matrix,
    mallows_matrices,
    norm_phi_to_phi,
    walsh_matrix,
)

log = logging.getLogger(__name__)

PHI_GRID = tuple(round(k * 0.05, 2) for k in range(21))
ROBUST_PHIS = (0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class MapCatalog:
    m: int
    labels: tuple[str, ...]
    matrices: np.ndarray  # (k, m, m)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise DomainError("catalog labels must be unique")
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[0] != len(self.labels) or mats.shape[1:] != (self.m, self.m):
            raise DimensionError("every catalog matrix must be m x m, one per label")
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_points(cls, m: int, points) -> "MapCatalog":
        points = list(points)
        return cls(m, tuple(p[0] for p in points), np.stack([p[1] for p in points]))

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"label {label!r} is not in the catalog") from None

    def matrix(self, label: str) -> np.ndarray:
        return self.matrices[self.index(label)]


def _mallows_family(m: int, norm_phis) -> np.ndarray:
    return mallows_matrices(m, np.asarray(norm_phi_to_phi(m, np.asarray(norm_phis, dtype=float))))


def _dispersed_points(m: int, norm_phis, families) -> list:
    """Points of the Mallows-based families at each normalized dispersion."""
    fmt = "{:.2f}"
    ident = _mallows_family(m, norm_phis)
    flipped = ident[:, :, ::-1]
    con = conitzer_matrix(m)
    wal = walsh_matrix(m)
    out = []
    for fam in families:
        for k, x in enumerate(norm_phis):
            tag = f"{fam}:{fmt.format(x)}"
            if fam == "mallows":
                mat = ident[k]
            elif fam == "mallows-rev":
                mat = 0.5 * ident[k] + 0.5 * flipped[k]
            elif fam == "mallows-mix":
                mat = 0.75 * ident[k] + 0.25 * flipped[k]
            elif fam == "phi-conitzer":
                mat = ident[k] @ con
            elif fam == "phi-walsh":
                mat = ident[k] @ wal
            else:
                raise DomainError(f"unknown catalog family {fam!r}")
            out.append((tag, mat))
    return out


MAP_FAMILIES = ("mallows", "mallows-rev", "mallows-mix", "phi-conitzer", "phi-walsh")


def build_catalog(m: int, phis=PHI_GRID) -> MapCatalog:
    """Compass matrices, the paths between them, the Mallows-based families and CON/WAL/CAT."""
    if m % 2:
        raise UnsupportedDimensionError(f"the map needs even m (ST and AN), got m={m}")
    points = [(k.value, compass_matrix(k, m)) for k in CompassKind]
    points += compass_paths(m)
    points += _dispersed_points(m, phis, MAP_FAMILIES)
    points += [("CON", conitzer_matrix(m)), ("WAL", walsh_matrix(m)), ("CAT", caterpillar_matrix(m))]
    return MapCatalog.from_points(m, points)


def robustness_catalog(m: int, phis=ROBUST_PHIS) -> MapCatalog:
    """Compass, Conitzer, and four normalized Mallows-based families on a coarse grid."""
    if m % 2:
        raise UnsupportedDimensionError(f"the catalog needs even m, got m={m}")
    points = [(k.value, compass_matrix(k, m)) for k in CompassKind]
    points.append(("CON", conitzer_matrix(m)))
    points += _dispersed_points(m, phis, ("mallows", "mallows-rev", "mallows-mix", "phi-conitzer"))
    return MapCatalog.from_points(m, points)


# ---------------------------------------------------------------------------
# SMACOF


@dataclass(frozen=True)
class EmbeddingLayout:
    labels: tuple[str, ...]
    coords: np.ndarray  # (k, 2)
    stress: float  # normalized: sqrt(raw stress / sum of squared targets)
    distances: np.ndarray
    history: tuple[float, ...]  # raw stress after init and after each iteration

    def __post_init__(self):
        for a in (self.coords, self.distances):
            a.setflags(write=False)

    @property
    def iterations(self) -> int:
        return len(self.history) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"label {label!r} is not in the layout") from None

    def point(self, label: str) -> np.ndarray:
        return self.coords[self.index(label)]

    def euclidean(self, x: str, y: str) -> float:
        return float(np.linalg.norm(self.point(x) - self.point(y)))


def _euclid(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def _raw_stress(x: np.ndarray, delta: np.ndarray) -> float:
    iu = np.triu_indices(delta.shape[0], k=1)
    return float(((_euclid(x)[iu] - delta[iu]) ** 2).sum())


def classical_mds(delta: np.ndarray) -> np.ndarray | None:
    """Torgerson scaling into 2-D; None when the top eigenvalues vanish."""
    k = delta.shape[0]
    j = np.eye(k) - 1.0 / k
    b = -0.5 * j @ (delta**2) @ j
    vals, vecs = np.linalg.eigh(b)
    top = np.argsort(vals)[::-1][:2]
    lam = np.clip(vals[top], 0.0, None)
    if lam[0] <= 1e-12 * max(1.0, float(np.abs(vals).max())):
        return None
    return vecs[:, top] * np.sqrt(lam)


def _guttman(x: np.ndarray, delta: np.ndarray) -> np.ndarray:
    d = _euclid(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d > 0, delta / d, 0.0)
    b = -ratio
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(b, -b.sum(axis=1))
    return b @ x / x.shape[0]


def canonicalize(x: np.ndarray, anchor: int = 0) -> np.ndarray:
    """Center, rotate onto principal axes, then flip so the anchor has x <= 0 and y <= 0."""
    x = x - x.mean(axis=0)
    _, vecs = np.linalg.eigh(x.T @ x)
    x = x @ vecs[:, ::-1]
    for axis in range(2):
        if x[anchor, axis] > 0:
            x[:, axis] = -x[:, axis]
    return x


def smacof(delta: np.ndarray, seed: int = 0, max_iter: int = 300, eps: float = 1e-6,
           init: str = "classical") -> tuple[np.ndarray, tuple[float, ...]]:
    """Stress majorization; returns coordinates and the raw stress history."""
    delta = np.asarray(delta, dtype=float)
    k = delta.shape[0]
    x = classical_mds(delta) if init == "classical" else None
    if x is None:
        if init == "classical":
            log.info("classical scaling degenerate; using a seeded random start")
        x = np.random.default_rng(seed).standard_normal((k, 2))
    history = [_raw_stress(x, delta)]
    for _ in range(max_iter):
        prev = history[-1]
        if prev == 0:
            break
        x = _guttman(x, delta)
        cur = _raw_stress(x, delta)
        if cur > prev * (1 + 1e-12) + 1e-15:
            raise ArithmeticError(f"stress increased from {prev!r} to {cur!r}")
        history.append(cur)
        if (prev - cur) / prev < eps:
            break
    return x, tuple(history)


def embed(catalog: MapCatalog | tuple, seed: int = 0, max_iter: int = 300, eps: float = 1e-6,
          threads: int = 1, distances: np.ndarray | None = None) -> EmbeddingLayout:
    """2-D layout of the catalog whose Euclidean distances approximate the normalized distances.

    ``catalog`` may also be a ``(labels, distance matrix)`` pair.
    """
    if isinstance(catalog, MapCatalog):
        labels = catalog.labels
        delta = pairwise_distances(catalog.matrices, threads=threads) if distances is None else distances
    else:
        labels, delta = catalog
        labels = tuple(labels)
    delta = np.asarray(delta, dtype=float)
    if len(labels) < 3:
        raise DomainError(f"embedding needs at least 3 points, got {len(labels)}")
    if delta.shape != (len(labels), len(labels)):
        raise DimensionError("distance matrix does not match the labels")
    x, history = smacof(delta, seed=seed, max_iter=max_iter, eps=eps)
    anchor = labels.index("ID") if "ID" in labels else 0
    x = canonicalize(x, anchor)
    iu = np.triu_indices(len(labels), k=1)
    total = float((delta[iu] ** 2).sum())
    stress = float(np.sqrt(history[-1] / total)) if total > 0 else 0.0
    return EmbeddingLayout(tuple(labels), x, stress, delta.copy(), history)


def misrepresentation(layout: EmbeddingLayout, x: str, y: str) -> float:
    """(Euclidean distance / Euclidean ID-UN distance) / normalized positionwise distance."""
    d = layout.distances[layout.index(x), layout.index(y)]
    if d <= 0:
        raise DomainError(f"ratio undefined: {x} and {y} are at positionwise distance 0")
    scale = layout.euclidean("ID", "UN")
    if scale <= 0:
        raise DomainError("ID and UN coincide in the layout")
    return layout.euclidean(x, y) / scale / d


def misrepresentation_table(layout: EmbeddingLayout, min_distance: float = 1e-12) -> list[tuple[str, str, float]]:
    """Ratios for every pair at positive distance, in label order."""
    k = len(layout.labels)
    scale = layout.euclidean("ID", "UN")
    euc = _euclid(np.asarray(layout.coords))
    out = []
    for a in range(k):
        for b in range(a + 1, k):
            d = layout.distances[a, b]
            if d > min_distance:
                out.append((layout.labels[a], layout.labels[b], float(euc[a, b] / scale / d)))
    return out
