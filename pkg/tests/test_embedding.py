import numpy as np
import pytest

from freqmap.compass import compass_matrix
from freqmap.errors import DomainError, UnsupportedDimensionError
from freqmap.embedding import (
    MapCatalog,
    build_catalog,
    canonicalize,
    classical_mds,
    embed,
    misrepresentation,
    misrepresentation_table,
    robustness_catalog,
)
from freqmap.metric import npos


@pytest.fixture(scope="module")
def catalog10():
    return build_catalog(10)


@pytest.fixture(scope="module")
def layout10(catalog10):
    return embed(catalog10, seed=0)


def test_catalog_contents(catalog10):
    assert len(catalog10) == 4 + 6 * 19 + 5 * 21 + 3
    for label in ("ID", "UN", "ST", "AN", "CON", "WAL", "CAT"):
        assert label in catalog10.labels
    assert npos(catalog10.matrix("mallows:1.00"), catalog10.matrix("UN")) < 1e-12
    assert npos(catalog10.matrix("mallows:0.00"), catalog10.matrix("ID")) < 1e-12


def test_catalog_requires_even_m():
    with pytest.raises(UnsupportedDimensionError):
        build_catalog(7)


def test_catalog_rejects_duplicate_labels():
    with pytest.raises(DomainError):
        MapCatalog(2, ("a", "a"), np.stack([np.eye(2), np.eye(2)]))


def test_robustness_catalog_size():
    assert len(robustness_catalog(6)) == 5 + 4 * 4


def test_triangle_embeds_exactly():
    delta = np.array([[0, 3, 4], [3, 0, 5], [4, 5, 0]], dtype=float)
    layout = embed((("a", "b", "c"), delta))
    assert layout.stress <= 1e-9


def test_collinear_midpoint():
    m = 6
    pts = [("ID", compass_matrix("ID", m)), ("UN", compass_matrix("UN", m)),
           ("mid", 0.5 * compass_matrix("ID", m) + 0.5 * compass_matrix("UN", m))]
    layout = embed(MapCatalog.from_points(m, pts))
    assert abs(layout.euclidean("ID", "mid") - 0.5 * layout.euclidean("ID", "UN")) <= 1e-6


def test_needs_three_points():
    with pytest.raises(DomainError):
        embed((("a", "b"), np.array([[0, 1], [1, 0]], dtype=float)))


def test_stress_non_increasing(layout10):
    h = np.array(layout10.history)
    assert np.all(np.diff(h) <= 1e-12 * h[:-1])
    assert layout10.stress >= 0 and layout10.coords.shape == (226, 2)


def test_zero_distances_collapse(layout10):
    assert np.linalg.norm(layout10.point("mallows:1.00") - layout10.point("UN")) <= 1e-6
    assert np.linalg.norm(layout10.point("mallows:0.00") - layout10.point("ID")) <= 1e-6


def test_canonical_orientation(layout10):
    assert np.allclose(layout10.coords.mean(axis=0), 0, atol=1e-12)
    x, y = layout10.point("ID")
    assert x <= 0 and y <= 0
    cov = layout10.coords.T @ layout10.coords
    assert abs(cov[0, 1]) < 1e-9 and cov[0, 0] >= cov[1, 1]


def test_seed_independence(catalog10, layout10):
    other = embed(catalog10, seed=123, distances=layout10.distances)
    assert np.sqrt(((other.coords - layout10.coords) ** 2).sum(axis=1).mean()) <= 1e-3


def test_canonicalize_undoes_rigid_motion():
    rng = np.random.default_rng(0)
    x = canonicalize(rng.standard_normal((20, 2)))
    theta = 0.7
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    moved = x @ rot.T * np.array([1, -1]) + 5
    assert np.allclose(canonicalize(moved), x)


def test_classical_mds_degenerate():
    assert classical_mds(np.zeros((4, 4))) is None


def test_misrepresentation(layout10):
    assert misrepresentation(layout10, "ID", "UN") == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        misrepresentation(layout10, "UN", "mallows:1.00")
    r = misrepresentation(layout10, "ID", "ID-UN:0.50")
    assert 0.8 <= r <= 1.2
    ratios = np.array([t[2] for t in misrepresentation_table(layout10)])
    assert np.mean((ratios >= 0.8) & (ratios <= 1.15)) >= 0.8
