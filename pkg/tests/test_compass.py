from fractions import Fraction

import numpy as np
import pytest

from freqmap.compass import PATH_ALPHAS, CompassKind, affine_combination, compass_matrix, compass_paths
from freqmap.core import is_bistochastic
from freqmap.errors import DomainError, UnsupportedDimensionError
from freqmap.metric import npos


def test_small_compass_matrices():
    assert np.array_equal(compass_matrix("ID", 4), np.eye(4))
    assert np.all(compass_matrix("UN", 4) == 0.25)
    an = compass_matrix("AN", 4)
    expected = (np.eye(4) + np.eye(4)[::-1]) / 2
    assert np.array_equal(an, expected)
    st = compass_matrix("ST", 4)
    assert np.array_equal(st, np.kron(np.eye(2), np.full((2, 2), 0.5)))


@pytest.mark.parametrize("kind", ["ST", "AN"])
def test_odd_m_rejected(kind):
    with pytest.raises(UnsupportedDimensionError):
        compass_matrix(kind, 5)


@pytest.mark.parametrize("m", [2, 4, 6, 10])
def test_exact_compass_bistochastic(m):
    for kind in CompassKind:
        a = compass_matrix(kind, m, exact=True)
        assert isinstance(a[0, 0], Fraction)
        assert is_bistochastic(a, tol=0)


def test_affine_combination():
    x, y = compass_matrix("ID", 4), compass_matrix("UN", 4)
    assert np.array_equal(affine_combination(x, y, 1), x)
    assert np.allclose(affine_combination(x, y, 0.5), 0.5 * np.eye(4) + 0.125)
    with pytest.raises(DomainError):
        affine_combination(x, y, 1.5)


def test_paths_labels_and_count():
    paths = compass_paths(6)
    assert len(paths) == 6 * 19
    assert paths[0][0] == "ID-UN:0.05"
    assert len({label for label, _ in paths}) == len(paths)
    assert len(PATH_ALPHAS) == 19


@pytest.mark.parametrize("m", [4, 8])
def test_path_linearity(m):
    kinds = list(CompassKind)
    for i, a in enumerate(kinds):
        for b in kinds[i + 1 :]:
            x, y = compass_matrix(a, m), compass_matrix(b, m)
            d = npos(x, y)
            for alpha in np.arange(1, 10) / 10:
                mid = affine_combination(x, y, alpha)
                assert abs(npos(x, mid) - (1 - alpha) * d) < 1e-9
                assert abs(npos(mid, y) - alpha * d) < 1e-9
