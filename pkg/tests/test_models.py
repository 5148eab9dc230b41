from fractions import Fraction
from math import factorial

import numpy as np
import pytest

from freqmap.compass import compass_matrix
from freqmap.core import GSTree, is_bistochastic
from freqmap.errors import DomainError, ResourceError, StructureError
from freqmap.models import (
    ModelSpec,
    caterpillar_matrix,
    conitzer_closed_form,
    conitzer_matrix,
    expected_swap_distance,
    gs_tree_matrix,
    mahonian,
    mallows_filter_matrix,
    mallows_matrices,
    mallows_matrix,
    mallows_position_counts,
    model_matrix,
    norm_phi_to_phi,
    phi_to_norm_phi,
    position_count_table,
    reversal_mixture_matrix,
    walsh_matrix,
)
from freqmap.models.mallows import _expected_swap_product

import oracles


# --- Mahonian numbers and position counts ----------------------------------


def test_mahonian_small():
    assert mahonian(1).S(1, 0) == 1
    assert [mahonian(3).S(3, k) for k in range(4)] == [1, 2, 2, 1]
    assert mahonian(3).S(3, 7) == 0


@pytest.mark.parametrize("m", range(1, 9))
def test_mahonian_by_enumeration(m):
    table = mahonian(m)
    counts = np.zeros(m * (m - 1) // 2 + 1, dtype=int)
    for v in oracles.perms(m):
        counts[oracles.inversions(v, tuple(range(m)))] += 1
    assert [table.S(m, k) for k in range(counts.size)] == counts.tolist()
    assert sum(table.row(m)) == factorial(m)


@pytest.mark.parametrize("m", range(1, 9))
def test_position_counts_marginalize(m):
    t = position_count_table(m)
    s = mahonian(m)
    for j in range(m):
        assert [int(x) for x in t[j].sum(axis=0)] == [s.S(m, k) for k in range(t.shape[2])]


def test_position_counts_by_enumeration():
    m = 5
    ident = tuple(range(m))
    t = position_count_table(m)
    brute = np.zeros_like(t)
    for v in oracles.perms(m):
        k = oracles.inversions(v, ident)
        for i, c in enumerate(v):
            brute[c, i, k] += 1
    assert np.array_equal(t, brute)
    # external 1-based accessor
    assert mallows_position_counts(m, 0, 1, 1) == 1
    assert mallows_position_counts(m, 99, 1, 1) == 0


def test_large_table_capped():
    with pytest.raises(ResourceError, match="50"):
        mallows_matrix(60, 0.5, method="table")
    # the float route still works past the cap
    a = mallows_matrix(60, 0.5, method="auto")
    assert is_bistochastic(a)


# --- Mallows matrices ---------------------------------------------------------


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("phi", [0.0, 0.3, 0.7, 1.0])
def test_mallows_matches_enumeration(m, phi):
    assert np.abs(mallows_matrix(m, phi) - oracles.mallows_enum(m, phi)).max() <= 1e-12


def test_mallows_exact_small():
    a = mallows_matrix(2, Fraction(1, 2), exact=True)
    assert a.tolist() == [[Fraction(2, 3), Fraction(1, 3)], [Fraction(1, 3), Fraction(2, 3)]]
    b = mallows_matrix(4, Fraction(2, 5), exact=True)
    assert (b == oracles.mallows_enum(4, Fraction(2, 5), exact=True)).all()


def test_mallows_endpoints_and_central():
    central = (2, 0, 3, 1)
    a = mallows_matrix(4, 0.0, central)
    assert np.array_equal(a, oracles.freq_of([(central, 1.0)], 4))
    assert np.allclose(mallows_matrix(7, 1.0), 1 / 7)
    central = (2, 0, 4, 3, 1)
    assert np.abs(mallows_matrix(5, 0.4, central) - oracles.mallows_enum(5, 0.4, central)).max() < 1e-12


@pytest.mark.parametrize("m", [8, 20, 45])
def test_chain_agrees_with_table(m):
    for phi in (0.1, 0.55, 0.93):
        t = mallows_matrix(m, phi, method="table")
        c = mallows_matrix(m, phi, method="chain")
        assert np.abs(t - c).max() < 1e-10


def test_batch_matches_single():
    phis = np.linspace(0, 1, 11)
    stack = mallows_matrices(9, phis)
    for k, phi in enumerate(phis):
        assert np.array_equal(stack[k], mallows_matrix(9, phi))


def test_mallows_phi_range():
    with pytest.raises(DomainError):
        mallows_matrix(4, 1.2)


# --- normalized dispersion ----------------------------------------------------


def test_norm_phi_endpoints_and_closed_form():
    assert norm_phi_to_phi(10, 0) == 0
    assert norm_phi_to_phi(10, 1) == 1
    assert abs(norm_phi_to_phi(2, 0.5) - 1 / 3) < 1e-9


def test_norm_phi_monotone_and_inverse():
    grid = np.round(np.arange(101) / 100, 2)
    phis = norm_phi_to_phi(10, grid)
    assert np.all(np.diff(phis) > 0)
    back = phi_to_norm_phi(10, phis)
    assert np.abs(back - grid).max() < 1e-9


def test_expected_distance_forms_agree():
    phis = np.linspace(0, 1, 23)
    for m in (2, 5, 30, 120):
        assert np.allclose(expected_swap_distance(m, phis), _expected_swap_product(m, phis), rtol=1e-11, atol=1e-9)
    m = 6
    for phi in (0.2, 0.8):
        w = [(oracles.inversions(v, tuple(range(m))), phi ** oracles.inversions(v, tuple(range(m)))) for v in oracles.perms(m)]
        brute = sum(k * x for k, x in w) / sum(x for _, x in w)
        assert abs(expected_swap_distance(m, phi) - brute) < 1e-12


def test_norm_phi_large_m():
    phi = norm_phi_to_phi(300, 0.5)
    assert abs(phi_to_norm_phi(300, phi) - 0.5) < 1e-9


# --- mixtures and filters -----------------------------------------------------


def test_reversal_mixture():
    assert np.array_equal(reversal_mixture_matrix(5, 0.4, 0.4, 1.0), mallows_matrix(5, 0.4))
    assert np.allclose(reversal_mixture_matrix(4, 0.0, 0.0, 0.5), compass_matrix("AN", 4))
    brute = oracles.mixture_enum(3, 0.5, 0.5, 0.5)
    assert np.abs(reversal_mixture_matrix(3, 0.5, 0.5, 0.5) - brute).max() < 1e-12
    brute = oracles.mixture_enum(4, Fraction(1, 3), Fraction(3, 4), Fraction(1, 5), exact=True)
    exact = reversal_mixture_matrix(4, Fraction(1, 3), Fraction(3, 4), Fraction(1, 5), exact=True)
    assert (brute == exact).all()


def test_filter():
    base = conitzer_matrix(6)
    assert np.allclose(mallows_filter_matrix(base, 0.0), base)
    assert np.allclose(mallows_filter_matrix(base, 1.0), 1 / 6)
    mid = mallows_filter_matrix(conitzer_matrix(4), norm_phi_to_phi(4, 0.5))
    assert is_bistochastic(mid)


# --- trees and single-peaked ----------------------------------------------------


@pytest.mark.parametrize("m", [2, 3, 5, 8])
def test_flat_tree_is_antagonism(m):
    a = gs_tree_matrix(GSTree.flat(m), exact=True)
    expected = np.full((m, m), Fraction(0), dtype=object)
    for i in range(m):
        expected[i, i] += Fraction(1, 2)
        expected[i, m - 1 - i] += Fraction(1, 2)
    assert (a == expected).all()


@pytest.mark.parametrize("m", [2, 4, 8, 16])
def test_balanced_tree_is_uniform(m):
    a = gs_tree_matrix(GSTree.balanced(m), exact=True)
    assert (a == Fraction(1, m)).all()


@pytest.mark.parametrize("m", range(2, 11))
def test_caterpillar_three_ways(m):
    closed = caterpillar_matrix(m, exact=True)
    dp = gs_tree_matrix(GSTree.caterpillar(m), exact=True)
    brute = oracles.uniform_matrix_over(oracles.tree_votes(oracles.caterpillar_nested(m)), m)
    assert (closed == dp).all() and (closed == brute).all()
    assert np.abs(caterpillar_matrix(m) - brute.astype(float)).max() < 1e-12


def test_caterpillar_small():
    assert caterpillar_matrix(3, exact=True)[:, 0].tolist() == [Fraction(1, 2), 0, Fraction(1, 2)]
    assert np.allclose(caterpillar_matrix(2), 0.5)


def test_gs_tree_arbitrary_shape():
    nested = [[0, [1, 2, 3]], [4, 5], 6]
    a = gs_tree_matrix(GSTree.from_nested(nested), exact=True)
    assert (a == oracles.uniform_matrix_over(oracles.tree_votes(nested), 7)).all()


@pytest.mark.parametrize("m", range(1, 9))
def test_walsh_enumeration(m):
    assert (walsh_matrix(m, exact=True) == oracles.walsh_enum(m)).all()
    assert np.abs(walsh_matrix(m) - oracles.walsh_enum(m).astype(float)).max() < 1e-12


@pytest.mark.parametrize("m", range(2, 13))
def test_walsh_caterpillar_transpose(m):
    w = walsh_matrix(m, exact=True)
    c = caterpillar_matrix(m, exact=True)
    assert (w == c[:, ::-1].T).all()


@pytest.mark.parametrize("m", range(1, 9))
def test_conitzer_enumeration(m):
    assert (conitzer_matrix(m, exact=True) == oracles.conitzer_enum(m)).all()
    assert np.abs(conitzer_matrix(m) - oracles.conitzer_enum(m).astype(float)).max() < 1e-12


@pytest.mark.parametrize("m", [2, 4, 6, 8, 10])
def test_conitzer_closed_form_and_symmetry(m):
    a = conitzer_matrix(m, exact=True)
    assert (a == conitzer_closed_form(m)).all()
    assert (a == a[:, ::-1]).all()


def test_conitzer_column():
    assert conitzer_matrix(4, exact=True)[:, 0].tolist() == [Fraction(1, 4), Fraction(1, 8), Fraction(1, 8), Fraction(1, 2)]
    assert np.allclose(conitzer_matrix(2), 0.5)
    with pytest.raises(DomainError):
        conitzer_closed_form(5)


# --- ModelSpec dispatch ---------------------------------------------------------


def test_model_spec_dispatch():
    assert np.array_equal(model_matrix(ModelSpec("ic", 4)), compass_matrix("UN", 4))
    assert np.allclose(model_matrix(ModelSpec("gs-tree", 16, tree=GSTree.balanced(16))), 1 / 16)
    phi = norm_phi_to_phi(8, 0.3)
    assert np.array_equal(model_matrix(ModelSpec("mallows", 8, norm_phi=0.3)), mallows_matrix(8, phi))
    spec = ModelSpec("mallows-mixture", 6, phi=0.3, p=0.25, psi=0.6)
    assert np.allclose(model_matrix(spec), reversal_mixture_matrix(6, 0.3, 0.6, 0.25))
    spec = ModelSpec("mallows-filtered", 6, phi=0.5, base=ModelSpec("walsh", 6))
    assert np.allclose(model_matrix(spec), mallows_matrix(6, 0.5) @ walsh_matrix(6))


def test_model_spec_exact():
    spec = ModelSpec("mallows", 4, phi=Fraction(1, 3))
    assert (model_matrix(spec, exact=True) == oracles.mallows_enum(4, Fraction(1, 3), exact=True)).all()
    with pytest.raises(DomainError):
        model_matrix(ModelSpec("mallows", 4, norm_phi=0.4), exact=True)


def test_model_spec_validation():
    with pytest.raises(DomainError):
        ModelSpec("mallows", 4)
    with pytest.raises(DomainError):
        ModelSpec("mallows", 4, phi=0.2, norm_phi=0.2)
    with pytest.raises(DomainError):
        ModelSpec("conitzer", 4, phi=0.2)
    with pytest.raises(DomainError):
        ModelSpec("mallows-mixture", 4, phi=0.2)
    with pytest.raises(DomainError):
        ModelSpec("nope", 4)
    with pytest.raises(StructureError):
        ModelSpec("gs-tree", 5, tree=GSTree.flat(4))


@pytest.mark.parametrize(
    "spec",
    [
        ModelSpec("ic", 6),
        ModelSpec("mallows", 6, norm_phi=0.4),
        ModelSpec("mallows-mixture", 6, norm_phi=0.4, p=0.3),
        ModelSpec("conitzer", 7),
        ModelSpec("walsh", 7),
        ModelSpec("gs-tree", 6, tree=GSTree.caterpillar(6)),
        ModelSpec("mallows-filtered", 6, norm_phi=0.5, base=ModelSpec("conitzer", 6)),
    ],
    ids=lambda s: s.family,
)
def test_every_family_bistochastic(spec):
    assert is_bistochastic(model_matrix(spec), tol=1e-9)
