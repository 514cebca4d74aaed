"""Indefinite linear algebra: form, wedges, subspaces, group projection."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import expm

from liesurf import (
    DIM,
    METRIC,
    SIGNS,
    Bivector,
    basis_vector,
    inner,
    norm2,
    span_subspace,
    subspace_signature,
    wedge_apply,
)
from liesurf.core import (
    bivector_matrix,
    metric_inverse,
    ortho_complement,
    ortho_defect,
    project_to_orthogonal,
)

vec6 = arrays(
    np.float64,
    (6,),
    elements=st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False),
)


def test_metric_constants():
    assert DIM == 6
    assert np.array_equal(SIGNS, [1.0, 1.0, 1.0, 1.0, -1.0, -1.0])
    assert np.array_equal(METRIC, np.diag(SIGNS))


def test_basis_vector_is_one_based():
    assert np.array_equal(basis_vector(1), [1, 0, 0, 0, 0, 0])
    assert np.array_equal(basis_vector(6), [0, 0, 0, 0, 0, 1])
    for i in range(1, 7):
        assert norm2(basis_vector(i)) == SIGNS[i - 1]


def test_inner_signature_on_basis():
    for i in range(1, 7):
        for j in range(1, 7):
            expected = SIGNS[i - 1] if i == j else 0.0
            assert inner(basis_vector(i), basis_vector(j)) == expected


@given(vec6, vec6)
@settings(max_examples=50, deadline=None)
def test_inner_is_symmetric_and_bilinear(a, b):
    assert inner(a, b) == inner(b, a)
    assert np.isclose(inner(2.0 * a, b), 2.0 * inner(a, b), rtol=1e-12, atol=1e-12)


def test_inner_broadcasts_over_leading_axes():
    batch = np.random.default_rng(0).normal(size=(4, 5, 6))
    single = basis_vector(2)
    out = inner(batch, single)
    assert out.shape == (4, 5)
    assert np.allclose(out, batch[..., 1])


@given(vec6, vec6, vec6)
@settings(max_examples=50, deadline=None)
def test_wedge_apply_definition_and_antisymmetry(a, b, c):
    out = wedge_apply(a, b, c)
    expected = inner(a, c) * b - inner(b, c) * a
    assert np.allclose(out, expected, rtol=1e-12, atol=1e-9)
    assert np.array_equal(wedge_apply(b, a, c), -out)


@given(vec6, vec6, vec6, vec6)
@settings(max_examples=50, deadline=None)
def test_wedge_is_skew_adjoint_for_the_form(a, b, c, d):
    lhs = inner(wedge_apply(a, b, c), d)
    rhs = -inner(c, wedge_apply(a, b, d))
    scale = max(1.0, abs(lhs), abs(rhs))
    assert abs(lhs - rhs) <= 1e-9 * scale


@given(vec6, vec6, vec6)
@settings(max_examples=50, deadline=None)
def test_bivector_matrix_matches_action(a, b, c):
    w = bivector_matrix(a, b)
    assert np.allclose(w @ c, wedge_apply(a, b, c), rtol=1e-12, atol=1e-9)
    # metric-skewness G W + W^T G = 0 holds exactly (sign flips are exact)
    assert np.array_equal(METRIC @ w, -(METRIC @ w).T)


def test_bivector_class_caches_matrix():
    bv = Bivector(a=basis_vector(2), b=basis_vector(3))
    c = np.arange(6.0)
    assert np.allclose(bv(c), bv.matrix @ c)


def test_subspace_signature_known_cases():
    assert subspace_signature([basis_vector(1)]) == (1, 0, 0)
    assert subspace_signature([basis_vector(5)]) == (0, 1, 0)
    assert subspace_signature([basis_vector(4) + basis_vector(5)]) == (0, 0, 1)
    assert subspace_signature(np.eye(6)) == (4, 2, 0)
    assert subspace_signature([basis_vector(1), basis_vector(6)]) == (1, 1, 0)


def test_span_subspace_reduces_rank_and_contains():
    e1, e2 = basis_vector(1), basis_vector(2)
    sp = span_subspace([e1, e2, e1 + e2, 3.0 * e2])
    assert sp.dim == 2
    assert sp.signature == (2, 0, 0)
    assert sp.contains(0.5 * e1 - 2.0 * e2)
    assert not sp.contains(basis_vector(3))


def test_span_subspace_rejects_zero_input():
    with pytest.raises(ValueError):
        span_subspace(np.zeros((3, 6)))


def test_ortho_complement_dimensions_and_duality():
    sp = span_subspace([basis_vector(1), basis_vector(5)])
    comp = ortho_complement(sp)
    assert comp.dim == 4
    assert comp.signature == (3, 1, 0)
    again = ortho_complement(comp)
    assert again.dim == 2
    assert again.contains(basis_vector(1))
    assert again.contains(basis_vector(5))
    # complement of a null line contains the line itself
    null = span_subspace([basis_vector(4) + basis_vector(5)])
    assert ortho_complement(null).contains(null.basis[0])


@given(vec6, vec6)
@settings(max_examples=25, deadline=None)
def test_bivector_exponentials_are_orthogonal(a, b):
    # bounded generator so expm stays well conditioned
    w = bivector_matrix(a / 10.0, b / 10.0)
    m = expm(w)
    scale = max(1.0, float(np.abs(m).max()) ** 2)
    assert ortho_defect(m) <= 1e-10 * scale
    assert np.allclose(metric_inverse(m) @ m, np.eye(6), atol=1e-10 * scale)


def test_project_to_orthogonal_cleans_perturbation():
    rng = np.random.default_rng(7)
    m = expm(bivector_matrix(rng.normal(size=6), rng.normal(size=6) * 0.2))
    noisy = m + 1e-8 * rng.normal(size=(6, 6))
    cleaned = project_to_orthogonal(noisy)
    scale = max(1.0, float(np.abs(cleaned).max()) ** 2)
    assert ortho_defect(cleaned) <= 1e-12 * scale
    assert np.abs(cleaned - m).max() <= 1e-6 * np.abs(m).max()


def test_project_to_orthogonal_rejects_garbage():
    with pytest.raises(ValueError):
        project_to_orthogonal(np.zeros((6, 6)))
