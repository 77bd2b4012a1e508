import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import block_diag

from gaussppt.phase_space import (
    SystemShape,
    is_local_symplectic,
    partial_transpose_form,
    standard_symplectic,
)
from gaussppt.sampling import random_local_symplectic

from oracles import J

shapes = st.tuples(st.integers(1, 5), st.integers(1, 5)).filter(lambda s: sum(s) <= 6)


@pytest.mark.parametrize("f_a, f_b", [(0, 1), (1, 0), (-1, 2)])
def test_shape_rejects_empty_parties(f_a, f_b):
    with pytest.raises(ValueError):
        SystemShape(f_a, f_b)


def test_shape_layout():
    s = SystemShape(2, 3)
    assert s.dim == 10 and s.dim_a == 4
    assert s.alice == slice(0, 4) and s.bob == slice(4, 10)


def test_standard_form_one_by_one():
    sigma = standard_symplectic(SystemShape(1, 1)).sigma
    expected = np.zeros((4, 4))
    expected[0:2, 0:2] = J
    expected[2:4, 2:4] = J
    np.testing.assert_array_equal(sigma, expected)


def test_standard_form_two_by_two():
    np.testing.assert_array_equal(standard_symplectic(SystemShape(2, 2)).sigma, block_diag(J, J, J, J))


def test_twin_one_by_one():
    twin = partial_transpose_form(standard_symplectic(SystemShape(1, 1)))
    np.testing.assert_array_equal(twin, block_diag(-J, J))


@given(shapes)
def test_standard_form_properties(fs):
    shape = SystemShape(*fs)
    form = standard_symplectic(shape)
    sigma = form.sigma
    n = shape.dim
    np.testing.assert_array_equal(sigma.T, -sigma)
    np.testing.assert_array_equal(sigma @ sigma, -np.eye(n))
    assert np.isclose(np.linalg.det(sigma), 1.0)
    twin = partial_transpose_form(form)
    np.testing.assert_array_equal(twin @ twin, -np.eye(n))
    diff = sigma - twin
    a = shape.alice
    assert not np.any(diff[shape.bob, :]) and not np.any(diff[:, shape.bob])
    np.testing.assert_array_equal(diff[a, a], 2 * sigma[a, a])
    # negating Alice twice gives back sigma
    twice = np.array(twin)
    twice[a, a] *= -1
    np.testing.assert_array_equal(twice, sigma)


def test_local_symplectic_examples():
    form = standard_symplectic(SystemShape(1, 1))
    assert is_local_symplectic(np.eye(4), form)
    squeeze = block_diag(np.diag([2.0, 0.5]), np.eye(2))
    assert is_local_symplectic(squeeze, form)
    swap = np.zeros((4, 4))
    swap[0:2, 2:4] = np.eye(2)
    swap[2:4, 0:2] = np.eye(2)
    assert np.allclose(swap.T @ form.sigma @ swap, form.sigma)
    assert not is_local_symplectic(swap, form)
    assert not is_local_symplectic(np.eye(3), form)


@given(shapes, st.integers(0, 2**32 - 1))
def test_local_symplectics_preserve_both_forms(fs, seed):
    shape = SystemShape(*fs)
    form = standard_symplectic(shape)
    S = random_local_symplectic(shape, np.random.default_rng(seed))
    assert is_local_symplectic(S, form)
    twin = partial_transpose_form(form)
    np.testing.assert_allclose(S.T @ twin @ S, twin, atol=1e-9)
