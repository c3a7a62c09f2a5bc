import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_symmetric
from pconvex.errors import DimensionError, InvalidMatrix, InvalidP, RankError
from pconvex.linalg import (
    Frame,
    complement_basis,
    eigh,
    grassmannian_min,
    min_trace_p,
    orthonormalize,
    random_frame,
    trace_on_plane,
)

# frozen from grassmannian_min(Q7, 3, 10**5, seed=0, polish=200) and numpy.linalg.eigvalsh
Q7_MIN_TRACE_3 = -4.345415539366006

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def symmetric(draw, max_n=7):
    n = draw(st.integers(2, max_n))
    A = draw(arrays(float, (n, n), elements=finite))
    return 0.5 * (A + A.T)


def test_eigh_diagonal():
    s = eigh(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_allclose(s.eigenvalues, [1, 2, 3])


def test_eigh_identity():
    s = eigh(np.eye(4))
    np.testing.assert_allclose(s.eigenvalues, np.ones(4))
    np.testing.assert_allclose(s.eigenvectors.T @ s.eigenvectors, np.eye(4), atol=1e-14)


def test_eigh_reconstruction_seed42():
    Q = random_symmetric(6, 42)
    s = eigh(Q)
    res = np.linalg.norm(Q @ s.eigenvectors - s.eigenvectors * s.eigenvalues)
    assert res <= 1e-10 * np.linalg.norm(Q)


def test_eigh_rejects_nonfinite():
    with pytest.raises(InvalidMatrix):
        eigh([[1.0, np.nan], [np.nan, 1.0]])


@given(symmetric())
def test_eigh_matches_numpy(Q):
    s = eigh(Q)
    scale = 1.0 + np.linalg.norm(Q)
    np.testing.assert_allclose(s.eigenvalues, np.linalg.eigvalsh(Q), atol=1e-10 * scale)
    assert np.all(np.diff(s.eigenvalues) >= 0)
    np.testing.assert_allclose(s.eigenvectors.T @ s.eigenvectors, np.eye(len(Q)), atol=1e-12)


def test_trace_on_plane_examples():
    Q = np.diag([-1.0, 2.0, 3.0])
    assert trace_on_plane(Q, np.eye(3)[:, :2]) == pytest.approx(1.0)
    v = np.array([1.0, 1.0, 0.0]) / np.sqrt(2)
    assert trace_on_plane(Q, np.column_stack([v, [0, 0, 1.0]])) == pytest.approx(3.5)
    assert trace_on_plane(np.eye(5), random_frame(5, 2, 3)) == pytest.approx(2.0)


def test_trace_on_plane_dimension_mismatch():
    with pytest.raises(DimensionError):
        trace_on_plane(np.eye(4), np.eye(3)[:, :2])


@given(symmetric(), st.integers(0, 2**16))
def test_trace_invariant_under_rebasing(Q, seed):
    n = len(Q)
    p = max(1, n // 2)
    F = random_frame(n, p, seed).basis
    R, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((p, p)))
    assert trace_on_plane(Q, F @ R) == pytest.approx(trace_on_plane(Q, F), abs=1e-9 * (1 + np.abs(Q).sum()))


def test_min_trace_examples():
    assert min_trace_p(np.diag([-1.0, 2.0, 3.0]), 2) == pytest.approx(1.0)
    assert min_trace_p(np.zeros((4, 4)), 3) == 0.0


def test_min_trace_invalid_p():
    with pytest.raises(InvalidP):
        min_trace_p(np.eye(3), 0)
    with pytest.raises(InvalidP):
        min_trace_p(np.eye(3), 4)


@given(symmetric(), st.integers(0, 2**16))
def test_min_trace_lower_bounds_every_plane(Q, seed):
    n = len(Q)
    for p in range(1, n):
        m = min_trace_p(Q, p)
        assert trace_on_plane(Q, random_frame(n, p, seed)) >= m - 1e-9 * (1 + np.abs(Q).sum())
        assert trace_on_plane(Q, eigh(Q).frame(p)) == pytest.approx(m, abs=1e-10 * (1 + np.abs(Q).sum()))


def test_min_trace_grassmannian_oracle_seed7():
    Q = random_symmetric(5, 7)
    m = min_trace_p(Q, 3)
    assert m == pytest.approx(Q7_MIN_TRACE_3, abs=1e-12)
    raw, _ = grassmannian_min(Q, 3, 10**5, seed=0)
    assert raw >= m - 1e-10
    # plain sampling in a 6-dimensional Grassmannian stays ~0.1 above the optimum; polish closes the gap
    polished, F = grassmannian_min(Q, 3, 10**5, seed=0, polish=200)
    assert m - 1e-10 <= polished <= m + 5e-3
    assert trace_on_plane(Q, F) == pytest.approx(polished)


def test_random_frame_contract():
    F = random_frame(3, 2, 11)
    np.testing.assert_allclose(F.basis.T @ F.basis, np.eye(2), atol=1e-12)
    v = random_frame(2, 1, 5).basis[:, 0]
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_random_frame_uniform():
    rng = np.random.default_rng(0)
    acc = np.zeros((3, 3))
    for _ in range(10_000):
        v = random_frame(3, 1, rng).basis[:, 0]
        acc += np.outer(v, v)
    assert np.max(np.abs(acc / 10_000 - np.eye(3) / 3)) < 0.05


def test_random_frame_deterministic():
    np.testing.assert_array_equal(random_frame(6, 3, 9).basis, random_frame(6, 3, 9).basis)


def test_orthonormalize_examples():
    F = orthonormalize([[1.0, 0, 0], [1.0, 1.0, 0]])
    np.testing.assert_allclose(F.basis, np.eye(3)[:, :2], atol=1e-15)
    B = random_frame(5, 3, 2).basis
    np.testing.assert_allclose(orthonormalize(B.T).basis, B, atol=1e-14)
    a, b = np.array([1.0, 1, 0]), np.array([0.0, 1, 1])
    A = np.column_stack([a, b])
    P = A @ np.linalg.inv(A.T @ A) @ A.T
    np.testing.assert_allclose(orthonormalize([a, b]).projector(), P, atol=1e-12)


def test_orthonormalize_rank_deficient():
    with pytest.raises(RankError):
        orthonormalize([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])


def test_frame_rejects_non_orthonormal():
    with pytest.raises(RankError):
        Frame(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))


@given(arrays(float, 4, elements=finite).filter(lambda v: np.linalg.norm(v) > 1e-3))
def test_complement_basis(v):
    T = complement_basis(v)
    assert T.shape == (4, 3)
    np.testing.assert_allclose(T.T @ T, np.eye(3), atol=1e-13)
    np.testing.assert_allclose(T.T @ (v / np.linalg.norm(v)), 0.0, atol=1e-13)
