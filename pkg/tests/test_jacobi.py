import numpy as np
import pytest

from qtmpair.jacobi import DiagonalizationError, jacobi_eigh


def test_matches_dense_solver_on_random_symmetric():
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = rng.normal(size=(4, 4)) * rng.uniform(0.1, 50.0)
        h = (m + m.T) / 2.0
        values, vectors = jacobi_eigh(h)
        ref = np.linalg.eigvalsh(h)
        np.testing.assert_allclose(values, ref, rtol=1e-12, atol=1e-12 * np.abs(h).max())
        # orthonormal columns, residual below the sweep threshold scale
        np.testing.assert_allclose(vectors.T @ vectors, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(h @ vectors, vectors * values, atol=1e-12 * np.abs(h).max())


def test_trace_is_conserved():
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = rng.normal(size=(4, 4))
        h = m + m.T
        values, _ = jacobi_eigh(h)
        assert abs(values.sum() - np.trace(h)) <= 1e-10 * max(1.0, abs(np.trace(h)))


def test_diagonal_input_returns_identity_columns():
    values, vectors = jacobi_eigh(np.diag([0.0, 0.0, 10.0, 10.0]))
    np.testing.assert_array_equal(values, [0.0, 0.0, 10.0, 10.0])
    np.testing.assert_array_equal(np.abs(vectors), np.eye(4))


def test_zero_matrix():
    values, vectors = jacobi_eigh(np.zeros((4, 4)))
    np.testing.assert_array_equal(values, np.zeros(4))
    np.testing.assert_array_equal(vectors, np.eye(4))


def test_values_sorted_ascending():
    values, _ = jacobi_eigh(np.diag([3.0, -1.0, 2.0, 0.0]))
    np.testing.assert_array_equal(values, [-1.0, 0.0, 2.0, 3.0])


def test_nan_input_raises_with_residual():
    h = np.full((4, 4), np.nan)
    with pytest.raises(DiagonalizationError) as err:
        jacobi_eigh(h)
    assert hasattr(err.value, "off_diagonal_norm")
