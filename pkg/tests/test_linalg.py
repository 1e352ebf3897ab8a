import numpy as np
import pytest

from eulerist.linalg import jacobi_eigh


@pytest.mark.parametrize("n", [1, 2, 3, 7, 16, 33])
def test_jacobi_matches_definition(rng, n):
    B = rng.normal(size=(n, n))
    A = (B + B.T) / 2
    w, V = jacobi_eigh(A)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(A @ V - V * w)) < 1e-8
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-10)
    assert np.allclose(w, np.linalg.eigvalsh(A), atol=1e-9)


def test_jacobi_diagonal_and_repeated():
    w, V = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert w.tolist() == [1.0, 2.0, 3.0]
    w, _ = jacobi_eigh(np.ones((4, 4)))
    assert np.allclose(w, [0, 0, 0, 4], atol=1e-12)


def test_jacobi_rejects_non_symmetric():
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))
