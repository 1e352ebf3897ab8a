"""Symmetric eigendecomposition by cyclic Jacobi rotations."""
from __future__ import annotations

import numpy as np

__all__ = ["jacobi_eigh"]


def _round_robin(n: int):
    """Yield ``n - 1`` rounds of ``n / 2`` disjoint index pairs covering every
    pair exactly once (``n`` even)."""
    players = list(range(n))
    for _ in range(n - 1):
        half = n // 2
        p = np.array(players[:half])
        q = np.array(players[half:][::-1])
        yield np.minimum(p, q), np.maximum(p, q)
        players = [players[0]] + [players[-1]] + players[1:-1]


def jacobi_eigh(A, tol: float = 1e-10, max_sweeps: int = 100):
    """Eigenvalues (ascending) and orthonormal eigenvectors of symmetric ``A``.

    Rotations on disjoint index pairs commute, so each round of the
    round-robin ordering is applied to all its pairs at once. Stops when the
    off-diagonal Frobenius norm drops below ``tol * max(1, |A|_F)``.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max(initial=0))):
        raise ValueError("matrix is not symmetric")
    n = A.shape[0]
    if n == 0:
        return np.empty(0), np.empty((0, 0))
    A = 0.5 * (A + A.T)
    size = n + (n % 2)
    if size != n:
        # a decoupled padding row keeps every round a perfect matching
        A = np.pad(A, ((0, 1), (0, 1)))
    V = np.eye(size)
    threshold = tol * max(1.0, float(np.linalg.norm(A)))

    def off_norm():
        off = A - np.diag(np.diag(A))
        return float(np.linalg.norm(off))

    for _ in range(max_sweeps):
        if off_norm() < threshold:
            break
        for p, q in _round_robin(size):
            apq = A[p, q]
            active = apq != 0
            if not np.any(active):
                continue
            theta = np.zeros_like(apq)
            with np.errstate(over="ignore"):
                theta[active] = (A[q, q][active] - A[p, p][active]) / (2 * apq[active])
            t = np.where(active, np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0)), 0.0)
            t[active & (theta == 0)] = 1.0
            c = 1 / np.sqrt(t * t + 1)
            s = t * c
            cp, cq = A[:, p].copy(), A[:, q].copy()
            A[:, p] = c * cp - s * cq
            A[:, q] = s * cp + c * cq
            rp, rq = A[p, :].copy(), A[q, :].copy()
            A[p, :] = c[:, None] * rp - s[:, None] * rq
            A[q, :] = s[:, None] * rp + c[:, None] * rq
            vp, vq = V[:, p].copy(), V[:, q].copy()
            V[:, p] = c * vp - s * vq
            V[:, q] = s * vp + c * vq
    else:
        if off_norm() >= threshold:
            raise np.linalg.LinAlgError("Jacobi iteration did not converge")
    w = np.diag(A)[:n].copy()
    V = V[:n, :n]
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]
