"""Cyclic Jacobi diagonalization of real symmetric matrices.

Small dense problems (here 4x4) converge in a handful of sweeps; the sweep
cap only guards against pathological input such as NaN entries.
"""

import math

import numpy as np

OFFDIAG_TOL = 1e-14   # relative to the max-norm of the input matrix
MAX_SWEEPS = 100


class DiagonalizationError(RuntimeError):
    """Jacobi iteration failed to reach the off-diagonal threshold.

    Carries the residual largest off-diagonal magnitude in
    ``off_diagonal_norm``.
    """

    def __init__(self, message, off_diagonal_norm):
        super().__init__(message)
        self.off_diagonal_norm = off_diagonal_norm


def _max_offdiag(a):
    n = a.shape[0]
    best = 0.0
    for i in range(n - 1):
        for j in range(i + 1, n):
            if abs(a[i, j]) > best:
                best = abs(a[i, j])
    return best


def jacobi_eigh(matrix):
    """Diagonalize a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    matrix : (n, n) array_like
        Real symmetric matrix; it is copied, not modified.

    Returns
    -------
    values : (n,) ndarray
        Eigenvalues sorted ascending.
    vectors : (n, n) ndarray
        Orthonormal eigenvectors as columns, aligned with ``values``.

    Raises
    ------
    DiagonalizationError
        If the largest off-diagonal magnitude is still above
        ``OFFDIAG_TOL * max|matrix|`` after ``MAX_SWEEPS`` sweeps.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    threshold = OFFDIAG_TOL * np.max(np.abs(a)) if a.size else 0.0

    sweeps = 0
    off = _max_offdiag(a)
    while off > threshold and sweeps < MAX_SWEEPS:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # rotation angle that annihilates a[p,q]
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0

                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        sweeps += 1
        off = _max_offdiag(a)
    if not off <= threshold:
        raise DiagonalizationError(
            f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps "
            f"(residual off-diagonal magnitude {off:.3e})",
            off_diagonal_norm=off,
        )

    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]
