"""Dense kernels shared by the solvers: elementwise soft-thresholding,
Cholesky factorization of symmetric positive-definite matrices, and a
column-deterministic matrix product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dpotrs


class NotPositiveDefiniteError(ValueError):
    """Raised when a Cholesky pivot falls at or below the rejection tolerance.

    Carries the offending pivot index so callers can tell which row of the
    matrix (e.g. which column of a rank-deficient design) is at fault.
    """

    def __init__(self, pivot_index, pivot_value):
        self.pivot_index = int(pivot_index)
        self.pivot_value = float(pivot_value)
        super().__init__(
            f"matrix is not positive definite: pivot {self.pivot_index} "
            f"is {self.pivot_value:.6e}"
        )


def soft_threshold(v, kappa):
    """Shrink ``v`` toward zero by ``kappa``, elementwise.

    Returns 0 where ``|v| <= kappa`` and ``sign(v) * (|v| - kappa)``
    elsewhere. ``kappa`` must be nonnegative and broadcast to the shape of
    ``v`` (a scalar or a full per-entry threshold matrix).
    """
    v = np.asarray(v, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    try:
        kappa = np.broadcast_to(kappa, v.shape)
    except ValueError:
        raise ValueError(
            f"threshold shape {kappa.shape} does not broadcast to value "
            f"shape {v.shape}"
        ) from None
    if np.any(kappa < 0):
        raise ValueError("soft_threshold requires nonnegative thresholds")
    return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)


@dataclass(frozen=True)
class SpdFactorization:
    """Lower-triangular Cholesky factor L with M = L @ L.T."""

    lower: np.ndarray

    @property
    def dimension(self):
        return self.lower.shape[0]


# Pivots at or below this fraction of the largest diagonal magnitude are
# treated as rank deficiency rather than roundoff.
_PIVOT_RTOL = 1e-12


def spd_factorize(m):
    """Cholesky-factorize a symmetric positive-definite matrix.

    Only the lower triangle is read. Raises :class:`NotPositiveDefiniteError`
    naming the first pivot that falls at or below the rejection tolerance.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    n = m.shape[0]
    tol = _PIVOT_RTOL * float(np.abs(np.diag(m)).max())
    lower = np.zeros((n, n))
    for j in range(n):
        pivot = m[j, j] - lower[j, :j] @ lower[j, :j]
        if pivot <= tol:
            raise NotPositiveDefiniteError(j, pivot)
        ljj = np.sqrt(pivot)
        lower[j, j] = ljj
        if j + 1 < n:
            lower[j + 1:, j] = (m[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j]) / ljj
    return SpdFactorization(lower)


def spd_solve(factorization, b):
    """Solve ``M @ X = B`` against a factorization from :func:`spd_factorize`.

    Columns are solved one at a time so batch solves stay bitwise identical
    to single-column solves.
    """
    lower = factorization.lower
    b = np.asarray(b, dtype=float)
    vector_in = b.ndim == 1
    if vector_in:
        b = b.reshape(-1, 1)
    if b.ndim != 2 or b.shape[0] != factorization.dimension:
        raise ValueError(
            f"right-hand side shape {b.shape} does not match factorization "
            f"dimension {factorization.dimension}"
        )
    out = np.empty_like(b)
    for i in range(b.shape[1]):
        x, info = dpotrs(lower, b[:, i], lower=1)
        if info != 0:
            raise RuntimeError(f"dpotrs failed with info={info}")
        out[:, i] = np.ravel(x)
    return out[:, 0] if vector_in else out


def colwise_matmul(a, b):
    """Matrix product computed one GEMV per column of ``b``.

    BLAS GEMM reassociates sums differently depending on the number of
    right-hand-side columns, which would make batch iterates drift from
    single-column runs at the last ulp. One GEMV per column keeps them
    bitwise equal.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty((a.shape[0], b.shape[1]))
    for i in range(b.shape[1]):
        out[:, i] = a @ b[:, i]
    return out
