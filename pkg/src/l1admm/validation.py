"""Input checking helpers shared by the problem types, solvers and CLI."""

from __future__ import annotations

import numpy as np


def _check_entries(arr, name, allow_neg_inf):
    if np.isnan(arr).any():
        raise ValueError(f"{name} contains NaN entries")
    if np.isposinf(arr).any():
        raise ValueError(f"{name} contains +inf entries")
    if not allow_neg_inf and np.isneginf(arr).any():
        raise ValueError(f"{name} contains -inf entries")


def as_float_matrix(value, name, *, allow_neg_inf=False):
    """Coerce to a fresh 2-D float64 array, rejecting NaN and +inf.

    1-D input is treated as a single column. With ``allow_neg_inf`` the
    result may carry -inf entries (lower-bound sentinels); +inf and NaN
    are never accepted.
    """
    arr = np.array(value, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got {arr.ndim} dimensions")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty, got shape {arr.shape}")
    _check_entries(arr, name, allow_neg_inf)
    return arr


def check_same_rows(name_a, a, name_b, b):
    if a.shape[0] != b.shape[0]:
        raise ValueError(
            f"{name_a} and {name_b} must have the same number of rows: "
            f"shapes {a.shape} and {b.shape}"
        )


def check_shape(value, name, shape):
    if value.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {value.shape}")


def expand_columns(value, rows, cols, name, *, allow_neg_inf=False):
    """Broadcast a scalar, length-``rows`` vector, or matrix to (rows, cols).

    Vectors and single-column matrices are repeated across columns, which
    matches sharing one weight/bound vector over a batch of problems.
    """
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full((rows, cols), float(arr))
    elif arr.ndim == 1:
        if arr.shape[0] != rows:
            raise ValueError(
                f"{name} has length {arr.shape[0]}, expected {rows}"
            )
        arr = np.tile(arr.reshape(-1, 1), (1, cols))
    elif arr.ndim == 2:
        if arr.shape == (rows, 1) and cols != 1:
            arr = np.tile(arr, (1, cols))
        elif arr.shape == (rows, cols):
            arr = arr.astype(float, copy=True)
        else:
            raise ValueError(
                f"{name} must have shape {(rows, cols)} (or broadcastable "
                f"scalar/vector/column), got {arr.shape}"
            )
    else:
        raise ValueError(f"{name} must be at most 2-D, got {arr.ndim} dimensions")
    _check_entries(arr, name, allow_neg_inf)
    return arr
