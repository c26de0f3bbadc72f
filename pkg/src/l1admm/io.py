"""CSV matrix input/output for the command-line front end.

Files are comma-separated numeric rows without a header; lines starting
with ``#`` (and blank lines) are skipped. Values are written in shortest
round-trip form (at most 17 significant digits), so write-then-read is
entrywise exact.
"""

from __future__ import annotations

import math

import numpy as np


class MatrixFormatError(ValueError):
    """Raised for unparsable or inconsistently shaped matrix files."""


def read_matrix(path, allow_inf=False):
    """Parse a CSV matrix file into a 2-D float array.

    ``inf``/``-inf`` tokens are only accepted with ``allow_inf`` (meant for
    lower-bound matrices); NaN is never accepted. Errors carry the line
    number and, for bad tokens, the column position.
    """
    rows = []
    expected = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            values = []
            for colno, token in enumerate(line.split(","), start=1):
                token = token.strip()
                try:
                    value = float(token)
                except ValueError:
                    raise MatrixFormatError(
                        f"{path}: line {lineno}, column {colno}: "
                        f"unparsable numeric token {token!r}"
                    ) from None
                if math.isnan(value):
                    raise MatrixFormatError(
                        f"{path}: line {lineno}, column {colno}: "
                        f"NaN is not a valid matrix entry"
                    )
                if math.isinf(value) and not allow_inf:
                    raise MatrixFormatError(
                        f"{path}: line {lineno}, column {colno}: "
                        f"infinite value {token!r} is not allowed for this matrix"
                    )
                values.append(value)
            if expected is None:
                expected = len(values)
            elif len(values) != expected:
                raise MatrixFormatError(
                    f"{path}: line {lineno}: expected {expected} values per "
                    f"row but found {len(values)}"
                )
            rows.append(values)
    if not rows:
        raise MatrixFormatError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def write_matrix(path, matrix):
    """Write a 2-D array as CSV with shortest round-trip formatting."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {matrix.shape}")
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
