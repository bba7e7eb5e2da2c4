"""Frequent Directions sketch over a stream of m-dimensional rows.

The sketch keeps an ell x m buffer B. Rows are written into zero rows of
the buffer; once no zero row remains, a shrink step runs: take the SVD of
B, subtract the ell-th squared singular value from all squared singular
values (clamping at zero), and rebuild B as diag(s') V^T. This guarantees
||A^T A - B^T B||_2 <= 2 ||A||_F^2 / ell over the whole stream A, with
A^T A - B^T B positive semidefinite.

One subtlety is worth spelling out: the shrunk values are computed from a
single squared array (s2 = s * s, delta = s2[ell-1]) rather than from a
separately squared scalar. Vectorised and scalar squaring can disagree by
one ulp, which would leave the last shrunk value a tiny positive number
instead of exactly zero and the buffer with no free row.
"""

from collections import namedtuple

import numpy as np

from .errors import NumericalError, ParameterError

SingularTriple = namedtuple("SingularTriple", ["u", "s", "v"])
"""Thin SVD of a short-and-wide matrix: u (r x r), s (r,), v (c x r) with r <= c."""


def svd_thin(mat):
    """Thin SVD of a short-and-wide matrix, returned as a SingularTriple.

    Rejects matrices with more rows than columns; the sketch buffer is
    handled through its transpose in that regime.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2:
        raise ParameterError("svd_thin expects a matrix, got ndim=%d" % mat.ndim)
    rows, cols = mat.shape
    if rows > cols:
        raise ParameterError(
            "svd_thin expects rows <= cols, got %d x %d" % (rows, cols)
        )
    try:
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("SVD failed to converge: %s" % exc) from exc
    return SingularTriple(u, s, vh.T)


def _singular_rows(mat):
    """Singular values and right singular vectors (as rows) of any matrix.

    Tall matrices are decomposed through their transpose so svd_thin only
    ever sees the short-and-wide case.
    """
    if mat.shape[0] <= mat.shape[1]:
        tri = svd_thin(mat)
        return tri.s, tri.v.T
    tri = svd_thin(mat.T)
    return tri.s, tri.u.T


class FdSketch:
    """Frequent Directions buffer with structural zero-row tracking.

    Rows at index >= next_zero_row are exactly zero; zero rows are tracked
    structurally (never by scanning values) because a legitimately inserted
    row may contain zeros.
    """

    def __init__(self, ell, m):
        if not isinstance(ell, (int, np.integer)) or ell < 2:
            raise ParameterError("ell must be an integer >= 2, got %r" % (ell,))
        if not isinstance(m, (int, np.integer)) or m < 1:
            raise ParameterError("m must be an integer >= 1, got %r" % (m,))
        self.ell = int(ell)
        self.m = int(m)
        self.buffer = np.zeros((self.ell, self.m))
        self.next_zero_row = 0
        self.rows_seen = 0
        self.shrink_count = 0

    def insert(self, row):
        """Insert one row; shrink if the buffer is left with no zero row."""
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (self.m,):
            raise ParameterError(
                "row has shape %r, expected (%d,)" % (row.shape, self.m)
            )
        self.buffer[self.next_zero_row] = row
        self.next_zero_row += 1
        self.rows_seen += 1
        if self.next_zero_row == self.ell:
            self.shrink()

    def shrink(self):
        """Subtract the ell-th squared singular value and rebuild the buffer.

        Invoked by insert when the buffer fills. Every row whose shrunk
        singular value is exactly zero is freed, so repeated singular values
        tied with the ell-th release more than one row at once. When the
        buffer is taller than wide (ell > m, legal but wasteful) the ell-th
        singular value is structurally zero and the shrink is lossless.
        """
        s, vt = _singular_rows(self.buffer)
        s2 = s * s
        delta = s2[self.ell - 1] if self.ell <= len(s) else 0.0
        shrunk = np.sqrt(np.maximum(s2 - delta, 0.0))
        nz = int(np.count_nonzero(shrunk))
        self.buffer = np.zeros((self.ell, self.m))
        self.buffer[:nz] = shrunk[:nz, None] * vt[:nz]
        self.next_zero_row = nz
        self.shrink_count += 1

    def basis(self, k):
        """First k right singular vectors of the buffer, as an m x k matrix.

        Columns are ordered by non-increasing singular value. Each column is
        flipped so its largest-magnitude entry is positive: the LAPACK sign
        choice is arbitrary and can change when the buffer changes slightly,
        which would make codes emitted at different stream positions
        incomparable. Undefined on a sketch whose buffer holds no data
        (nothing inserted yet, or every direction annihilated by shrinks).
        """
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ParameterError("k must be an integer >= 1, got %r" % (k,))
        if k > self.ell:
            raise ParameterError("k=%d exceeds sketch rows ell=%d" % (k, self.ell))
        if k > self.m:
            raise ParameterError("k=%d exceeds row dimension m=%d" % (k, self.m))
        if self.next_zero_row == 0 or not self.buffer.any():
            raise NumericalError("sketch buffer is all zeros, no basis defined")
        s, vt = _singular_rows(self.buffer)
        v = vt[:k].T
        anchor = v[np.argmax(np.abs(v), axis=0), np.arange(k)]
        flip = np.where(anchor >= 0, 1.0, -1.0)
        return v * flip
