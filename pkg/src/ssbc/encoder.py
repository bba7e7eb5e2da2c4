"""Streaming spectral binary coding.

Training streams the affinity vectors of the training points themselves
through a Frequent Directions sketch. A point's codeword is the sign of
its affinity vector projected onto the first k right singular vectors of
the sketch buffer. Two emission modes exist:

* online: each point's affinity row is inserted and its code read from the
  basis immediately afterwards, so early codes come from earlier bases;
* streaming (batch): all rows are inserted first and every code is read
  from the final basis.

For a stationary basis the two agree, and they always agree on the last
point processed. Ties sign(0) are broken to +1. Affinity rows are inserted
unscaled: rescaling every row by a common factor changes neither the right
singular vectors nor any projection sign.
"""

import math
import warnings

import numpy as np

from .affinity import affinity_matrix, affinity_vector
from .errors import ParameterError
from .sketch import FdSketch


def signs(values):
    """Elementwise sign with sign(0) = +1, as int8 in {-1, +1}."""
    return np.where(np.asarray(values) >= 0, 1, -1).astype(np.int8)


class SsbcParams:
    """Code length k and sketch accuracy epsilon; sketch size ell = ceil(k + k/epsilon)."""

    def __init__(self, k, epsilon=0.5):
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ParameterError("k must be an integer >= 1, got %r" % (k,))
        epsilon = float(epsilon)
        if not (0.0 < epsilon <= 1.0):
            raise ParameterError("epsilon must lie in (0, 1], got %r" % epsilon)
        self.k = int(k)
        self.epsilon = epsilon

    @property
    def ell(self):
        return int(math.ceil(self.k + self.k / self.epsilon))


class SsbcModel:
    """A trained encoder: training set, FD sketch over affinity rows, and params."""

    def __init__(self, train, sketch, params):
        if sketch.m != train.m:
            raise ParameterError("sketch row dimension %d does not match train size %d"
                                 % (sketch.m, train.m))
        if sketch.ell != params.ell:
            raise ParameterError("sketch has ell=%d, params require %d"
                                 % (sketch.ell, params.ell))
        self.train = train
        self.sketch = sketch
        self.params = params


def sign_project(w, basis):
    """Codeword sign(w . basis_j) for each basis column j."""
    w = np.asarray(w, dtype=np.float64)
    basis = np.asarray(basis, dtype=np.float64)
    if w.ndim != 1 or basis.ndim != 2 or basis.shape[0] != w.shape[0]:
        raise ParameterError("shape mismatch: w %r vs basis %r" % (w.shape, basis.shape))
    return signs(w @ basis)


def ssbc_train(train, params):
    """Stream the training points' own affinity rows into a fresh sketch."""
    if params.ell > train.m:
        warnings.warn("sketch ell=%d exceeds train size m=%d; wider than the data "
                      "is wasteful but legal" % (params.ell, train.m))
    sketch = FdSketch(params.ell, train.m)
    rows = affinity_matrix(train.points, train)
    for row in rows:
        sketch.insert(row)
    return SsbcModel(train, sketch, params)


def ssbc_process_online(model, point):
    """Insert one point's affinity row, then emit its code from the updated basis.

    Mutates model.sketch in place; the updated model is the argument itself.
    """
    if model.sketch.rows_seen < 1:
        raise ParameterError("model sketch has seen no rows; train it first")
    w = affinity_vector(point, model.train)
    model.sketch.insert(w)
    basis = model.sketch.basis(model.params.k)
    return sign_project(w, basis)


def ssbc_encode_batch(model, points):
    """Insert every point's affinity row, then emit all codes from the final basis."""
    if model.sketch.rows_seen < 1:
        raise ParameterError("model sketch has seen no rows; train it first")
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return np.zeros((0, model.params.k), dtype=np.int8)
    rows = affinity_matrix(points, model.train)
    for row in rows:
        model.sketch.insert(row)
    basis = model.sketch.basis(model.params.k)
    return signs(rows @ basis)
