"""Plain federated averaging, shared by the server and the DP mechanism."""

from __future__ import annotations

import numpy as np

from .errors import InputError


def _check(vectors):
    if len(vectors) == 0:
        raise InputError("need at least one vector")
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    size = arrays[0].shape
    if any(a.ndim != 1 or a.shape != size for a in arrays):
        raise InputError("vectors must be 1-D and of equal length")
    return arrays


def stack_vectors(vectors):
    return np.stack(_check(vectors))


def fed_avg(models, weights=None):
    """Coordinate-wise mean of ``models``; optional per-model ``weights``.

    Unweighted averaging sums in list order and divides by N, so the result
    is invariant (up to float reassociation) under permutation of the input.
    """
    if weights is None:
        arrays = _check(models)
        total = arrays[0].copy()
        for a in arrays[1:]:
            total += a
        return total / len(arrays)
    stacked = stack_vectors(models)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (stacked.shape[0],) or weights.sum() <= 0 or np.any(weights < 0):
        raise InputError("weights must be non-negative, one per model, with positive sum")
    return weights @ stacked / weights.sum()
