"""NumPy implementation of the distance kernels, used when the extension is absent."""

import numpy as np

_CHUNK_ELEMS = 1 << 22


def pairwise_bregman(A, FA, B, FB, GB):
    A = np.ascontiguousarray(A, dtype=np.float64)
    B = np.ascontiguousarray(B, dtype=np.float64)
    GB = np.ascontiguousarray(GB, dtype=np.float64)
    n, d = A.shape
    m = B.shape[0]
    out = np.empty((n, m))
    rows = max(1, _CHUNK_ELEMS // max(1, m * d))
    for start in range(0, n, rows):
        a = A[start : start + rows, None, :]
        lin = np.sum((a - B[None, :, :]) * GB[None, :, :], axis=-1)
        out[start : start + rows] = FA[start : start + rows, None] - FB[None, :] - lin
    return out


def assign_nearest(X, FX, C, FC, GC):
    dist = pairwise_bregman(X, FX, C, FC, GC)
    labels = np.argmin(dist, axis=1).astype(np.intp)
    return labels, dist[np.arange(dist.shape[0]), labels]
