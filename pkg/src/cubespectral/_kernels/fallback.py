"""Pure-numpy butterfly used when the compiled kernel is unavailable."""

import numpy as np


def fwht_inplace(a):
    """Hadamard butterfly over axis 0, unnormalized, in place.

    a must be a C-contiguous complex128 array of shape (2**n, k).
    """
    rows = a.shape[0]
    h = 1
    while h < rows:
        view = a.reshape(-1, 2, h, a.shape[1])
        u = view[:, 0].copy()
        v = view[:, 1]
        np.add(u, v, out=view[:, 0])
        np.subtract(u, v, out=view[:, 1])
        h *= 2
