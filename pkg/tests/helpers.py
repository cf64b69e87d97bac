import numpy as np


def indicator(elems, n):
    v = np.zeros(n, dtype=np.int64)
    v[np.asarray(list(elems), dtype=np.int64) % n] = 1
    return v
