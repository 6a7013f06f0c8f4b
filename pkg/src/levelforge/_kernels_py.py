"""Pure numpy row reduction over F_p (fallback when the extension is absent)."""
import numpy as np


def rref_inplace(a, p):
    nrows, ncols = a.shape
    row = 0
    pivots = []
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.flatnonzero(a[row:, col])
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            a[[row, piv], col:] = a[[piv, row], col:]
        inv = pow(int(a[row, col]), p - 2, p)
        if inv != 1:
            a[row, col:] = (a[row, col:] * inv) % p
        f = a[:, col].copy()
        f[row] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            a[np.ix_(hit, np.arange(col, ncols))] = (
                a[np.ix_(hit, np.arange(col, ncols))] - np.outer(f[hit], a[row, col:])
            ) % p
        pivots.append(col)
        row += 1
    return pivots
