"""Exact linear algebra over a prime field F_p and Smith normal form over Z.

Matrices are dense ``numpy.int64`` arrays with entries in ``[0, PRIME)``.
The field prime is read once from ``LEVELFORGE_PRIME`` (default 32003) and
stays fixed for the process.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = [
    "PRIME", "BACKEND", "mat", "zeros", "eye", "rref", "rank", "nullspace",
    "linear_solve", "matmul", "inverse", "is_zero", "column_space",
    "complement_basis", "smith_normal_form", "int_matmul", "int_det",
    "LeftInverse",
]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


PRIME = int(os.environ.get("LEVELFORGE_PRIME", "32003"))
if not _is_prime(PRIME) or PRIME >= 2**31:
    raise ValueError(f"LEVELFORGE_PRIME must be a prime below 2**31, got {PRIME}")

if os.environ.get("LEVELFORGE_PURE"):
    from ._kernels_py import rref_inplace as _rref_inplace
    BACKEND = "python"
else:
    try:
        from ._kernels import rref_inplace as _rref_inplace
        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._kernels_py import rref_inplace as _rref_inplace
        BACKEND = "python"

# float64 products stay exact while inner_dim * (p-1)**2 < 2**53
_FLOAT_SAFE_INNER = max(1, (2**53) // ((PRIME - 1) ** 2 + 1))


def mat(x, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce nested sequences (arbitrary ints allowed) to an int64 matrix mod p."""
    a = np.array(x, dtype=object)
    if rows is not None and cols is not None:
        a = a.reshape(rows, cols)
    elif a.ndim == 1:
        a = a.reshape(1, -1)
    return (a % PRIME).astype(np.int64)


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=np.int64)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivoting is deterministic (first nonzero entry scanning down each column);
    the reduced form itself is canonical.
    """
    r = np.ascontiguousarray(a, dtype=np.int64) % PRIME
    if r.size == 0:
        return r.copy(), []
    r = r.copy()
    piv = _rref_inplace(r, PRIME)
    return r, list(piv)


def rank(m: np.ndarray) -> int:
    return len(rref(m)[1])


def nullspace(m: np.ndarray) -> np.ndarray:
    """Columns spanning ker m, in the canonical reduced-echelon basis."""
    m = np.asarray(m, dtype=np.int64)
    n = m.shape[1]
    if m.shape[0] == 0:
        return eye(n)
    r, piv = rref(m)
    free = [j for j in range(n) if j not in set(piv)]
    k = zeros(n, len(free))
    for t, j in enumerate(free):
        k[j, t] = 1
        for i, pc in enumerate(piv):
            k[pc, t] = (-r[i, j]) % PRIME
    return k


def linear_solve(m: np.ndarray, b: np.ndarray):
    """Solve ``m @ x = b``.

    Returns ``(particular, kernel_basis)``; ``particular`` is ``None`` when the
    system is inconsistent. The particular solution sets all free variables to 0.
    """
    m = np.asarray(m, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    if b.shape[0] != m.shape[0]:
        raise ValueError(f"shape mismatch: m has {m.shape[0]} rows, b has {b.shape[0]}")
    n = m.shape[1]
    kern = nullspace(m)
    if m.shape[0] == 0:
        return zeros(n, b.shape[1]), kern
    aug = np.concatenate([m % PRIME, b % PRIME], axis=1)
    r, piv = rref(aug)
    if any(p >= n for p in piv):
        return None, kern
    x = zeros(n, b.shape[1])
    for i, pc in enumerate(piv):
        x[pc] = r[i, n:]
    return x, kern


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product mod p (float64 BLAS in exact-safe chunks)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k = a.shape[1]
    if a.size == 0 or b.size == 0:
        return zeros(a.shape[0], b.shape[1])
    step = _FLOAT_SAFE_INNER
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, k, step):
        pa = a[:, s:s + step].astype(np.float64)
        pb = b[s:s + step].astype(np.float64)
        out = (out + np.fmod(pa @ pb, PRIME).astype(np.int64)) % PRIME
    return out


def inverse(a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("inverse of a non-square matrix")
    r, piv = rref(np.concatenate([a % PRIME, eye(n)], axis=1))
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return r[:, n:].copy()


def is_zero(a: np.ndarray) -> bool:
    return not np.any(np.asarray(a) % PRIME)


def column_space(a: np.ndarray) -> np.ndarray:
    """Basis (columns) of the column span, taken from the pivot columns of ``a``."""
    if a.size == 0:
        return zeros(a.shape[0], 0)
    _, piv = rref(a)
    return a[:, piv] % PRIME


def complement_basis(sub: np.ndarray, ambient: np.ndarray) -> np.ndarray:
    """Columns of ``ambient`` extending a basis of span(sub) to span(ambient).

    Returns the chosen columns of ``ambient`` (first-found order).
    """
    ns = sub.shape[1]
    if ambient.shape[1] == 0:
        return zeros(ambient.shape[0], 0)
    if ns == 0:
        return column_space(ambient)
    _, piv = rref(np.concatenate([sub, ambient], axis=1))
    pick = [p - ns for p in piv if p >= ns]
    return ambient[:, pick] % PRIME


class LeftInverse:
    """Coordinates of vectors in the span of independent columns.

    ``coords(z)`` returns c with ``cols @ c = z`` (z assumed in the span).
    """

    def __init__(self, cols: np.ndarray):
        self.cols = np.asarray(cols, dtype=np.int64)
        m, k = self.cols.shape
        self.k = k
        if k == 0:
            self.rows = []
            self.inv = zeros(0, 0)
            return
        _, piv = rref(self.cols.T.copy())
        if len(piv) != k:
            raise ValueError("columns are not independent")
        self.rows = piv
        self.inv = inverse(self.cols[piv])

    def coords(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.int64)
        if self.k == 0:
            return zeros(0, z.shape[1]) if z.ndim == 2 else np.zeros(0, dtype=np.int64)
        if z.ndim == 1:
            return matmul(self.inv, z[self.rows].reshape(-1, 1)).ravel()
        return matmul(self.inv, z[self.rows])


# ---------------------------------------------------------------- integers


def int_matmul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def int_det(a: list[list[int]]) -> int:
    """Determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _ident(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(a: list[list[int]]):
    """Smith normal form ``u @ a @ v = d`` over the integers.

    ``d`` is diagonal with nonnegative entries d_1 | d_2 | ...; ``u`` and ``v``
    are unimodular. Arbitrary-precision Python ints throughout.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [list(map(int, r)) for r in a]
    u = _ident(rows)
    v = _ident(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, f):  # row_dst += f * row_src
        if f:
            d[dst] = [x + f * y for x, y in zip(d[dst], d[src])]
            u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, f):
        if f:
            for r in d:
                r[dst] += f * r[src]
            for r in v:
                r[dst] += f * r[src]

    t = 0
    while t < min(rows, cols):
        nz = [(abs(d[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if d[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // d[t][t]))
                    if d[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // d[t][t]))
                    if d[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility of the remaining block
            bad = [(i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if d[i][j] % d[t][t]]
            if bad:
                add_row(bad[0][0], t, 1)
                continue
            break
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return d, u, v
