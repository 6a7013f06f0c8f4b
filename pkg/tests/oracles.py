"""Independent reference computations used only by the tests."""
from sympy import Matrix


def hom_dim_sympy(M, N, p):
    """dim Hom(M, N) by solving the commuting-square equations with sympy modulo p."""
    A = M.algebra
    offs, total = [], 0
    for v in range(A.nv):
        offs.append(total)
        total += N.dims[v] * M.dims[v]
    if total == 0:
        return 0
    rows = []
    for a in range(len(A.arrow_src)):
        s, t = A.arrow_src[a], A.arrow_tgt[a]
        Ma, Na = M.mats[a].tolist(), N.mats[a].tolist()
        # (N_a X_s - X_t M_a)[r][c] = 0
        for r in range(N.dims[t]):
            for c in range(M.dims[s]):
                row = [0] * total
                for k in range(N.dims[s]):
                    row[offs[s] + k * M.dims[s] + c] += Na[r][k]
                for k in range(M.dims[t]):
                    row[offs[t] + r * M.dims[t] + k] -= Ma[k][c]
                rows.append(row)
    if not rows:
        return total
    mat = Matrix(rows).applyfunc(lambda x: x % p)
    # rank over GF(p) via row reduction with modular inverses
    return total - rank_mod_p(mat, p)


def rank_mod_p(mat, p):
    m = [[int(x) % p for x in mat.row(i)] for i in range(mat.rows)]
    rank, cols = 0, mat.cols
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def euler_form_hereditary(A, m, n):
    """<m, n> = sum_v m_v n_v - sum_{arrows s -> t} m_s n_t for a path algebra without relations."""
    out = sum(a * b for a, b in zip(m, n))
    for s, t in zip(A.arrow_src, A.arrow_tgt):
        out -= m[s] * n[t]
    return out


def cech_line_bundle(n, spread=30):
    """(h^0, h^1) of O(n) on P^1 by listing Laurent monomials x^a y^b, a + b = n.

    h^0 counts monomials regular on both charts; h^1 counts monomials in the
    overlap that are regular on neither chart (negative exponent in x and y).
    """
    h0 = h1 = 0
    for a in range(-spread, spread + 1):
        b = n - a
        if a >= 0 and b >= 0:
            h0 += 1
        if a < 0 and b < 0:
            h1 += 1
    return h0, h1

