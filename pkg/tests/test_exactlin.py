"""F_p linear algebra against sympy's GF(p) arithmetic, and Smith normal form over Z."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from levelforge import exactlin as el
from levelforge import _kernels_py
from levelforge.exactlin import PRIME

small = st.integers(min_value=0, max_value=PRIME - 1)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    # bias toward rank deficiency: entries from a tiny alphabet half the time
    alphabet = draw(st.sampled_from([small, st.integers(0, 2)]))
    rows = [[draw(alphabet) for _ in range(c)] for _ in range(r)]
    return np.array(rows, dtype=np.int64).reshape(r, c)


def sympy_rank(a):
    if a.size == 0:
        return 0
    dm = DomainMatrix([[GF(PRIME)(int(x)) for x in row] for row in a.tolist()], a.shape, GF(PRIME))
    return dm.rank()


@given(matrices())
def test_rank_matches_sympy(a):
    assert el.rank(a) == sympy_rank(a)


@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(a):
    N = el.nullspace(a)
    assert N.shape == (a.shape[1], a.shape[1] - el.rank(a))
    if N.size and a.size:
        assert not el.matmul(a, N).any()
    assert el.rank(N) == N.shape[1]


@given(matrices(), st.data())
def test_linear_solve_solves_consistent_systems(a, data):
    if a.shape[1] == 0:
        return
    x0 = np.array([data.draw(small) for _ in range(a.shape[1])], dtype=np.int64).reshape(-1, 1)
    b = el.matmul(a, x0)
    x, _ = el.linear_solve(a, b)
    assert x is not None
    assert np.array_equal(el.matmul(a, x), b % PRIME)


def test_linear_solve_reports_inconsistency():
    a = np.array([[1, 0], [0, 0]], dtype=np.int64)
    b = np.array([[0], [1]], dtype=np.int64)
    x, _ = el.linear_solve(a, b)
    assert x is None


@given(st.integers(1, 5), st.data())
def test_inverse_roundtrip(n, data):
    a = np.array([[data.draw(small) for _ in range(n)] for _ in range(n)], dtype=np.int64)
    if el.rank(a) < n:
        with pytest.raises(Exception):
            el.inverse(a)
        return
    assert np.array_equal(el.matmul(a, el.inverse(a)), el.eye(n))


@given(matrices())
def test_backends_agree(a):
    one, two = a.copy(), a.copy()
    piv_py = _kernels_py.rref_inplace(one, PRIME)
    if el.BACKEND == "cython":
        from levelforge import _kernels
        piv_c = _kernels.rref_inplace(np.ascontiguousarray(two), PRIME)
        assert list(piv_py) == list(piv_c)
        assert np.array_equal(one, two)


@given(matrices())
def test_rref_is_reduced(a):
    R, piv = el.rref(a)
    for k, c in enumerate(piv):
        assert R[k, c] == 1
        assert sum(1 for x in R[:, c] if x) == 1
    assert not R[len(piv):].any()


int_mats = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(int_mats)
def test_smith_normal_form_matches_sympy(G):
    D, U, V = el.smith_normal_form(G)
    n, m = len(G), len(G[0])
    assert el.int_matmul(el.int_matmul(U, G), V) == D
    assert abs(el.int_det(U)) == 1 and abs(el.int_det(V)) == 1
    diag = [D[i][i] for i in range(min(n, m))]
    assert all(D[i][j] == 0 for i in range(n) for j in range(m) if i != j)
    want = sympy_snf(Matrix(G), domain=ZZ)
    assert sorted(abs(x) for x in diag) == sorted(abs(int(want[i, i])) for i in range(min(n, m)))
    live = [abs(x) for x in diag if x]
    assert all(b % a == 0 for a, b in zip(live, live[1:]))


def _probe(env):
    code = "from levelforge import exactlin as el; print(el.PRIME, el.BACKEND)"
    return subprocess.run([sys.executable, "-c", code], env={**os.environ, **env}, capture_output=True, text=True)


def test_environment_selects_prime_and_backend():
    out = _probe({"LEVELFORGE_PRIME": "101", "LEVELFORGE_PURE": "1"})
    assert out.stdout.split() == ["101", "python"]
    bad = _probe({"LEVELFORGE_PRIME": "100"})
    assert bad.returncode != 0 and "LEVELFORGE_PRIME" in bad.stderr
