import numpy as np
import pytest
from hypothesis import given, strategies as st

from levelforge import acceptance as ac
from levelforge import algebra as al
from levelforge import complexes as cx
from levelforge import kzero as kz
from levelforge.complexes import PerfMap

seeds = st.integers(0, 2**32 - 1)
algebras = st.sampled_from(["A2", "A3", "kronecker"])


def _rand(name, seed, width=3):
    A = al.builtin(name)
    return cx.random_complex(A, np.random.default_rng(seed), width=width)


@given(seeds, algebras)
def test_random_complexes_square_to_zero(seed, name):
    X = _rand(name, seed)
    X.check()
    cx.as_perf(X).check()


def _nonzero(h):
    return {i: tuple(d) for i, d in h.items() if any(d)}


@given(seeds, algebras)
def test_projective_model_is_quasi_isomorphic(seed, name):
    X = _rand(name, seed)
    assert _nonzero(cx.homology_dims(cx.as_perf(X).realize())) == _nonzero(cx.homology_dims(X))


@given(seeds, algebras)
def test_minimal_model_keeps_homology(seed, name):
    P = cx.as_perf(_rand(name, seed))
    m, F, G = cx.minimalize(P)
    assert m.is_minimal()
    assert _nonzero(cx.homology_dims(m.realize())) == _nonzero(cx.homology_dims(P.realize()))
    assert F.is_chain_map() and G.is_chain_map()
    assert cx.is_null_homotopic(G.compose(F) - cx.perf_identity(P))


@given(seeds, algebras, st.integers(-3, 3))
def test_shift_moves_homology(seed, name, n):
    X = _rand(name, seed)
    h = _nonzero(cx.homology_dims(X))
    hs = _nonzero(cx.homology_dims(cx.shift(X, n)))
    assert hs == {i - n: d for i, d in h.items()}


@given(seeds, algebras)
def test_yoneda_hom_from_projectives_reads_homology(seed, name):
    X = _rand(name, seed)
    A = X.algebra
    h = cx.homology_dims(X)
    for v in range(A.nv):
        H = cx.HomComplex(cx.perf_projective(A, [v], 0), X)
        for i, d in h.items():
            assert H.dim(i) == d[v]


@given(seeds)
def test_cone_of_identity_is_acyclic(seed):
    P = cx.as_perf(_rand("A3", seed))
    C = cx.cone(cx.perf_identity(P)).cone
    assert C.is_zero() or not _nonzero(cx.homology_dims(C.realize()))


@given(seeds)
def test_triangle_exactness_property(seed):
    assert ac.triangle_exactness(seed=seed, trials=3).passed


@given(seeds)
def test_cone_class_is_additive(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(3)
    P = cx.as_perf(cx.random_complex(A, rng))
    Q = cx.as_perf(cx.random_complex(A, rng))
    f = PerfMap(P, Q, cx.random_chain_map(P, Q, rng).blocks)
    C = cx.cone(f).cone
    want = tuple(q - p for p, q in zip(kz.class_of(P), kz.class_of(Q)))
    assert kz.class_of(C) == want
    assert kz.class_from_homology(C) == want


def test_module_cone_of_projective_cover():
    A = al.linear_A(2)
    P, S = al.standard_modules(A)
    inc = al.hom_space(S[1], P[0])[0]
    f = cx.ChainMap(cx.module_complex(S[1]), cx.module_complex(P[0]), {0: inc})
    C = cx.cone(f).cone
    assert _nonzero(cx.homology_dims(C)) == {0: (1, 0)}


def test_cone_rejects_non_chain_map():
    A = al.linear_A(2)
    X = cx.PerfComplex(A, -1, [[1], [0]], [cx.azeros(A, 1, 1)])   # P_2 -0-> P_1
    a = cx.azeros(A, 1, 1)
    a[0, 0, A.idem[0]] = 1
    Q = cx.PerfComplex(A, 0, [[0], [0]], [a])                     # P_1 -id-> P_1
    bad = PerfMap(Q, Q, {0: a})                                   # identity in degree 0 only
    assert not bad.is_chain_map()
    with pytest.raises(cx.ComplexError):
        cx.cone(bad)
    assert X.hi == 0


def test_differential_must_respect_vertices():
    A = al.linear_A(2)
    with pytest.raises(cx.ComplexError):
        cx.PerfComplex(A, 0, [[0], [1]], [cx.aidentity(A, [0])])


@given(seeds)
def test_split_conjugated_idempotent(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(2)
    Q, e, N1, N2 = ac.conjugated_idempotent(A, rng)
    sp = cx.split_homotopy_idempotent(Q, e)
    for S in al.standard_modules(A)[1]:
        Sp = cx.as_perf(S)
        assert ac._hom_table(Sp, sp.n1) == ac._hom_table(Sp, N1)
        assert ac._hom_table(Sp, sp.n2) == ac._hom_table(Sp, N2)


def test_split_rejects_non_idempotent():
    A = al.linear_A(2)
    P = cx.as_perf(al.simple(A, 0))
    with pytest.raises(cx.ComplexError):
        cx.split_homotopy_idempotent(P, cx.perf_identity(P).scale(2))


def test_derived_hom_of_simples_A2():
    A = al.linear_A(2)
    S = al.standard_modules(A)[1]
    d = cx.derived_hom_dims(S[0], S[1], 2)
    assert d == {-2: 0, -1: 0, 0: 0, 1: 1, 2: 0}


def test_koszul_complex_over_dual_numbers():
    A = al.dual_numbers()
    x = np.zeros(A.dim, dtype=np.int64)
    x[[k for k in range(A.dim) if A.basis[k][1]][0]] = 1
    K = cx.koszul_complex([x], A)
    assert _nonzero(cx.homology_dims(K.realize())) == {-1: (1,), 0: (1,)}
    unit = np.zeros(A.dim, dtype=np.int64)
    unit[A.idem[0]] = 1
    assert not _nonzero(cx.homology_dims(cx.koszul_complex([unit], A).realize()))
