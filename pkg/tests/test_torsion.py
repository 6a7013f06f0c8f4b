import numpy as np
import pytest
from hypothesis import given, strategies as st

from levelforge import algebra as al
from levelforge import complexes as cx
from levelforge import torsion as ts
from levelforge.exactlin import PRIME

seeds = st.integers(0, 2**32 - 1)
A2 = al.linear_A(2)
P, S = al.standard_modules(A2)
PAIR = ts.TorsionPairSpec(A2, [S[0]], "add S1")


def test_interval_modules_enumerate_indecomposables():
    labels = [lab for lab, _ in ts.indecomposables(al.linear_A(3))]
    assert labels == ["M[1,1]", "M[1,2]", "M[1,3]", "M[2,2]", "M[2,3]", "M[3,3]"]
    assert ts.indecomposables(al.kronecker()) is None
    assert ts.interval_module(A2, 0, 1).dims == P[0].dims


def test_torsion_parts_of_small_modules():
    d = ts.torsion_part(PAIR, P[0])
    assert d.t.dim == 0 and d.f.dims == (1, 1)
    d = ts.torsion_part(PAIR, S[0])
    assert d.t.dims == (1, 0) and d.f.dim == 0
    M, _, _ = al.direct_sum([S[0], P[0]])
    d = ts.torsion_part(PAIR, M)
    assert d.t.dims == (1, 0) and d.f.dims == (1, 1)


@given(seeds, st.sampled_from(["A2", "A3"]))
def test_tcf_sequence_is_exact_with_correct_pieces(seed, name):
    A = al.builtin(name)
    rng = np.random.default_rng(seed)
    gens = [al.simple(A, int(rng.integers(0, A.nv)))]
    pair = ts.TorsionPairSpec(A, gens)
    c = al.random_module(A, rng, 3)
    d = ts.torsion_part(pair, c)
    assert d.inclusion.is_homomorphism() and d.projection.is_homomorphism()
    assert d.projection.compose(d.inclusion).is_zero()
    assert [a + b for a, b in zip(d.t.dims, d.f.dims)] == list(c.dims)
    assert ts.in_T(pair, d.t) and ts.in_F(pair, d.f)


@given(seeds)
def test_adjunction_shadow(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(3)
    pair = ts.TorsionPairSpec(A, [al.simple(A, 0), al.simple(A, 1)])
    c = al.random_module(A, rng, 3)
    t = ts.torsion_part(pair, c).t
    for _, tp in ts.indecomposables(A):
        if ts.in_T(pair, tp):
            assert al.hom_dim(tp, c) == al.hom_dim(tp, t)


def test_torsion_pair_verdicts():
    assert ts.is_torsion_pair(PAIR).verdict == "PASS"
    assert ts.is_torsion_pair(ts.TorsionPairSpec(A2, [S[1]])).passed
    assert ts.cotilting_check(PAIR).verdict == "COTILTING"
    assert not ts.cotilting_check(ts.TorsionPairSpec(A2, [S[1]])).passed
    assert ts.tilting_check(ts.TorsionPairSpec(A2, S)).verdict == "TILTING"


def test_sampled_mode_off_linear_A():
    K = al.kronecker()
    v = ts.is_torsion_pair(ts.TorsionPairSpec(K, [al.simple(K, 0)]), samples=10)
    assert v.mode == "sampled"


def test_heart_objects_and_check():
    hearts = ts.heart_objects(PAIR)
    assert hearts
    for H in hearts:
        assert ts.in_F(PAIR, H.h0) and ts.in_T(PAIR, H.h1)
    # P1 itself is a heart object with trivial T-part, S1[-1] one with trivial F-part
    assert any(H.h0.dims == (1, 1) and H.h1.dim == 0 for H in hearts)
    assert any(H.h0.dim == 0 and H.h1.dims == (1, 0) for H in hearts)
    assert ts.heart_check(PAIR).passed


def test_heart_needs_tilting_or_cotilting():
    with pytest.raises(ts.TorsionError):
        ts.heart_check(ts.TorsionPairSpec(al.linear_A(3), [al.simple(al.linear_A(3), 2)]))


def test_strictness_in_F():
    assert ts.strict_probe(PAIR, P[0].identity()).verdict == "STRICT"
    assert ts.strict_probe(PAIR, S[1].zero_map(P[0])).strict
    inc = al.hom_space(S[1], P[0])[0]
    rep = ts.strict_probe(PAIR, inc)
    assert not rep.strict and rep.rank_defect == 1
    with pytest.raises(ts.TorsionError):
        ts.strict_probe(PAIR, S[0].identity())


def test_pullback_of_identity_is_strict():
    M, _, _ = al.direct_sum([P[0], S[1]])
    g = al.HomSpace(S[1], M).element([1] * al.HomSpace(S[1], M).dim)
    Pb, to_a, to_c = ts.pullback(M.identity(), g)
    assert ts.is_strict_epi(PAIR, to_c)


@given(seeds)
def test_quasi_abelian_probe_small(seed):
    st_ = ts.quasi_abelian_probe(PAIR, 10, seed % 1000)
    assert st_.all_strict


def test_degenerate_F_is_vacuous():
    pair = ts.TorsionPairSpec(A2, [P[0], S[0], S[1]])
    st_ = ts.quasi_abelian_probe(pair, 5)
    assert st_.all_strict


def test_chain_probe_is_stationary():
    ch = ts.noetherian_chain_probe(PAIR)
    assert ch.stationary and ch.max_length <= ch.bound


def test_two_term_complex_homology():
    f = al.hom_space(S[1], P[0])[0]
    X = ts.two_term(S[1], P[0], f)
    h = {i: d for i, d in cx.homology_dims(X).items() if any(d)}
    assert h == {1: (1, 0)}
    assert PRIME > 2
