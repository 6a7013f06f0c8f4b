import numpy as np
import pytest
from hypothesis import given, strategies as st

from levelforge import acceptance as ac
from levelforge import algebra as al
from levelforge import complexes as cx
from levelforge import levels as lv
from levelforge.serialize import cert_from_json, cert_to_json

seeds = st.integers(0, 2**32 - 1)


def test_level_arithmetic():
    L = lv.Leaf(0)
    assert lv.level(L) == 1
    assert lv.level(lv.DirectSum([L, L])) == 1
    assert lv.level(lv.Cone(L, lv.Cone(L, L))) == 3
    assert lv.size(lv.Cone(L, lv.DirectSum([L]))) == 4


def test_free_module_has_level_one():
    A = al.linear_A(2)
    gens = [cx.perf_free(A)]
    b = lv.level_upper_bound(al.free_module(A), gens)
    assert b.level == 1
    assert lv.verify_certificate(al.free_module(A), b.cert, gens).passed


def test_simple_top_needs_a_cone():
    A = al.linear_A(2)
    gens = [cx.perf_free(A)]
    S1 = al.simple(A, 0)
    b = lv.level_upper_bound(S1, gens)
    assert b.level == 2
    assert lv.verify_certificate(S1, b.cert, gens).passed
    # a single copy of the generator does not contain S1 as a summand
    assert not lv.verify_certificate(S1, lv.Leaf(0), gens).passed


def test_certificate_errors():
    A = al.linear_A(2)
    gens = [cx.perf_free(A)]
    with pytest.raises(lv.CertificateError):
        lv.build(lv.Leaf(3), gens)
    with pytest.raises(lv.CertificateError):
        lv.build(lv.Leaf(0, 0, -1), gens)
    with pytest.raises(lv.CertificateError):
        lv.star_rewrite_smd(lv.Leaf(0), gens)
    assert lv.level_upper_bound(al.simple(A, 0), [cx.as_perf(al.simple(A, 1))]).level is None


@given(seeds)
def test_hereditary_levels_at_most_two(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(3)
    gens = [cx.perf_free(A)]
    X = cx.random_complex(A, rng, width=int(rng.integers(1, 5)))
    b = lv.level_upper_bound(X, gens)
    assert b.level <= 2
    assert lv.verify_certificate(X, b.cert, gens).passed


@given(seeds)
def test_stupid_filtration_level_is_width(seed):
    rng = np.random.default_rng(seed)
    P = cx.as_perf(cx.random_complex(al.linear_A(3), rng, width=3))
    c = lv.stupid_filtration_certificate(P, 0)
    widths = sum(1 for i in range(P.lo, P.hi + 1) if P.v(i))
    assert lv.level(c) == max(1, widths)
    assert lv.verify_certificate(P, c, [cx.perf_free(P.algebra)]).passed


@given(seeds, st.sampled_from([2, 3]))
def test_star_rewrite_is_sound(seed, n):
    rng = np.random.default_rng(seed)
    cert, gens = ac.summand_cone_instance(al.linear_A(n), rng)
    x = lv.build(cert, gens)
    new = lv.star_rewrite_smd(cert, gens)
    assert isinstance(new, lv.Summand) and isinstance(new.child, lv.Cone)
    assert lv.level(new) == lv.level(cert)
    assert lv.verify_certificate(x, new.child, gens).passed
    lv.build(new, gens)


@given(seeds)
def test_certificate_json_roundtrip(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(2)
    cert, gens = ac.summand_cone_instance(A, rng)
    back = cert_from_json(A, cert_to_json(cert))
    assert cert_to_json(back) == cert_to_json(cert)
    x = lv.build(cert, gens)
    assert lv.verify_certificate(x, back, gens).passed


@pytest.mark.parametrize("name,k", [("k", 1), ("A2", 2), ("A3", 2), ("kronecker", 2)])
def test_diagonal_bound_is_global_dimension_plus_one(name, k):
    assert lv.diagonal_strong_generation_bound(al.builtin(name)).k == k


def test_diagonal_bound_needs_finite_global_dimension():
    with pytest.raises(lv.CertificateError):
        lv.diagonal_strong_generation_bound(al.dual_numbers(), cap=4)


def test_enveloping_algebra_dimension():
    A = al.linear_A(2)
    Ae = lv.enveloping_algebra(A)
    assert Ae.dim == A.dim ** 2
    M = lv.diagonal_bimodule(A, Ae)
    assert M.dim == A.dim


def test_right_orthogonal_check_on_A2():
    A = al.linear_A(2)
    S = al.standard_modules(A)[1]
    out = lv.right_orthogonal_check([cx.perf_projective(A, [1], 0)], S[0], window=2)
    assert out["first_nonzero"] is None
    out = lv.right_orthogonal_check([cx.perf_projective(A, [0], 0)], S[0], window=2)
    assert out["first_nonzero"] == (0, 0, 1)


def test_contractible_object_verifies_against_any_certificate():
    A = al.linear_A(2)
    gens = [cx.perf_free(A)]
    L = cx.perf_free(A)
    contractible = cx.cone(cx.perf_identity(L)).cone
    assert not contractible.is_zero()
    assert lv.verify_certificate(contractible, lv.Leaf(0, 5), gens).passed
