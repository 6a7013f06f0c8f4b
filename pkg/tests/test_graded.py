import pytest
from hypothesis import given, strategies as st

from levelforge import graded as gr
from levelforge.exactlin import PRIME

from oracles import cech_line_bundle

R = gr.polynomial_ring()
Q = gr.quantum_plane(3)
K = gr.graded_field()

monos = st.tuples(st.integers(0, 4), st.integers(0, 4))
coefs = st.integers(1, PRIME - 1)
polys = st.dictionaries(monos, coefs, max_size=3)


@given(polys, polys, polys, st.integers(2, 50))
def test_quantum_plane_is_associative(f, g, h, q):
    S = gr.quantum_plane(q)
    assert S.multiply(S.multiply(f, g), h) == S.multiply(f, S.multiply(g, h))


def test_quantum_commutation_rule():
    x, y = {(1, 0): 1}, {(0, 1): 1}
    assert Q.multiply(y, x) == {(1, 1): 3}
    assert Q.multiply(x, y) == {(1, 1): 1}
    assert Q.opposite().multiply(y, x) == {(1, 1): pow(3, PRIME - 2, PRIME)}
    assert R.multiply(y, x) == R.multiply(x, y)


def test_unknown_ring_is_rejected():
    with pytest.raises(gr.GradedError):
        gr.graded_builtin("weyl")
    with pytest.raises(gr.GradedError):
        gr.quantum_plane(0)


@pytest.mark.parametrize("S", [R, Q])
def test_residue_field_resolution_is_koszul(S):
    assert gr.ext_kk_table(S, 3) == {0: [0], 1: [-1, -1], 2: [-2], 3: []}


def test_betti_numbers_of_truncation():
    b = gr.betti_table(gr.truncation_quotient(R, 2))
    assert b[0] == [0]
    assert sorted(b[1]) == [-2, -2, -2]
    assert sorted(b[2]) == [-3, -3]


def test_hilbert_function_of_residue_and_truncation():
    assert gr.residue_field(R).dims(-2, 3) == {-2: 0, -1: 0, 0: 1, 1: 0, 2: 0, 3: 0}
    assert gr.truncation_quotient(R, 3).dims(0, 4) == {0: 1, 1: 2, 2: 3, 3: 0, 4: 0}
    assert gr.twisted_ring(R, 2).dims(-3, 0) == {-3: 0, -2: 1, -1: 2, 0: 3}


@pytest.mark.parametrize("n", range(-6, 7))
def test_serre_table_matches_cech(n):
    t = gr.serre_ext_table(R, 0, n)
    assert t.stabilized
    h0, h1 = cech_line_bundle(n)
    assert (t.dims[0], t.dims[1], t.dims[2]) == (h0, h1, 0)


@pytest.mark.parametrize("m,n", [(2, 0), (-1, 3), (1, -1)])
def test_serre_table_depends_on_difference(m, n):
    assert gr.serre_ext_table(R, m, n).dims == gr.serre_ext_table(R, 0, n - m).dims


def test_serre_duality_shape():
    # Ext^1(O, O(-2)) is one-dimensional (the dualizing sheaf is O(-2))
    assert gr.serre_ext_table(R, 0, -2).dims[1] == 1
    assert gr.serre_ext_table(Q, 0, -2).dims[1] == 1


def test_local_cohomology_of_the_ring():
    lc = gr.local_cohomology_table(gr.free_graded_module(R), 2, (-8, 8))
    assert all(w.stabilized for w in lc.values())
    assert lc[0].nonzero_degrees() == [] and lc[1].nonzero_degrees() == []
    assert {d: v for d, v in lc[2].dims.items()} == {d: max(0, -d - 1) for d in range(-8, 9)}


def test_local_cohomology_of_a_torsion_module():
    T = gr.truncation_quotient(R, 3)
    lc = gr.local_cohomology_table(T, 2, (-3, 5))
    assert lc[0].dims == T.dims(-3, 5)
    assert not lc[1].nonzero_degrees() and not lc[2].nonzero_degrees()


def test_longexact_defects_vanish():
    for M in (gr.free_graded_module(R), gr.residue_field(R), gr.truncation_quotient(R, 2)):
        assert not any(gr.longexact_defects(M).values())


@pytest.mark.parametrize("S", [R, Q, K])
def test_chi_condition_holds(S):
    c = gr.chi_check(S)
    assert c.verdict == "PASS"


def test_chi_on_short_window_is_inconclusive():
    assert gr.chi_check(R, window=(0, 3)).verdict == "inconclusive"


def test_twist_bound_and_certificate():
    tb = gr.twist_bound(R)
    assert (tb.l, tb.cones, tb.d) == (-2, 2, 1)
    assert tb.observed_l == -1
    assert gr.twist_bound(K).cones == 1
    c = gr.twist_certificate(R, 3)
    assert c.verified and c.left == [-1, -1, -1] and c.middle == [0, 0, 0, 0]


def test_strong_generation_window():
    for S in (R, Q):
        w = gr.strong_gen_window(S)
        assert (w.a, w.b) == (-2, 8)
    w = gr.strong_gen_window(K)
    assert (w.a, w.b) == (0, 1)


def test_beilinson_pair_gives_kronecker():
    b = gr.tilting_bridge(R, [0, 1])
    assert b.tilting
    assert b.algebra.nv == 2 and len(b.algebra.quiver.arrows) == 2 and b.algebra.dim == 4


def test_non_tilting_twists_are_refused():
    with pytest.raises(gr.GradedError):
        gr.tilting_bridge(R, [0, 2])
    relaxed = gr.tilting_bridge(R, [0, 2], require_tilting=False)
    assert not relaxed.tilting and len(relaxed.algebra.quiver.arrows) == 3


def test_koszul_complex_resolves_residue_field():
    kz = gr.graded_koszul_complex([{(1, 0): 1}, {(0, 1): 1}], R)
    assert kz.is_complex(-3, 4)
    assert kz.homology_dims(0, -3, 4) == {e: int(e == 0) for e in range(-3, 5)}
    assert not any(kz.homology_dims(1, -3, 4).values())
    assert not any(kz.homology_dims(2, -3, 4).values())


def test_koszul_needs_central_elements():
    with pytest.raises(gr.GradedError):
        gr.graded_koszul_complex([{(1, 0): 1}], Q)
