import numpy as np
import pytest
from hypothesis import given, strategies as st

from levelforge import algebra as al
from levelforge import brown as br
from levelforge import complexes as cx

seeds = st.integers(0, 2**32 - 1)


def _hom(S, X, w=6):
    H = cx.HomComplex(S, cx.as_complex(X))
    return {j: H.dim(-j) for j in range(-w, w + 1)}


@given(seeds, st.sampled_from([2, 3]))
def test_pipeline_recovers_the_backing(seed, n):
    rng = np.random.default_rng(seed)
    A = al.linear_A(n)
    X = cx.random_complex(A, rng, width=int(rng.integers(1, 5)))
    o = br.MaskedOracle(br.RepresentedOracle(X))
    res = br.representability_pipeline(o, cx.perf_free(A), 2)
    for S in al.standard_modules(A)[1]:
        Sp = cx.as_perf(S)
        assert _hom(Sp, res.recovered) == _hom(Sp, X)
        assert _hom(Sp, res.recovered) == {j: o.eval(Sp.shift(j)) for j in range(-6, 7)}


@given(seeds)
def test_resolution_is_compatible_and_surjective(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(2)
    X = cx.random_complex(A, rng, width=3)
    o = br.RepresentedOracle(X)
    sys = br.build_resolution(o, cx.perf_free(A), 3)
    assert len(sys) == 3
    assert br.compatibility_check(sys)
    assert br.surjectivity_check(sys, br.generator_set(cx.perf_free(A)), range(-2, 3))
    assert br.kernel_order_table(sys, [cx.perf_free(A)]).global_order == 1


def test_generator_set_splits_the_free_module():
    A = al.linear_A(3)
    gens = br.generator_set(cx.perf_free(A))
    assert [g.verts for g in gens] == [[[0]], [[1]], [[2]]]
    unsplit = br.generator_set(cx.perf_free(A), split=False)
    assert len(unsplit) == 1
    S = cx.as_perf(al.simple(A, 0))
    assert len(br.generator_set([S, S])) == 1


def test_zero_functor_gives_zero_object():
    A = al.linear_A(2)
    res = br.representability_pipeline(br.ZeroOracle(), cx.perf_free(A), 1)
    assert res.recovered.is_zero()


def test_masked_oracle_logs_queries():
    A = al.linear_A(2)
    o = br.MaskedOracle(br.RepresentedOracle(al.simple(A, 0)))
    assert o.eval(cx.perf_free(A)) == 1
    assert len(o.log) == 1


def test_brown_scenario_simple_top():
    A = al.linear_A(2)
    S1 = al.simple(A, 0)
    o = br.MaskedOracle(br.RepresentedOracle(S1))
    res = br.representability_pipeline(o, cx.perf_free(A), 2)
    h = {i: d for i, d in cx.homology_dims(res.recovered.realize()).items() if any(d)}
    assert h == {0: (1, 0)}


@given(seeds)
def test_theta_is_a_section(seed):
    rng = np.random.default_rng(seed)
    A = al.linear_A(2)
    X = cx.random_complex(A, rng, width=3)
    sys = br.build_resolution(br.RepresentedOracle(X), cx.perf_free(A), 4)
    for a in (1, 2):
        for p in (-1, 0, 1):
            th = br.theta_split(sys, a, cx.perf_free(A).shift(p))
            assert th.identity_ok and th.well_defined


def test_theta_needs_enough_stages():
    A = al.linear_A(2)
    sys = br.build_resolution(br.RepresentedOracle(al.simple(A, 0)), cx.perf_free(A), 2)
    with pytest.raises(br.OracleError):
        br.theta_split(sys, 2, cx.perf_free(A))


class _NotAFunctor(br.RepresentedOracle):
    """Dimensions of a represented functor, but pullbacks are scrambled."""

    def pull(self, f, vec=None):
        out = super().pull(f, vec)
        return (out * 0) if vec is None else out * 0


def test_non_functorial_oracle_is_detected():
    A = al.linear_A(2)
    with pytest.raises(br.OracleError):
        br.build_resolution(_NotAFunctor(al.free_module(A)), cx.perf_free(A), 3)
