"""Representability engine for cohomological functors of finite type.

The engine talks to a functor only through :class:`FunctorOracle`:
``eval`` (dimension of H(x)), ``pull`` (the matrix H(y) -> H(x) of a map
x -> y) and ``support`` (the shifts n with H(E[n]) ≠ 0). A natural
transformation ζ: h_A -> H is stored as the class ξ = ζ(id_A) ∈ H(A), so
ζ(g) = pull(g) ξ for any g: T -> A.

Stages: A_1 = ⊕_n E[n] ⊗ H(E[n]) with its tautological class; A_{i+1} is the
cone of a map B_i -> A_i built from generators of ker ζ_i on shifts of E,
minimised immediately, and ξ_{i+1} is a lift of ξ_i along the transition.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import complexes as cx
from . import exactlin as el
from .complexes import HomComplex, PerfComplex, PerfMap
from .exactlin import PRIME


class OracleError(ValueError):
    pass


def complex_key(P: PerfComplex) -> str:
    h = hashlib.sha1()
    h.update(repr((P.lo, P.verts)).encode())
    for d in P.diffs:
        h.update(np.ascontiguousarray(d).tobytes())
    return h.hexdigest()


class FunctorOracle:
    """Contravariant functor D -> vector spaces with chosen bases."""

    def eval(self, x: PerfComplex) -> int:
        raise NotImplementedError

    def pull(self, f: PerfMap, vec=None) -> np.ndarray:
        """Matrix of H(f): H(tgt) -> H(src); if ``vec`` is given, its image."""
        raise NotImplementedError

    def support(self, e: PerfComplex) -> list[int]:
        raise NotImplementedError


class ZeroOracle(FunctorOracle):
    def eval(self, x):
        return 0

    def pull(self, f, vec=None):
        if vec is not None:
            return np.zeros(0, dtype=np.int64)
        return el.zeros(0, 0)

    def support(self, e):
        return []


class RepresentedOracle(FunctorOracle):
    """H = Hom_D(-, X) for a hidden backing complex X."""

    def __init__(self, backing):
        self.__backing = cx.as_complex(backing)
        self._homs: dict[str, HomComplex] = {}
        self.calls = {"eval": 0, "pull": 0, "support": 0}

    def _hom(self, x: PerfComplex) -> HomComplex:
        k = complex_key(x)
        H = self._homs.get(k)
        if H is None:
            H = HomComplex(x, self.__backing)
            self._homs[k] = H
        return H

    def _coh(self, x):
        H = self._hom(x)
        return H, H.cohomology(0)

    def eval(self, x):
        self.calls["eval"] += 1
        return self._coh(x)[1].dim

    def pull(self, f, vec=None):
        self.calls["pull"] += 1
        Hs, Cs = self._coh(f.src)
        Ht, Ct = self._coh(f.tgt)
        if Ct.dim == 0 or Cs.dim == 0:
            if vec is not None:
                return np.zeros(Cs.dim, dtype=np.int64)
            return el.zeros(Cs.dim, Ct.dim)
        M = Ht.precompose_matrix(f, Hs, 0)
        if vec is not None:
            c = el.matmul(Ct.reps, np.asarray(vec, dtype=np.int64).reshape(-1, 1))
            return Cs.coords(el.matmul(M, c).ravel())
        img = el.matmul(M, Ct.reps)
        return np.stack([Cs.coords(img[:, j]) for j in range(Ct.dim)], axis=1)

    def support(self, e):
        self.calls["support"] += 1
        H = self._hom(e)
        return sorted(-n for n in H.window() if H.dim(n))


class MaskedOracle(FunctorOracle):
    """Proxy exposing only the oracle interface (no attribute access to the backing)."""

    __slots__ = ("_inner", "log")

    def __init__(self, inner: FunctorOracle):
        object.__setattr__(self, "_inner", inner)
        object.__setattr__(self, "log", [])

    def eval(self, x):
        self.log.append("eval")
        return self._inner.eval(x)

    def pull(self, f, vec=None):
        self.log.append("pull")
        return self._inner.pull(f, vec)

    def support(self, e):
        self.log.append("support")
        return self._inner.support(e)


# ----------------------------------------------------------------- the system


@dataclass
class Stage:
    obj: PerfComplex
    xi: np.ndarray
    generators: list = field(default_factory=list)  # (shift n, cocycle) of kernel generators used


@dataclass
class ResolutionSystem:
    oracle: FunctorOracle
    gens: list             # the generator set ℰ (perfect complexes)
    stages: list
    transitions: list      # transitions[i]: stages[i].obj -> stages[i+1].obj
    order: int = 1
    full: bool = False

    def __len__(self):
        return len(self.stages)

    @property
    def algebra(self):
        return self.gens[0].algebra

    def A(self, i: int) -> PerfComplex:
        """Stage i (1-based, matching A_1, A_2, ...)."""
        return self.stages[i - 1].obj

    def xi(self, i: int) -> np.ndarray:
        return self.stages[i - 1].xi

    def transition(self, i: int, j: int) -> PerfMap:
        """Composite A_i -> A_j (i ≤ j)."""
        f = cx.perf_identity(self.A(i))
        for k in range(i, j):
            f = self.transitions[k - 1].compose(f)
        return PerfMap(self.A(i), self.A(j), f.blocks)


def zeta(oracle: FunctorOracle, T: PerfComplex, A: PerfComplex, xi: np.ndarray):
    """ζ(T): Hom_D(T, A) -> H(T) as a matrix, with the Hom complex and cohomology."""
    H = HomComplex(T, A)
    C = H.cohomology(0)
    dT = oracle.eval(T)
    cols = []
    for j in range(C.dim):
        g = H.to_perf_map(C.reps[:, j], A)
        cols.append(oracle.pull(g, xi) if dT else np.zeros(0, dtype=np.int64))
    Z = np.stack(cols, axis=1) if cols else el.zeros(dT, 0)
    return H, C, Z.reshape(dT, C.dim) % PRIME


def _initial_stage(oracle, gens):
    A = gens[0].algebra
    pieces = []
    for gi, E in enumerate(gens):
        for n in oracle.support(E):
            d = oracle.eval(E.shift(n))
            pieces.extend([(gi, n, j) for j in range(d)])
    if not pieces:
        return Stage(cx.perf_zero(A), np.zeros(0, dtype=np.int64))
    objs = [gens[gi].shift(n) for gi, n, _ in pieces]
    S, incs, _ = cx.perf_direct_sum(objs)
    dS = oracle.eval(S)
    rows, rhs = [], []
    for (gi, n, j), inc in zip(pieces, incs):
        M = oracle.pull(inc)
        rows.append(M)
        t = np.zeros(M.shape[0], dtype=np.int64)
        t[j] = 1
        rhs.append(t)
    M = np.concatenate(rows, axis=0)
    b = np.concatenate(rhs)
    x, _ = el.linear_solve(M, b.reshape(-1, 1))
    if x is None or M.shape[1] != dS:
        raise OracleError("oracle is not additive on ⊕ E[n] ⊗ H(E[n])")
    return Stage(S, x.ravel())


def _kernel_window(E: PerfComplex, A: PerfComplex) -> list[int]:
    """Shifts n with Hom(E[n], A) possibly nonzero."""
    if E.is_zero() or A.is_zero():
        return []
    return sorted(-m for m in HomComplex(E, A).window())


def _kernel_generators(oracle, gens, A, xi, full: bool):
    """(generator index, shift n, cocycle) triples generating ⊕ ker ζ(E[n]).

    With ``full`` every kernel basis vector is used. Otherwise a greedy minimal
    generating set under precomposition with the maps E'[m] -> E[n] is chosen;
    killing the generators kills every kernel element.
    """
    keys = [(gi, n) for gi, E in enumerate(gens) for n in _kernel_window(E, A)]
    data = {}
    for gi, n in keys:
        T = gens[gi].shift(n)
        H, C, Z = zeta(oracle, T, A, xi)
        K = el.nullspace(Z) if C.dim else el.zeros(0, 0)
        data[(gi, n)] = (T, H, C, K)
    out = []
    if full:
        for key in keys:
            T, H, C, K = data[key]
            for j in range(K.shape[1]):
                out.append((key[0], key[1], el.matmul(C.reps, K[:, j:j + 1]).ravel()))
        return out
    spans = {key: el.zeros(data[key][2].dim, 0) for key in keys}
    endo = {}
    for key in keys:
        T, H, C, K = data[key]
        for j in range(K.shape[1]):
            k = K[:, j:j + 1]
            if el.rank(np.concatenate([spans[key], k], axis=1)) == spans[key].shape[1]:
                continue
            cochain = el.matmul(C.reps, k).ravel()
            out.append((key[0], key[1], cochain))
            for other in keys:
                Tm, Hm, Cm, Km = data[other]
                if Cm.dim == 0:
                    continue
                ek = (other, key)
                if ek not in endo:
                    He = HomComplex(Tm, T)
                    Ce = He.cohomology(0)
                    endo[ek] = [He.to_perf_map(Ce.reps[:, q], T) for q in range(Ce.dim)]
                new = []
                for phi in endo[ek]:
                    v = el.matmul(H.precompose_matrix(phi, Hm, 0), cochain.reshape(-1, 1)).ravel()
                    new.append(Cm.coords(v).reshape(-1, 1))
                if new:
                    spans[other] = el.column_space(np.concatenate([spans[other]] + new, axis=1))
    return out


def _check_functorial(oracle, f: PerfMap, g: PerfMap):
    """pull(g∘f) = pull(f) pull(g) on a composite the engine encountered."""
    lhs = oracle.pull(g.compose(f))
    rhs = el.matmul(oracle.pull(f), oracle.pull(g))
    if lhs.shape != rhs.shape or not np.array_equal(lhs % PRIME, rhs % PRIME):
        raise OracleError(f"oracle violates functoriality on a composite {f.src} -> {f.tgt} -> {g.tgt}")


def extend(sys: ResolutionSystem, check: bool = True) -> None:
    """Append one stage to the system."""
    oracle, G = sys.oracle, sys.gens
    st = sys.stages[-1]
    A = st.obj
    gens = _kernel_generators(oracle, G, A, st.xi, sys.full) if not A.is_zero() else []
    st.generators = gens
    if not gens:
        nxt = Stage(A, st.xi.copy())
        sys.stages.append(nxt)
        sys.transitions.append(cx.perf_identity(A))
        return
    objs = [G[gi].shift(n) for gi, n, _ in gens]
    B, _, projs = cx.perf_direct_sum(objs)
    psi = cx.perf_zero_map(B, A)
    for (_, _, cochain), T, p in zip(gens, objs, projs):
        k = HomComplex(T, A).to_perf_map(cochain, A)
        psi = psi + k.compose(p)
    psi = PerfMap(B, A, psi.blocks)
    tri = cx.cone(psi)
    C, F, G = cx.minimalize(tri.cone)
    t = PerfMap(A, C, F.compose(tri.to_cone).blocks)
    M = oracle.pull(t)
    x, _ = el.linear_solve(M, st.xi.reshape(-1, 1)) if M.shape[0] else (np.zeros((M.shape[1], 1), np.int64), None)
    if x is None:
        raise OracleError("class does not lift along the cone: oracle is not cohomological")
    if check and len(sys.transitions) >= 1:
        _check_functorial(oracle, sys.transitions[-1], t)
    sys.stages.append(Stage(C, x.ravel()))
    sys.transitions.append(t)


def generator_set(e, split: bool = True) -> list[PerfComplex]:
    """Normalise a generator or generator list to perfect complexes.

    With ``split``, a generator that is a sum of shifted projectives with zero
    differential (such as Λ) is replaced by its indecomposable summands; this
    leaves ⟨ℰ⟩_n unchanged, since levels are closed under sums and summands.
    """
    items = e if isinstance(e, (list, tuple)) else [e]
    out = []
    for x in items:
        P = cx.as_perf(x)
        if split and not any(d.any() for d in P.diffs):
            for i in range(P.lo, P.hi + 1):
                for v in dict.fromkeys(P.v(i)):
                    out.append(cx.perf_projective(P.algebra, [v], i))
        else:
            out.append(P)
    seen, uniq = set(), []
    for P in out:
        k = complex_key(P)
        if k not in seen:
            seen.add(k)
            uniq.append(P)
    return uniq


def build_resolution(h: FunctorOracle, e, steps: int, full: bool = False, check: bool = True,
                     split: bool = True) -> ResolutionSystem:
    """The 1-resolution (A_i, ζ_i), i = 1..steps, of h with respect to the generator set."""
    gens = generator_set(e, split)
    first = _initial_stage(h, gens)
    sys = ResolutionSystem(h, gens, [first], [], 1, full)
    if check and not first.obj.is_zero():
        ident = cx.perf_identity(first.obj)
        if not np.array_equal(h.pull(ident) % PRIME, el.eye(h.eval(first.obj))):
            raise OracleError("pull(id) is not the identity")
    while len(sys.stages) < steps:
        extend(sys, check)
    return sys


# ------------------------------------------------------------ kernel orders


def realize_perf_map(f: PerfMap) -> cx.ChainMap:
    src, tgt = f.src.realize(), f.tgt.realize()
    A = f.src.algebra
    blocks = {}
    for i in range(src.lo, src.hi + 1):
        blocks[i] = cx.realize_amatrix(A, f.at(i), f.src.v(i), f.tgt.v(i), src.term(i), tgt.term(i))
    return cx.ChainMap(src, tgt, blocks)


def postcompose_matrix(T: PerfComplex, t: PerfMap):
    """Matrix of g ↦ t∘g from Hom_D(T, src) to Hom_D(T, tgt), in cohomology coordinates."""
    H1 = HomComplex(T, t.src)
    H2 = HomComplex(T, t.tgt)
    C1, C2 = H1.cohomology(0), H2.cohomology(0)
    rt = realize_perf_map(t)
    cols = [C2.coords(H1.postcompose(C1.reps[:, j], rt, H2, 0)) for j in range(C1.dim)]
    return np.stack(cols, axis=1) if cols else el.zeros(C2.dim, 0)


@dataclass
class KernelOrderTable:
    entries: dict          # (test index, shift p) -> order (None if not reached)
    per_stage: dict        # (test index, p, i) -> minimal j
    global_order: int | None
    start: int


def kernel_order_table(sys: ResolutionSystem, tests, window: int = 2, shifts=None, start: int = 1,
                       max_j: int | None = None) -> KernelOrderTable:
    """For each test T and shift p: the least j such that A_i -> A_{i+j} kills ker ζ_i(T[p]).

    Stages before ``start`` are dropped. Orders are maximised over stages i with
    i + j within the system.
    """
    oracle = sys.oracle
    tests = [cx.as_perf(t) for t in tests]
    N = len(sys)
    shifts = range(-window, window + 1) if shifts is None else shifts
    entries, per_stage = {}, {}
    glob = 0
    for ti, T0 in enumerate(tests):
        for p in shifts:
            T = T0.shift(p)
            worst = 0
            for i in range(start, N):
                _, C, Z = zeta(oracle, T, sys.A(i), sys.xi(i))
                K = el.nullspace(Z) if C.dim else el.zeros(0, 0)
                if K.shape[1] == 0:
                    per_stage[(ti, p, i)] = 0
                    continue
                cur = K
                found = None
                top = N if max_j is None else min(N, i + max_j)
                for j in range(1, top - i + 1):
                    P = postcompose_matrix(T, sys.transitions[i + j - 2])
                    cur = el.matmul(P, cur) if P.size else el.zeros(P.shape[0], cur.shape[1])
                    if not cur.any():
                        found = j
                        break
                per_stage[(ti, p, i)] = found
                if found is None:
                    worst = None
                    break
                worst = max(worst, found)
            entries[(ti, p)] = worst
            if worst is None:
                glob = None
            elif glob is not None:
                glob = max(glob, worst)
    return KernelOrderTable(entries, per_stage, glob if glob != 0 else 1, start)


def surjectivity_check(sys: ResolutionSystem, tests, shifts) -> bool:
    for T0 in tests:
        T0 = cx.as_perf(T0)
        for p in shifts:
            T = T0.shift(p)
            for i in range(1, len(sys) + 1):
                _, C, Z = zeta(sys.oracle, T, sys.A(i), sys.xi(i))
                if el.rank(Z) != sys.oracle.eval(T):
                    return False
    return True


def compatibility_check(sys: ResolutionSystem) -> bool:
    for i in range(1, len(sys)):
        v = sys.oracle.pull(sys.transitions[i - 1], sys.xi(i + 1))
        if not np.array_equal(v % PRIME, sys.xi(i) % PRIME):
            return False
    return True


# ---------------------------------------------------------------------- theta


@dataclass
class Theta:
    matrix: np.ndarray      # columns: θ(v_k) in Hom_D(z, A_{2a}) coordinates
    maps: list              # θ(v_k) as chain maps z -> A_{2a}
    identity_ok: bool
    well_defined: bool


def theta_split(sys: ResolutionSystem, a: int, z) -> Theta:
    """θ(z): H(z) -> Hom_D(z, A_{2a}), v ↦ t∘(a ζ_a-preimage of v); checks ζ_{2a}∘θ = id."""
    if len(sys) < 2 * a:
        raise OracleError(f"system has {len(sys)} stages, θ needs {2 * a}")
    oracle = sys.oracle
    Z0 = cx.as_perf(z)
    Aa, A2a = sys.A(a), sys.A(2 * a)
    H, C, Z = zeta(oracle, Z0, Aa, sys.xi(a))
    dz = oracle.eval(Z0)
    if el.rank(Z) != dz:
        raise OracleError("z outside resolved class: ζ_a(z) is not surjective")
    t = sys.transition(a, 2 * a)
    P = postcompose_matrix(Z0, t)
    K = el.nullspace(Z) if C.dim else el.zeros(0, 0)
    well = not (el.matmul(P, K).any() if K.size and P.size else False)
    sol, _ = el.linear_solve(Z, el.eye(dz)) if dz else (el.zeros(C.dim, 0), None)
    mat = el.matmul(P, sol) if P.size else el.zeros(P.shape[0], dz)
    H2 = HomComplex(Z0, A2a)
    C2 = H2.cohomology(0)
    maps = [H2.to_perf_map(el.matmul(C2.reps, mat[:, k:k + 1]).ravel(), A2a) for k in range(dz)]
    _, _, Z2 = zeta(oracle, Z0, A2a, sys.xi(2 * a))
    ident = el.matmul(Z2, mat) if dz else el.zeros(0, 0)
    return Theta(mat, maps, bool(np.array_equal(ident % PRIME, el.eye(dz))), well)


# ---------------------------------------------------------------- pipeline


@dataclass
class PipelineResult:
    recovered: PerfComplex
    system: ResolutionSystem
    idempotent: PerfMap | None
    complement: PerfComplex | None


def representability_pipeline(h: FunctorOracle, e, n: int, gldim: int | None = None,
                              full: bool = False, split: bool = True) -> PipelineResult:
    """Recover an object N with Hom_D(-, N) ≅ H on ⟨e⟩_n.

    Q = A_{2n}; the Yoneda image of θ∘ζ_{2n} is e = t_{n→2n}∘g with g: Q -> A_n
    solving pull(g) ξ_n = ξ_{2n}; N is the image of the split idempotent.
    """
    sys = build_resolution(h, e, 2 * n, full=full, split=split)
    Q = sys.A(2 * n)
    Alg = sys.algebra
    if Q.is_zero():
        return PipelineResult(cx.perf_zero(Alg), sys, None, None)
    An = sys.A(n)
    H, C, Z = zeta(h, Q, An, sys.xi(n))
    sol, _ = el.linear_solve(Z, sys.xi(2 * n).reshape(-1, 1))
    if sol is None:
        raise OracleError("ξ_{2n} has no ζ_n-preimage on Q: oracle not cohomological or n too small")
    g = H.to_perf_map(el.matmul(C.reps, sol).ravel(), An)
    t = sys.transition(n, 2 * n)
    idem = PerfMap(Q, Q, t.compose(g).blocks)
    try:
        sp = cx.split_homotopy_idempotent(Q, idem, gldim)
    except cx.ComplexError as exc:
        raise OracleError(f"idempotent transport failed: {exc}") from None
    N, _, _ = cx.minimalize(sp.n1)
    return PipelineResult(N, sys, idem, sp.n2)
