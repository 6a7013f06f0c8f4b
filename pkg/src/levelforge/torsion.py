"""Torsion pairs, tilting and cotilting checks, hearts and quasi-abelian probes.

A torsion class is presented by generators G: T is the smallest class
containing G closed under quotients, extensions and finite sums, and
F = {M : Hom(G, M) = 0}. The torsion part of a module is computed as an
iterated trace of G. "For all objects" statements are checked on all
indecomposables when the algebra is a linearly oriented A_n (whose
indecomposables are the interval modules), and on seeded samples otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebra as al
from . import complexes as cx
from . import exactlin as el
from .algebra import Module, ModuleMap, PathAlgebra
from .exactlin import PRIME


class TorsionError(ValueError):
    pass


@dataclass
class TorsionPairSpec:
    algebra: PathAlgebra
    generators: list
    name: str = ""


# ---------------------------------------------------------- indecomposables


def is_linear_A(A: PathAlgebra) -> bool:
    if A.quiver.relations:
        return False
    n = A.nv
    arrows = sorted(zip(A.arrow_src, A.arrow_tgt))
    return arrows == [(i, i + 1) for i in range(n - 1)]


def interval_module(A: PathAlgebra, i: int, j: int) -> Module:
    """Interval module with k at vertex indices i..j and identity arrows inside."""
    dims = [int(i <= v <= j) for v in range(A.nv)]
    mats = []
    for s, t in zip(A.arrow_src, A.arrow_tgt):
        mats.append(el.eye(1) if dims[s] and dims[t] else el.zeros(dims[t], dims[s]))
    return Module(A, dims, mats, check=False)


def indecomposables(A: PathAlgebra, cap: int | None = None):
    """(label, module) for every indecomposable of dimension ≤ cap, or None if not enumerable."""
    if not is_linear_A(A):
        return None
    labels = A.quiver.vertices
    out = []
    for i in range(A.nv):
        for j in range(i, A.nv):
            if cap is None or j - i + 1 <= cap:
                out.append((f"M[{labels[i]},{labels[j]}]", interval_module(A, i, j)))
    return out


def _sample_modules(A: PathAlgebra, cap: int, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(samples):
        M = al.random_module(A, rng, max_dim=max(1, cap // max(1, A.nv)))
        if 0 < M.dim <= cap:
            out.append((f"sample{k}", M))
    return out


def objects_for(pair: TorsionPairSpec, cap: int, samples: int = 40, seed: int = 0):
    inds = indecomposables(pair.algebra, cap)
    if inds is not None:
        return inds, "exhaustive"
    return _sample_modules(pair.algebra, cap, samples, seed), "sampled"


# ------------------------------------------------------------ torsion part


def _trace(gens: list, M: Module) -> list:
    """Per vertex, a basis of the sum of images of all maps from the generators to M."""
    A = M.algebra
    parts = [[] for _ in range(A.nv)]
    for G in gens:
        for f in al.hom_space(G, M):
            for v, b in enumerate(f.blocks):
                if b.size:
                    parts[v].append(b)
    return [al.span_sum(p, M.dims[v]) for v, p in enumerate(parts)]


@dataclass
class TorsionDecomposition:
    t: Module
    f: Module
    inclusion: ModuleMap
    projection: ModuleMap
    steps: int


def torsion_part(pair: TorsionPairSpec, c: Module) -> TorsionDecomposition:
    """0 -> t -> c -> f -> 0 with t ∈ T and f ∈ F.

    t is the union of t_0 ⊂ t_1 ⊂ ... where t_{k+1}/t_k is the trace of the
    generators in c/t_k; it stabilises after at most dim c steps.
    """
    A = pair.algebra
    sub = [el.zeros(c.dims[v], 0) for v in range(A.nv)]
    steps = 0
    while True:
        Q, proj = al.quotient(c, sub)
        tr = _trace(pair.generators, Q)
        if all(b.shape[1] == 0 for b in tr):
            break
        steps += 1
        if steps > c.dim + 1:
            raise TorsionError("trace iteration did not stabilise")
        new = []
        for v in range(A.nv):
            # preimage of the trace under the projection c_v -> Q_v
            P = proj.blocks[v]
            pre = []
            for j in range(tr[v].shape[1]):
                x, _ = el.linear_solve(P, tr[v][:, j:j + 1])
                pre.append(x)
            cols = [sub[v]] + pre
            new.append(al.span_sum(cols, c.dims[v]))
        sub = new
    t, inc = al.submodule(c, sub)
    f, proj = al.quotient(c, sub)
    for G in pair.generators:
        if al.hom_dim(G, f):
            raise TorsionError("torsion-free part receives a map from a generator")
    return TorsionDecomposition(t, f, inc, proj, steps)


def in_T(pair: TorsionPairSpec, M: Module) -> bool:
    return torsion_part(pair, M).f.dim == 0


def in_F(pair: TorsionPairSpec, M: Module) -> bool:
    return all(al.hom_dim(G, M) == 0 for G in pair.generators)


def torsion_free_quotient(pair: TorsionPairSpec, M: Module):
    d = torsion_part(pair, M)
    return d.f, d.projection


# ------------------------------------------------------------- verdicts


@dataclass
class Verdict:
    verdict: str
    mode: str                     # exhaustive / sampled
    cap: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict in ("PASS", "COTILTING", "TILTING")


def classify(pair: TorsionPairSpec, cap: int = 6, samples: int = 40, seed: int = 0):
    objs, mode = objects_for(pair, cap, samples, seed)
    T, F, other = [], [], []
    for lab, M in objs:
        d = torsion_part(pair, M)
        if d.f.dim == 0:
            T.append((lab, M))
        elif d.t.dim == 0:
            F.append((lab, M))
        else:
            other.append((lab, M))
    return T, F, other, objs, mode


def is_torsion_pair(pair: TorsionPairSpec, exhaustive_dim_cap: int = 6, samples: int = 40, seed: int = 0) -> Verdict:
    """Hom(T, F) = 0 and existence and uniqueness of the decomposition on every tested object."""
    T, F, other, objs, mode = classify(pair, exhaustive_dim_cap, samples, seed)
    problems = []
    for lt, t in T:
        for lf, f in F:
            if al.hom_dim(t, f):
                problems.append(f"Hom({lt}, {lf}) != 0")
    for lab, c in objs:
        d = torsion_part(pair, c)
        if not in_T(pair, d.t):
            problems.append(f"torsion part of {lab} is not torsion")
        if not in_F(pair, d.f):
            problems.append(f"torsion-free part of {lab} is not torsion-free")
        # uniqueness: every image of a torsion object in c lies in t
        tsub = [d.inclusion.blocks[v] for v in range(c.algebra.nv)]
        for lt, tt in T:
            for g in al.hom_space(tt, c):
                for v, b in enumerate(g.blocks):
                    if b.size and el.rank(np.concatenate([tsub[v], b], axis=1)) != tsub[v].shape[1]:
                        problems.append(f"image of {lt} in {lab} escapes the torsion part")
    verdict = "PASS" if not problems else "FAIL"
    return Verdict(verdict, mode, exhaustive_dim_cap, {
        "T": [l for l, _ in T], "F": [l for l, _ in F], "mixed": [l for l, _ in other],
        "problems": problems})


def _sum_of_images(maps, X: Module) -> list:
    parts = [[] for _ in range(X.algebra.nv)]
    for f in maps:
        for v, b in enumerate(f.blocks):
            if b.size:
                parts[v].append(b)
    return [al.span_sum(p, X.dims[v]) for v, p in enumerate(parts)]


def cotilting_check(pair: TorsionPairSpec, cap: int = 6, samples: int = 40, seed: int = 0) -> Verdict:
    """Every tested object is a quotient of a finite sum of F-objects."""
    T, F, other, objs, mode = classify(pair, cap, samples, seed)
    witnesses, failures = {}, []
    for lab, X in objs:
        used, maps = [], []
        for lf, f in F:
            hs = al.hom_space(f, X)
            if hs:
                used.append((lf, len(hs)))
                maps.extend(hs)
        img = _sum_of_images(maps, X)
        if sum(b.shape[1] for b in img) == X.dim:
            witnesses[lab] = used
        else:
            failures.append(lab)
    return Verdict("COTILTING" if not failures else "NOT cotilting", mode, cap,
                   {"witnesses": witnesses, "failures": failures})


def tilting_check(pair: TorsionPairSpec, cap: int = 6, samples: int = 40, seed: int = 0) -> Verdict:
    """Every tested object is a subobject of a finite sum of T-objects."""
    T, F, other, objs, mode = classify(pair, cap, samples, seed)
    witnesses, failures = {}, []
    for lab, X in objs:
        used, kers = [], [el.eye(X.dims[v]) for v in range(X.algebra.nv)]
        for lt, t in T:
            hs = al.hom_space(X, t)
            if hs:
                used.append((lt, len(hs)))
            for g in hs:
                kers = [_intersect(kers[v], el.nullspace(g.blocks[v]) if g.blocks[v].shape[0] else el.eye(X.dims[v]))
                        for v in range(X.algebra.nv)]
        if all(k.shape[1] == 0 for k in kers):
            witnesses[lab] = used
        else:
            failures.append(lab)
    return Verdict("TILTING" if not failures else "NOT tilting", mode, cap,
                   {"witnesses": witnesses, "failures": failures})


def _intersect(U: np.ndarray, W: np.ndarray) -> np.ndarray:
    if U.shape[1] == 0 or W.shape[1] == 0:
        return el.zeros(U.shape[0], 0)
    K = el.nullspace(np.concatenate([U, (-W) % PRIME], axis=1))
    return el.column_space(el.matmul(U, K[:U.shape[1]]))


# ---------------------------------------------------------------- hearts


@dataclass
class HeartObject:
    complex: cx.Complex        # X^0 -> X^1
    h0: Module
    h1: Module
    label: str = ""


def two_term(M0: Module, M1: Module, f: ModuleMap | None) -> cx.Complex:
    A = M0.algebra
    if f is None:
        f = M0.zero_map(M1)
    return cx.Complex(A, 0, [M0, M1], [f])


def heart_objects(pair: TorsionPairSpec, cap: int = 6, seed: int = 0) -> list:
    """Two-term complexes X^0 -> X^1 of tested objects with H^0 ∈ F and H^1 ∈ T."""
    A = pair.algebra
    objs, _ = objects_for(pair, cap, seed=seed)
    objs = [("0", al.zero_module(A))] + objs
    rng = np.random.default_rng(seed)
    out = []
    for l0, M0 in objs:
        for l1, M1 in objs:
            hs = al.HomSpace(M0, M1)
            cands = [("0", None)] + [(f"b{k}", f) for k, f in enumerate(hs.basis)]
            if hs.dim > 1:
                cands.append(("rand", hs.element(rng.integers(1, PRIME, size=hs.dim))))
            for lab, f in cands:
                X = two_term(M0, M1, f)
                h0 = cx.homology(X, 0)
                h1 = cx.homology(X, 1)
                if in_F(pair, h0) and in_T(pair, h1) and (h0.dim or h1.dim):
                    out.append(HeartObject(X, h0, h1, f"{l0}->{l1}:{lab}"))
    return out


def _dhom(a, b) -> int:
    return cx.derived_hom_dims(a, b, window=0)[0]


def heart_check(pair: TorsionPairSpec, cap: int = 6, seed: int = 0) -> Verdict:
    """Every heart object X has F-part H^0(X) and T[-1]-part H^1(X)[-1], detected by derived Hom.

    Checks, over the tested F- and T-objects f', t':
    dim Hom_D(f', X) = dim Hom(f', H^0 X), dim Hom_D(X, t'[-1]) = dim Hom(H^1 X, t'),
    and Hom_D(f', t'[-1]) = 0.
    """
    T, F, other, objs, mode = classify(pair, cap, seed=seed)
    if mode == "exhaustive":
        pre = cotilting_check(pair, cap).passed or tilting_check(pair, cap).passed
        if not pre:
            raise TorsionError("heart check needs a tilting or cotilting pair")
    problems = []
    for lf, f in F:
        for lt, t in T:
            if _dhom(f, cx.shift(cx.module_complex(t), -1)):
                problems.append(f"Hom({lf}, {lt}[-1]) != 0")
    hearts = heart_objects(pair, cap, seed)
    for H in hearts:
        X = H.complex
        for lf, f in F:
            if _dhom(f, X) != al.hom_dim(f, H.h0):
                problems.append(f"F-part of {H.label} seen by {lf}")
        for lt, t in T:
            if _dhom(X, cx.shift(cx.module_complex(t), -1)) != al.hom_dim(H.h1, t):
                problems.append(f"T-part of {H.label} seen by {lt}")
    return Verdict("PASS" if not problems else "FAIL", mode, cap,
                   {"heart_objects": len(hearts), "problems": problems})


# ------------------------------------------------- strictness in F


@dataclass
class StrictReport:
    strict: bool
    rank_defect: int
    coimage_dim: int
    image_dim: int

    @property
    def verdict(self) -> str:
        return "STRICT" if self.strict else "NOT strict"


def strict_probe(pair: TorsionPairSpec, f: ModuleMap) -> StrictReport:
    """Compare coker ker f with ker coker f inside F.

    Kernels in F are the module kernels (F is closed under subobjects);
    cokernels in F are the torsion-free quotients of module cokernels. The
    coimage is src / ker f, the image is ker(tgt -> coker_F f), and the
    canonical map between them is induced by f.
    """
    if not (in_F(pair, f.src) and in_F(pair, f.tgt)):
        raise TorsionError("strict_probe needs a map between objects of F")
    coim_dim = f.rank()                      # src / ker f ≅ im f
    C, q = al.cokernel(f)
    Cf, phi = torsion_free_quotient(pair, C)
    to_cf = phi.compose(q)
    _, inc = al.kernel(to_cf)
    im_dim = inc.src.dim
    # the canonical map is injective (it is im f ⊂ ker(tgt -> coker_F)); its rank is coim_dim
    defect = im_dim - coim_dim
    return StrictReport(defect == 0, defect, coim_dim, im_dim)


def is_strict_epi(pair, p: ModuleMap) -> bool:
    C, q = al.cokernel(p)
    Cf, _ = torsion_free_quotient(pair, C)
    return Cf.dim == 0 and strict_probe(pair, p).strict


def is_strict_mono(pair, i: ModuleMap) -> bool:
    K, _ = al.kernel(i)
    return K.dim == 0 and strict_probe(pair, i).strict


def _random_F_object(F, rng, max_summands: int = 3):
    k = int(rng.integers(1, max_summands + 1))
    picks = [F[int(rng.integers(0, len(F)))][1] for _ in range(k)]
    S, _, _ = al.direct_sum(picks)
    return S


def _random_hom(M: Module, N: Module, rng) -> ModuleMap:
    hs = al.HomSpace(M, N)
    if hs.dim == 0:
        return M.zero_map(N)
    return hs.element(rng.integers(0, PRIME, size=hs.dim))


def pullback(p: ModuleMap, g: ModuleMap):
    """Pullback of p: A -> B along g: C -> B, with its maps to A and C."""
    A_, B_, C_ = p.src, p.tgt, g.src
    S, incs, projs = al.direct_sum([A_, C_])
    diff = ModuleMap(S, B_, [(pb - gb) % PRIME for pb, gb in
                             zip(p.compose(projs[0]).blocks, g.compose(projs[1]).blocks)])
    P, inc = al.kernel(diff)
    return P, projs[0].compose(inc), projs[1].compose(inc)


def pushout(pair, i: ModuleMap, g: ModuleMap):
    """Pushout in F of i: A -> B along g: A -> C (torsion-free quotient of the module pushout)."""
    A_, B_, C_ = i.src, i.tgt, g.tgt
    S, incs, projs = al.direct_sum([B_, C_])
    emb = ModuleMap(A_, S, [(a - b) % PRIME for a, b in
                            zip(incs[0].compose(i).blocks, incs[1].compose(g).blocks)])
    Q, q = al.cokernel(emb)
    Qf, phi = torsion_free_quotient(pair, Q)
    return Qf, phi.compose(q).compose(incs[0]), phi.compose(q).compose(incs[1])


@dataclass
class ProbeStats:
    samples: int
    epi_pass: int
    mono_pass: int

    @property
    def passed(self) -> int:
        return min(self.epi_pass, self.mono_pass)

    @property
    def all_strict(self) -> bool:
        return self.epi_pass == self.samples and self.mono_pass == self.samples


def quasi_abelian_probe(pair: TorsionPairSpec, samples: int = 200, seed: int = 0, cap: int = 6) -> ProbeStats:
    """Pullbacks of strict epis and pushouts of strict monos stay strict, on seeded samples."""
    _, F, _, _, _ = classify(pair, cap, seed=seed)
    if not F:
        return ProbeStats(samples, samples, samples)
    rng = np.random.default_rng(seed)
    epi_ok = mono_ok = 0
    for _ in range(samples):
        # strict epi p = (id_B, h): B ⊕ A' -> B
        B = _random_F_object(F, rng)
        Ap = _random_F_object(F, rng)
        S, incs, projs = al.direct_sum([B, Ap])
        h = _random_hom(Ap, B, rng)
        p = projs[0] + h.compose(projs[1])
        if not is_strict_epi(pair, p):
            raise TorsionError("generated epi is not strict")
        C = _random_F_object(F, rng)
        g = _random_hom(C, B, rng)
        _, _, pc = pullback(p, g)
        epi_ok += is_strict_epi(pair, pc)
        # strict mono i = (id_A; h'): A -> A ⊕ B'
        A1 = _random_F_object(F, rng)
        Bp = _random_F_object(F, rng)
        S2, incs2, _ = al.direct_sum([A1, Bp])
        i = incs2[0] + incs2[1].compose(_random_hom(A1, Bp, rng))
        if not is_strict_mono(pair, i):
            raise TorsionError("generated mono is not strict")
        C2 = _random_F_object(F, rng)
        g2 = _random_hom(A1, C2, rng)
        _, _, jc = pushout(pair, i, g2)
        mono_ok += is_strict_mono(pair, jc)
    return ProbeStats(samples, int(epi_ok), int(mono_ok))


# ------------------------------------------------ bounded chain probe


@dataclass
class ChainProbe:
    chains: int
    max_length: int
    bound: int
    stationary: bool


def noetherian_chain_probe(pair: TorsionPairSpec, chains: int = 20, seed: int = 0, cap: int = 6) -> ChainProbe:
    """Random ascending chains F_0 ⊂ F_1 ⊂ ... inside a module with coker(F_0 -> F_i) ∈ T.

    In a finite-length category every such chain is stationary after at most
    dim(ambient) - dim(F_0) strict steps; the probe records the longest chain.
    """
    A = pair.algebra
    rng = np.random.default_rng(seed)
    objs, _ = objects_for(pair, cap, seed=seed)
    longest, bound = 0, 0
    for _ in range(chains):
        k = int(rng.integers(1, 4))
        M, _, _ = al.direct_sum([objs[int(rng.integers(0, len(objs)))][1] for _ in range(k)])
        # F_0: the kernel of M -> (torsion part of M)-free quotient is t(M); take F_0 ⊂ M with M/F_0 torsion
        # F_0 = 0; every F_i lies in t(M), so coker(F_0 -> F_i) = F_i ∈ T
        d = torsion_part(pair, M)
        top = [d.inclusion.blocks[v] for v in range(A.nv)]
        cur = [el.zeros(M.dims[v], 0) for v in range(A.nv)]
        length = 0
        while True:
            gens = [(v, top[v][:, j]) for v in range(A.nv) for j in range(top[v].shape[1])
                    if el.rank(np.concatenate([cur[v], top[v][:, j:j + 1]], axis=1)) > cur[v].shape[1]]
            if not gens:
                break
            v, x = gens[int(rng.integers(0, len(gens)))]
            cur = _generated(M, cur, v, x)
            if not in_T(pair, al.submodule(M, cur)[0]):
                raise TorsionError("chain member left the torsion class")
            length += 1
            if length > M.dim:
                raise TorsionError("chain exceeded the dimension bound")
        longest = max(longest, length)
        bound = max(bound, M.dim)
    return ChainProbe(chains, longest, bound, longest <= bound)


def _generated(M: Module, cur: list, v: int, x: np.ndarray) -> list:
    """Submodule generated by cur and the element x ∈ M_v."""
    A = M.algebra
    cols = [list([cur[w]]) for w in range(A.nv)]
    for w in range(A.nv):
        for k in A.paths_between(v, w):
            cols[w].append(el.matmul(M.act(k), x.reshape(-1, 1)))
    return [al.span_sum(c, M.dims[w]) for w, c in enumerate(cols)]
