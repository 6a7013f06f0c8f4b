"""Generation levels with checkable certificates.

A certificate is a finite tree describing how an object is assembled from
shifted copies of generators:

* ``Leaf(gen, shift, mult)``      the object ``E_gen[shift]`` repeated ``mult`` times;
* ``DirectSum(children)``         a finite direct sum;
* ``Cone(left, right, twist)``    an extension ``A -> X -> B -> A[1]`` realised as
  ``A ⊕ B`` with differential ``[[d_A, h], [0, d_B]]`` (``h``: B -> A[1]);
* ``Summand(child, obj, s, r)``   ``obj`` is a homotopy retract of the child
  (``r∘s ≃ id``).

Levels: a leaf has level 1, a direct sum takes the maximum, a cone adds the
levels of its two sides and a summand keeps the level of its child.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import algebra as al
from . import complexes as cx
from . import exactlin as el
from .complexes import ComplexError, HomComplex, PerfComplex, PerfMap
from .exactlin import PRIME


class CertificateError(ValueError):
    pass


@dataclass
class Leaf:
    gen: int
    shift: int = 0
    mult: int = 1


@dataclass
class DirectSum:
    children: list


@dataclass
class Cone:
    left: object
    right: object
    twist: dict = field(default_factory=dict)  # degree i -> algebra matrix B^i -> A^{i+1}


@dataclass
class Summand:
    child: object
    obj: PerfComplex
    s: dict  # obj -> child object, per degree
    r: dict  # child object -> obj


def level(cert) -> int:
    if isinstance(cert, Leaf):
        return 1
    if isinstance(cert, DirectSum):
        return max((level(c) for c in cert.children), default=1)
    if isinstance(cert, Cone):
        return level(cert.left) + level(cert.right)
    if isinstance(cert, Summand):
        return level(cert.child)
    raise CertificateError(f"unknown certificate node {type(cert).__name__}")


def size(cert) -> int:
    """Number of nodes (reported alongside the level, never used for ranking)."""
    if isinstance(cert, Leaf):
        return 1
    if isinstance(cert, DirectSum):
        return 1 + sum(size(c) for c in cert.children)
    if isinstance(cert, Cone):
        return 1 + size(cert.left) + size(cert.right)
    if isinstance(cert, Summand):
        return 1 + size(cert.child)
    raise CertificateError(f"unknown certificate node {type(cert).__name__}")


def _gens(gens) -> list[PerfComplex]:
    return [cx.as_perf(g) for g in gens]


def build(cert, gens, check: bool = True) -> PerfComplex:
    """Rebuild the object described by a certificate (bottom-up)."""
    gens = _gens(gens)
    return _build(cert, gens, check)


def _build(cert, gens, check):
    if isinstance(cert, Leaf):
        if not 0 <= cert.gen < len(gens):
            raise CertificateError(f"leaf refers to generator {cert.gen}, only {len(gens)} given")
        if cert.mult < 0:
            raise CertificateError("negative multiplicity")
        E = gens[cert.gen].shift(cert.shift)
        if cert.mult == 0:
            return cx.perf_zero(E.algebra)
        return cx.perf_direct_sum([E] * cert.mult)[0]
    if isinstance(cert, DirectSum):
        parts = [_build(c, gens, check) for c in cert.children]
        if not parts:
            return cx.perf_zero(gens[0].algebra)
        return cx.perf_direct_sum(parts)[0]
    if isinstance(cert, Cone):
        A_ = _build(cert.left, gens, check)
        B_ = _build(cert.right, gens, check)
        h = _blocks(cert.twist, B_, A_.shift(1))
        if check and not h.is_chain_map():
            raise CertificateError("attaching map is not a chain map B -> A[1]")
        try:
            return cx.twisted_sum(A_, B_, {i: h.at(i) for i in range(B_.lo, B_.hi + 1)})
        except ComplexError as exc:
            raise CertificateError(f"cone node: {exc}") from None
    if isinstance(cert, Summand):
        Y = _build(cert.child, gens, check)
        X = cert.obj
        if check:
            s = _blocks(cert.s, X, Y)
            r = _blocks(cert.r, Y, X)
            if not (s.is_chain_map() and r.is_chain_map()):
                raise CertificateError("summand maps are not chain maps")
            H = HomComplex(X, X)
            if H.homotopy(H.from_perf_map(r.compose(s) - cx.perf_identity(X))) is None:
                raise CertificateError("summand node: r∘s is not homotopic to the identity")
        return X
    raise CertificateError(f"unknown certificate node {type(cert).__name__}")


def _blocks(blocks: dict, src: PerfComplex, tgt: PerfComplex) -> PerfMap:
    A = src.algebra
    out = {}
    for i in range(src.lo, src.hi + 1):
        m = blocks.get(i)
        shape = (len(tgt.v(i)), len(src.v(i)), A.dim)
        if m is None:
            m = np.zeros(shape, dtype=np.int64)
        m = np.asarray(m, dtype=np.int64) % PRIME
        if m.shape != shape:
            raise CertificateError(f"map block in degree {i} has shape {m.shape}, expected {shape}")
        out[i] = m
    return PerfMap(src, tgt, out)


# ------------------------------------------------------------------ verification


@dataclass
class VerifyReport:
    passed: bool
    level: int
    size: int
    s: PerfMap | None = None
    r: PerfMap | None = None
    homotopy: np.ndarray | None = None
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def find_retraction(x: PerfComplex, Y: PerfComplex, seed: int = 0, tries: int = 3):
    """Maps s: x -> Y, r: Y -> x with r∘s ≃ id, and the homotopy; None if not found."""
    rng = np.random.default_rng(seed)
    Hxy = HomComplex(x, Y)
    Hyx = HomComplex(Y, x)
    Hxx = HomComplex(x, x)
    S = Hxy.cohomology(0)
    R = Hyx.cohomology(0)
    E = Hxx.cohomology(0)
    ident = cx.perf_identity(x)
    target = E.coords(Hxx.from_perf_map(ident))
    if E.dim == 0:
        # x is contractible: zero maps work, with a contracting homotopy
        s, r = PerfMap(x, Y, {}), PerfMap(Y, x, {})
        h = Hxx.homotopy(Hxx.from_perf_map(r.compose(s) - ident))
        return s, r, h
    if S.dim == 0 or R.dim == 0:
        return None
    r_maps = [Hyx.to_perf_map(R.reps[:, j], x) for j in range(R.dim)]
    for _ in range(tries):
        c = rng.integers(1, PRIME, size=S.dim)
        s_vec = el.matmul(S.reps, c.reshape(-1, 1)).ravel()
        s = Hxy.to_perf_map(s_vec, Y)
        cols = [E.coords(Hxx.from_perf_map(rj.compose(s))) for rj in r_maps]
        M = np.stack(cols, axis=1) if E.dim else el.zeros(0, len(cols))
        sol, _ = el.linear_solve(M, target.reshape(-1, 1))
        if sol is None:
            continue
        r_vec = el.matmul(R.reps, sol)
        r = Hyx.to_perf_map(r_vec.ravel(), x)
        defect = Hxx.from_perf_map(r.compose(s) - ident)
        h = Hxx.homotopy(defect)
        if h is None:
            continue
        if not np.array_equal(el.matmul(Hxx.differential(-1), h.reshape(-1, 1)).ravel() if h.size else
                              np.zeros_like(defect), defect % PRIME):
            continue
        return s, r, h
    return None


def verify_certificate(x, cert, gens, seed: int = 0) -> VerifyReport:
    """Rebuild the certificate's object Y and find s: x -> Y, r: Y -> x with r∘s ≃ id."""
    lv, sz = level(cert), size(cert)
    Y = build(cert, gens)
    P = cx.as_perf(x)
    if P.is_zero():
        return VerifyReport(True, lv, sz, reason="zero object")
    found = find_retraction(P, Y, seed)
    if found is None:
        return VerifyReport(False, lv, sz, reason="no retraction x -> Y -> x found")
    s, r, h = found
    return VerifyReport(True, lv, sz, s, r, h)


# ---------------------------------------------------------------- rewriting


def homotopy_blocks(H: HomComplex, h: np.ndarray, X: PerfComplex) -> dict:
    """Split a Hom^{-1}(X, X) cochain into per-degree maps k^i: X^i -> X^{i-1}."""
    km = H.to_perf_map(h, X, -1) if h.size else PerfMap(X, X.shift(-1), {})
    return {i: km.at(i) for i in range(X.lo, X.hi + 1)}


def star_rewrite_smd(cert, gens) -> Summand:
    """Turn Cone(Summand(A, A0, s, r), B, h) into Summand(Cone(A, B, s∘h), X, s', r').

    The retraction data of the inner summand is transported across the
    extension; the homotopy r∘s ≃ id supplies the off-diagonal block of r'.
    """
    if not (isinstance(cert, Cone) and isinstance(cert.left, Summand)):
        raise CertificateError("star_rewrite_smd expects Cone(Summand(...), ...)")
    gens = _gens(gens)
    inner = cert.left
    Y = _build(inner.child, gens, True)
    A0 = inner.obj
    B_ = _build(cert.right, gens, True)
    Alg = A0.algebra
    s = _blocks(inner.s, A0, Y)
    r = _blocks(inner.r, Y, A0)
    h = _blocks(cert.twist, B_, A0.shift(1))
    # homotopy k with r∘s - id = dk + kd on A0
    H = HomComplex(A0, A0)
    kvec = H.homotopy(H.from_perf_map(r.compose(s) - cx.perf_identity(A0)))
    if kvec is None:
        raise CertificateError("inner summand does not retract")
    k = homotopy_blocks(H, kvec, A0)
    # new twist s[1]∘h : B -> Y[1]; in degree i it is s^{i+1} h^i
    new_twist = {i: cx.amul(Alg, s.at(i + 1), h.at(i)) for i in range(B_.lo, B_.hi + 1)}
    X = cx.twisted_sum(A0, B_, {i: h.at(i) for i in range(B_.lo, B_.hi + 1)}) if not (A0.is_zero() and B_.is_zero()) \
        else cx.perf_zero(Alg)
    Yn = cx.twisted_sum(Y, B_, new_twist) if not (Y.is_zero() and B_.is_zero()) else cx.perf_zero(Alg)
    sp, rp = {}, {}
    for i in range(min(X.lo, Yn.lo), max(X.hi, Yn.hi) + 1):
        na, nb, ny = len(A0.v(i)), len(B_.v(i)), len(Y.v(i))
        sm = cx.azeros(Alg, ny + nb, na + nb)
        sm[:ny, :na] = s.at(i)
        sm[ny:, na:] = cx.aidentity(Alg, B_.v(i))
        rm = cx.azeros(Alg, na + nb, ny + nb)
        rm[:na, :ny] = r.at(i)
        # u^i = k^{i+1} h^i : B^i -> A0^i
        if nb and na and (i + 1) in k:
            rm[:na, ny:] = cx.amul(Alg, k[i + 1], h.at(i))
        rm[na:, ny:] = cx.aidentity(Alg, B_.v(i))
        sp[i], rp[i] = sm, rm
    return Summand(Cone(inner.child, cert.right, new_twist), X, sp, rp)


# ---------------------------------------------------------------- upper bounds


def _projective_leaf(A: al.PathAlgebra, verts, degree: int, free_gen: int):
    """Certificate for ⊕P_verts[-degree] as a summand of Λ^m[-degree]."""
    m = max((verts.count(v) for v in set(verts)), default=0)
    obj = cx.perf_projective(A, verts, degree)
    L = Leaf(free_gen, -degree, m)
    if sorted(verts) == sorted(list(range(A.nv)) * m) and verts == list(range(A.nv)) * m:
        return L, obj
    nv = A.nv
    s = cx.azeros(A, nv * m, len(verts))
    seen = {}
    for a, v in enumerate(verts):
        c = seen.get(v, 0)
        seen[v] = c + 1
        s[c * nv + v, a, A.idem[v]] = 1
    r = s.transpose(1, 0, 2).copy()
    return Summand(L, obj, {degree: s}, {degree: r}), obj


def stupid_filtration_certificate(P: PerfComplex, free_gen: int):
    """Certificate of level = width for a perfect complex, via its brutal truncations."""
    A = P.algebra
    if P.is_zero():
        return Leaf(free_gen, 0, 0)
    cert, _ = _projective_leaf(A, P.v(P.hi), P.hi, free_gen)
    for i in range(P.hi - 1, P.lo - 1, -1):
        if not P.v(i):
            continue
        leaf, obj = _projective_leaf(A, P.v(i), i, free_gen)
        twist = {i: P.d(i)}
        cert = Cone(cert, leaf, twist)
    return cert


def _is_zero_differential(P: PerfComplex) -> bool:
    return all(not d.any() for d in P.diffs)


def _width(P: PerfComplex) -> int:
    return sum(1 for i in range(P.lo, P.hi + 1) if P.v(i))


def _truncation_cert(P, free_gen):
    if _is_zero_differential(P):
        parts = [_projective_leaf(P.algebra, P.v(i), i, free_gen)[0] for i in range(P.lo, P.hi + 1) if P.v(i)]
        return DirectSum(parts) if len(parts) != 1 else parts[0]
    return stupid_filtration_certificate(P, free_gen)


@dataclass
class LevelBound:
    level: int | None
    cert: object | None
    verdict: str
    strategy: str = ""


def find_free_generator(gens) -> int | None:
    for j, g in enumerate(_gens(gens)):
        A = g.algebra
        if g.lo == g.hi == 0 and sorted(g.v(0)) == list(range(A.nv)):
            return j
    return None


def level_upper_bound(x, gens, search_cap: int = 8) -> LevelBound:
    """Best certified upper bound on the level of x with respect to gens (must contain Λ)."""
    j = find_free_generator(gens)
    if j is None:
        return LevelBound(None, None, f"unknown ≤ {search_cap}: generator set has no free module")
    try:
        P = cx.as_perf(x)
    except ComplexError as exc:
        return LevelBound(None, None, f"unknown ≤ {search_cap}: {exc}")
    A = P.algebra
    candidates = []
    c1 = _truncation_cert(P, j)
    candidates.append((level(c1) if not P.is_zero() else 1, "truncation", c1))
    if not A.quiver.relations and not P.is_zero():
        X = cx.as_complex(x)
        parts = []
        for i in range(X.lo, X.hi + 1):
            H = cx.homology(X, i)
            if H.dim == 0:
                continue
            R = cx.projective_model(cx.module_complex(H, i)).complex
            parts.append(_truncation_cert(R, j))
        if parts:
            c2 = parts[0] if len(parts) == 1 else DirectSum(parts)
            candidates.append((level(c2), "homology splitting", c2))
    candidates.sort(key=lambda t: t[0])
    lv, strat, cert = candidates[0]
    if lv > search_cap:
        return LevelBound(None, None, f"unknown ≤ {search_cap}", strat)
    return LevelBound(lv, cert, f"level ≤ {lv}", strat)


# ------------------------------------------------------------- orthogonality


def right_orthogonal_check(gens, x, window: int = 6) -> dict:
    """dim Hom_D(E_i[n], x) for |n| ≤ window, and the first nonzero entry."""
    X = cx.as_complex(x)
    table = {}
    first = None
    for i, g in enumerate(_gens(gens)):
        H = HomComplex(g, X)
        live = set(H.window())
        row = {}
        for n in range(-window, window + 1):
            # Hom(E[n], X) = H^{-n} Hom(E, X)
            d = H.dim(-n) if -n in live else 0
            row[n] = d
            if d and first is None:
                first = (i, n, d)
        table[i] = row
    verdict = "orthogonal in window" if first is None else f"nonzero: generator {first[0]} at n = {first[1]}"
    return {"table": table, "first_nonzero": first, "verdict": verdict}


# ----------------------------------------------------- diagonal bimodule bound


def enveloping_algebra(A: al.PathAlgebra, path_length_cap: int = al.DEFAULT_PATH_CAP) -> al.PathAlgebra:
    """A^op ⊗ A as a product-quiver path algebra; its right modules are A-bimodules.

    Vertices are pairs (u, v); a module value at (u, v) is e_u M e_v.
    """
    q = A.quiver
    V = list(range(A.nv))
    verts = [f"{q.vertices[u]}|{q.vertices[v]}" for u in V for v in V]
    name = lambda u, v: f"{q.vertices[u]}|{q.vertices[v]}"  # noqa: E731
    arrows, rels = [], []
    for ai, (s, t, lab) in enumerate(q.arrows):
        si, ti = A.arrow_src[ai], A.arrow_tgt[ai]
        for u in V:
            arrows.append((name(u, si), name(u, ti), f"R[{q.vertices[u]},{lab}]"))
        for v in V:
            arrows.append((name(ti, v), name(si, v), f"L[{lab},{q.vertices[v]}]"))
    for ai, (_, _, la) in enumerate(q.arrows):
        a_s, a_t = A.arrow_src[ai], A.arrow_tgt[ai]
        for bi, (_, _, lb) in enumerate(q.arrows):
            b_s, b_t = A.arrow_src[bi], A.arrow_tgt[bi]
            # (a_t, b_s) -> (a_s, b_s) -> (a_s, b_t)  equals  (a_t, b_s) -> (a_t, b_t) -> (a_s, b_t)
            p1 = [f"L[{la},{q.vertices[b_s]}]", f"R[{q.vertices[a_s]},{lb}]"]
            p2 = [f"R[{q.vertices[a_t]},{lb}]", f"L[{la},{q.vertices[b_t]}]"]
            rels.append([(1, p1), (-1, p2)])
    for rel in q.relations:
        for u in V:
            rels.append([(c, [f"R[{q.vertices[u]},{lab}]" for lab in path]) for c, path in rel])
        for v in V:
            rels.append([(c, [f"L[{lab},{q.vertices[v]}]" for lab in reversed(path)]) for c, path in rel])
    Q = al.Quiver.make(verts, arrows, rels)
    return al.path_algebra(Q, path_length_cap, name=f"{A.name}^e")


def diagonal_bimodule(A: al.PathAlgebra, Ae: al.PathAlgebra) -> al.Module:
    nv = A.nv
    dims = [len(A.paths_between(u, v)) for u in range(nv) for v in range(nv)]
    q = A.quiver
    mats = []
    for ai_e in range(len(Ae.arrow_src)):
        lab = Ae.quiver.arrows[ai_e][2]
        side, rest = lab[0], lab[2:-1]
        x, y = rest.split(",")
        if side == "R":
            u = q.vertex_index(_parse(x, q.vertices))
            ai = q.arrow_index(_parse(y, [a[2] for a in q.arrows]))
            s, t = A.arrow_src[ai], A.arrow_tgt[ai]
            src, tgt = A.paths_between(u, s), A.paths_between(u, t)
            ea = A.reduce((s, (ai,)))
            m = el.zeros(len(tgt), len(src))
            for c, k in enumerate(src):
                m[:, c] = A.multiply(_unit(A.dim, k), ea)[tgt]
        else:
            ai = q.arrow_index(_parse(x, [a[2] for a in q.arrows]))
            v = q.vertex_index(_parse(y, q.vertices))
            s, t = A.arrow_src[ai], A.arrow_tgt[ai]
            src, tgt = A.paths_between(t, v), A.paths_between(s, v)
            ea = A.reduce((s, (ai,)))
            m = el.zeros(len(tgt), len(src))
            for c, k in enumerate(src):
                m[:, c] = A.multiply(ea, _unit(A.dim, k))[tgt]
        mats.append(m)
    return al.Module(Ae, dims, mats)


def _parse(text, labels):
    for lab in labels:
        if str(lab) == text:
            return lab
    raise CertificateError(f"cannot parse label {text!r}")


def _unit(n, i):
    v = np.zeros(n, dtype=np.int64)
    v[i] = 1
    return v


@dataclass
class DiagonalBound:
    k: int
    projective_dimension: int
    resolution: PerfComplex
    enveloping: al.PathAlgebra


def diagonal_strong_generation_bound(A: al.PathAlgebra, cap: int | None = None) -> DiagonalBound:
    """k = pd of A as a bimodule + 1, with the bimodule resolution as witness."""
    Ae = enveloping_algebra(A)
    M = diagonal_bimodule(A, Ae)
    cap = 2 * A.nv + 2 if cap is None else cap
    res = cx.projective_resolution(M, cap)
    if not res.terminated:
        raise CertificateError(f"cap exceeded: bimodule resolution of the diagonal longer than {cap}")
    pd = -res.complex.lo
    return DiagonalBound(pd + 1, pd, res.complex, Ae)
