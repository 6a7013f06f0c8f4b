"""Bounded complexes over a path algebra and the derived-category primitives.

Two carriers are used:

``Complex``
    a bounded complex of arbitrary modules (quiver representations) with
    module-map differentials.
``PerfComplex``
    a bounded complex of projectives in standard form: degree ``i`` is the sum
    of indecomposable projectives ``P_v`` for ``v`` in ``verts(i)``, and the
    differential is an "algebra matrix" ``D`` of shape ``(rows, cols, dim A)``
    whose entry ``D[b, a]`` lies in ``e_{v_b} A e_{v_a}`` (the map
    ``P_{v_a} -> P_{v_b}`` is left multiplication by it).

Sign conventions: ``X[n]^i = X^{n+i}`` with differential ``(-1)^n d``; the cone
of ``f: A -> B`` is ``A^{i+1} + B^i`` with differential ``[[-d_A, 0], [f, d_B]]``.
Derived Homs out of a perfect complex ``P`` are the cohomology of the Hom
complex ``Hom^n(P, X) = prod_i Hom(P^i, X^{i+n})`` with ``D f = d f - (-1)^n f d``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import algebra as al
from . import exactlin as el
from .algebra import Module, ModuleMap, PathAlgebra
from .exactlin import PRIME


class ComplexError(ValueError):
    pass


# ------------------------------------------------------------- algebra matrices


def azeros(A: PathAlgebra, r: int, c: int) -> np.ndarray:
    return np.zeros((r, c, A.dim), dtype=np.int64)


def aidentity(A: PathAlgebra, verts) -> np.ndarray:
    n = len(verts)
    m = azeros(A, n, n)
    for a, v in enumerate(verts):
        m[a, a, A.idem[v]] = 1
    return m


def amul(A: PathAlgebra, m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Composite ``m ∘ n`` of algebra matrices (entries multiply as m[c,b]·n[b,a])."""
    c, b, d = m.shape
    b2, a, _ = n.shape
    if b != b2:
        raise ComplexError(f"algebra matrix shapes do not compose: {m.shape} ∘ {n.shape}")
    if c == 0 or a == 0 or b == 0:
        return azeros(A, c, a)
    left = m.transpose(0, 2, 1).reshape(c * d, b)
    right = n.reshape(b, a * d)
    pair = el.matmul(left, right).reshape(c, d, a, d).transpose(0, 2, 1, 3).reshape(c * a, d * d)
    out = el.matmul(pair, A.mult.reshape(d * d, d))
    return out.reshape(c, a, d)


def ablock(rows: list[list[np.ndarray]], A: PathAlgebra, rsizes, csizes) -> np.ndarray:
    """Assemble a block algebra matrix; ``None`` entries are zero."""
    out = azeros(A, sum(rsizes), sum(csizes))
    r0 = 0
    for i, row in enumerate(rows):
        c0 = 0
        for j, blk in enumerate(row):
            if blk is not None and blk.size:
                out[r0:r0 + rsizes[i], c0:c0 + csizes[j]] = blk
            c0 += csizes[j]
        r0 += rsizes[i]
    return out % PRIME


def left_mult_matrix(A: PathAlgebra, lam: np.ndarray, src: int, tgt: int, w: int) -> np.ndarray:
    """Matrix of ``x -> lam·x`` from paths(src -> w) to paths(tgt -> w), for lam in e_tgt A e_src."""
    cols = A.paths_between(src, w)
    rows = A.paths_between(tgt, w)
    if not cols or not rows:
        return el.zeros(len(rows), len(cols))
    full = np.einsum("i,ikm->mk", lam, A.mult[:, cols][:, :, rows]) % PRIME
    return full.astype(np.int64)


# --------------------------------------------------------------- module complexes


@dataclass
class Complex:
    """Bounded complex of modules; ``terms[k]`` sits in degree ``lo + k``."""

    algebra: PathAlgebra
    lo: int
    terms: list
    diffs: list

    def __post_init__(self):
        while self.terms and self.terms[-1].dim == 0:
            self.terms.pop()
            if self.diffs:
                self.diffs.pop()
        while self.terms and self.terms[0].dim == 0:
            self.terms.pop(0)
            if self.diffs:
                self.diffs.pop(0)
            self.lo += 1
        if not self.terms:
            self.lo = 0
            self.diffs = []
        if len(self.diffs) != max(0, len(self.terms) - 1):
            raise ComplexError("need one differential between consecutive terms")

    @property
    def hi(self) -> int:
        return self.lo + len(self.terms) - 1

    def is_zero(self) -> bool:
        return not self.terms

    def term(self, i: int) -> Module:
        if self.lo <= i <= self.hi:
            return self.terms[i - self.lo]
        return al.zero_module(self.algebra)

    def d(self, i: int) -> ModuleMap:
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return self.term(i).zero_map(self.term(i + 1))

    def check(self):
        for i in range(self.lo, self.hi):
            f = self.d(i)
            if not f.is_homomorphism():
                raise ComplexError(f"differential in degree {i} is not a module map")
            if i + 1 < self.hi and not self.d(i + 1).compose(f).is_zero():
                raise ComplexError(f"d∘d ≠ 0 at degree {i}")
        return self

    def dims(self) -> dict:
        return {i: self.term(i).dims for i in range(self.lo, self.hi + 1)}


def module_complex(M: Module, degree: int = 0) -> Complex:
    return Complex(M.algebra, degree, [M], [])


def zero_complex(A: PathAlgebra) -> Complex:
    return Complex(A, 0, [], [])


@dataclass
class ChainMap:
    src: Complex
    tgt: Complex
    blocks: dict = field(default_factory=dict)

    def at(self, i: int) -> ModuleMap:
        f = self.blocks.get(i)
        return f if f is not None else self.src.term(i).zero_map(self.tgt.term(i))

    def is_chain_map(self) -> bool:
        lo = min(self.src.lo, self.tgt.lo) - 1
        hi = max(self.src.hi, self.tgt.hi) + 1
        for i in range(lo, hi + 1):
            lhs = self.at(i + 1).compose(self.src.d(i))
            rhs = self.tgt.d(i).compose(self.at(i))
            if not (lhs - rhs).is_zero():
                return False
        return True


def identity_map(X: Complex) -> ChainMap:
    return ChainMap(X, X, {i: X.term(i).identity() for i in range(X.lo, X.hi + 1)})


def shift(X, n: int):
    """X[n]: degree i holds X^{n+i}, differential multiplied by (-1)^n."""
    if isinstance(X, PerfComplex):
        return X.shift(n)
    if X.is_zero():
        return X
    sign = -1 if n % 2 else 1
    return Complex(X.algebra, X.lo - n, list(X.terms), [f.scale(sign) for f in X.diffs])


def direct_sum_complexes(xs: list[Complex]) -> Complex:
    A = xs[0].algebra
    xs = [x for x in xs if not x.is_zero()]
    if not xs:
        return zero_complex(A)
    lo = min(x.lo for x in xs)
    hi = max(x.hi for x in xs)
    terms, incs, projs = [], [], []
    for i in range(lo, hi + 1):
        S, inc, proj = al.direct_sum([x.term(i) for x in xs])
        terms.append(S)
        incs.append(inc)
        projs.append(proj)
    diffs = []
    for k, i in enumerate(range(lo, hi)):
        f = terms[k].zero_map(terms[k + 1])
        for j, x in enumerate(xs):
            f = f + incs[k + 1][j].compose(x.d(i)).compose(projs[k][j])
        diffs.append(f)
    return Complex(A, lo, terms, diffs)


@dataclass
class Triangle:
    """A -f-> B -> C -> A[1] with C the cone of f."""

    f: object
    cone: object
    to_cone: object
    from_cone: object


def _module_cone(f: ChainMap) -> Triangle:
    A_, B_ = f.src, f.tgt
    Alg = A_.algebra
    if not f.is_chain_map():
        raise ComplexError("cone of an invalid chain map")
    lo = min(A_.lo - 1, B_.lo)
    hi = max(A_.hi - 1, B_.hi)
    terms, incs, projs = {}, {}, {}
    for i in range(lo, hi + 1):
        S, inc, proj = al.direct_sum([A_.term(i + 1), B_.term(i)])
        terms[i], incs[i], projs[i] = S, inc, proj
    diffs = []
    for i in range(lo, hi):
        a_next = incs[i + 1][0].compose(A_.d(i + 1).scale(-1)).compose(projs[i][0])
        fb = incs[i + 1][1].compose(f.at(i + 1)).compose(projs[i][0])
        b_next = incs[i + 1][1].compose(B_.d(i)).compose(projs[i][1])
        diffs.append(a_next + fb + b_next)
    C = Complex(Alg, lo, [terms[i] for i in range(lo, hi + 1)], diffs)
    # the trimming in Complex may move lo; rebuild block maps against C
    to_c = ChainMap(B_, C, {i: _retarget(incs[i][1], C.term(i)) for i in range(lo, hi + 1)})
    A1 = shift(A_, 1)
    from_c = ChainMap(C, A1, {i: _resource(projs[i][0], C.term(i), A1.term(i)) for i in range(lo, hi + 1)})
    return Triangle(f, C, to_c, from_c)


def _retarget(m: ModuleMap, tgt: Module) -> ModuleMap:
    return ModuleMap(m.src, tgt, m.blocks)


def _resource(m: ModuleMap, src: Module, tgt: Module) -> ModuleMap:
    return ModuleMap(src, tgt, m.blocks)


def cone(f) -> Triangle:
    """Mapping cone of a chain map (module or perfect flavour)."""
    if isinstance(f, PerfMap):
        return _perf_cone(f)
    return _module_cone(f)


def homology(X, i: int) -> Module:
    """H^i(X) = ker d^i / im d^{i-1} with the induced arrow action."""
    if isinstance(X, PerfComplex):
        X = X.realize()
    K, inc = al.kernel(X.d(i))
    prev = X.d(i - 1)
    # image of d^{i-1} expressed in kernel coordinates
    sub = []
    for v in range(X.algebra.nv):
        img = el.column_space(prev.blocks[v]) if prev.blocks[v].size else el.zeros(X.term(i).dims[v], 0)
        sub.append(el.LeftInverse(inc.blocks[v]).coords(img) if K.dims[v] else el.zeros(0, 0))
    return al.quotient(K, sub)[0]


def homology_dims(X) -> dict:
    if isinstance(X, PerfComplex):
        X = X.realize()
    return {i: homology(X, i).dims for i in range(X.lo, X.hi + 1)}


# ------------------------------------------------------------- perfect complexes


class PerfComplex:
    """Bounded complex of projectives in standard form (see module docstring)."""

    def __init__(self, algebra: PathAlgebra, lo: int, verts, diffs, check: bool = True):
        self.algebra = algebra
        verts = [list(v) for v in verts]
        diffs = [np.asarray(d, dtype=np.int64) % PRIME for d in diffs]
        while verts and not verts[-1]:
            verts.pop()
            if diffs:
                diffs.pop()
        while verts and not verts[0]:
            verts.pop(0)
            if diffs:
                diffs.pop(0)
            lo += 1
        if not verts:
            lo, diffs = 0, []
        self.lo = lo
        self.verts = verts
        self.diffs = diffs
        if len(diffs) != max(0, len(verts) - 1):
            raise ComplexError("need one differential between consecutive terms")
        for k, dmat in enumerate(diffs):
            if dmat.shape != (len(verts[k + 1]), len(verts[k]), algebra.dim):
                raise ComplexError(f"differential {lo + k} has shape {dmat.shape}")
        self._real = None
        if check:
            self.check()

    def __repr__(self):
        return f"PerfComplex(lo={self.lo}, verts={self.verts})"

    @property
    def hi(self) -> int:
        return self.lo + len(self.verts) - 1

    def is_zero(self) -> bool:
        return not self.verts

    def v(self, i: int) -> list:
        return self.verts[i - self.lo] if self.lo <= i <= self.hi else []

    def d(self, i: int) -> np.ndarray:
        if self.lo <= i < self.hi:
            return self.diffs[i - self.lo]
        return azeros(self.algebra, len(self.v(i + 1)), len(self.v(i)))

    def size(self) -> int:
        return sum(len(v) for v in self.verts)

    def check(self):
        A = self.algebra
        for i in range(self.lo, self.hi):
            D = self.d(i)
            for b, vb in enumerate(self.v(i + 1)):
                for a, va in enumerate(self.v(i)):
                    bad = [k for k in np.flatnonzero(D[b, a]) if (A.src[k], A.tgt[k]) != (vb, va)]
                    if bad:
                        raise ComplexError(f"entry ({b},{a}) of d^{i} leaves e_{vb} A e_{va}")
            if i + 1 < self.hi and amul(A, self.d(i + 1), D).any():
                raise ComplexError(f"d∘d ≠ 0 at degree {i}")
        return self

    def shift(self, n: int) -> "PerfComplex":
        sign = -1 if n % 2 else 1
        return PerfComplex(self.algebra, self.lo - n, self.verts, [(sign * d) % PRIME for d in self.diffs], check=False)

    def is_minimal(self) -> bool:
        return _find_unit(self) is None

    def realize(self) -> Complex:
        if self._real is None:
            A = self.algebra
            terms = [al.realize_projective(A, vs)[0] for vs in self.verts]
            diffs = [realize_amatrix(A, self.d(i), self.v(i), self.v(i + 1), terms[i - self.lo], terms[i + 1 - self.lo])
                     for i in range(self.lo, self.hi)]
            self._real = Complex(A, self.lo, terms, diffs) if terms else zero_complex(A)
        return self._real

    def summary(self) -> dict:
        labels = self.algebra.quiver.vertices
        return {str(i): [labels[v] for v in self.v(i)] for i in range(self.lo, self.hi + 1)}


def realize_amatrix(A: PathAlgebra, D: np.ndarray, src_verts, tgt_verts, src: Module | None = None,
                    tgt: Module | None = None) -> ModuleMap:
    """Module map ⊕P_{src} -> ⊕P_{tgt} represented by the algebra matrix D."""
    if src is None:
        src = al.realize_projective(A, src_verts)[0]
    if tgt is None:
        tgt = al.realize_projective(A, tgt_verts)[0]
    blocks = []
    for w in range(A.nv):
        rows = []
        for b, vb in enumerate(tgt_verts):
            row = []
            for a, va in enumerate(src_verts):
                row.append(left_mult_matrix(A, D[b, a], va, vb, w))
            rows.append(row)
        rs = [len(A.paths_between(vb, w)) for vb in tgt_verts]
        cs = [len(A.paths_between(va, w)) for va in src_verts]
        blk = el.zeros(sum(rs), sum(cs))
        r0 = 0
        for b, row in enumerate(rows):
            c0 = 0
            for a, m in enumerate(row):
                blk[r0:r0 + rs[b], c0:c0 + cs[a]] = m
                c0 += cs[a]
            r0 += rs[b]
        blocks.append(blk)
    return ModuleMap(src, tgt, blocks)


def element_to_column(A: PathAlgebra, verts, w: int, vec: np.ndarray) -> np.ndarray:
    """An element of (⊕P_verts) at vertex w, as a column (len(verts), dim) of algebra elements."""
    col = np.zeros((len(verts), A.dim), dtype=np.int64)
    pos = 0
    for b, vb in enumerate(verts):
        for k in A.paths_between(vb, w):
            col[b, k] = vec[pos]
            pos += 1
    return col % PRIME


def column_to_element(A: PathAlgebra, verts, w: int, col: np.ndarray) -> np.ndarray:
    parts = [col[b, A.paths_between(vb, w)] for b, vb in enumerate(verts)]
    return np.concatenate(parts).astype(np.int64) if parts else np.zeros(0, np.int64)


def perf_zero(A: PathAlgebra) -> PerfComplex:
    return PerfComplex(A, 0, [], [], check=False)


def perf_projective(A: PathAlgebra, verts, degree: int = 0) -> PerfComplex:
    return PerfComplex(A, degree, [list(verts)], [], check=False)


def perf_free(A: PathAlgebra, degree: int = 0) -> PerfComplex:
    return perf_projective(A, list(range(A.nv)), degree)


@dataclass
class PerfMap:
    """Degree-preserving chain map between perfect complexes (algebra matrices)."""

    src: PerfComplex
    tgt: PerfComplex
    blocks: dict = field(default_factory=dict)

    def at(self, i: int) -> np.ndarray:
        m = self.blocks.get(i)
        if m is None:
            return azeros(self.src.algebra, len(self.tgt.v(i)), len(self.src.v(i)))
        return m

    def degrees(self):
        return range(min(self.src.lo, self.tgt.lo), max(self.src.hi, self.tgt.hi) + 1)

    def compose(self, other: "PerfMap") -> "PerfMap":
        """self ∘ other."""
        A = self.src.algebra
        return PerfMap(other.src, self.tgt, {i: amul(A, self.at(i), other.at(i)) for i in other.src_degrees()
                                             if len(self.tgt.v(i))})

    def src_degrees(self):
        return range(self.src.lo, self.src.hi + 1)

    def __add__(self, other):
        return PerfMap(self.src, self.tgt, {i: (self.at(i) + other.at(i)) % PRIME for i in self.src_degrees()})

    def __sub__(self, other):
        return PerfMap(self.src, self.tgt, {i: (self.at(i) - other.at(i)) % PRIME for i in self.src_degrees()})

    def scale(self, c: int) -> "PerfMap":
        return PerfMap(self.src, self.tgt, {i: (self.at(i) * c) % PRIME for i in self.src_degrees()})

    def is_zero(self) -> bool:
        return all(not self.at(i).any() for i in self.src_degrees())

    def is_chain_map(self) -> bool:
        A = self.src.algebra
        for i in self.degrees():
            lhs = amul(A, self.at(i + 1), self.src.d(i))
            rhs = amul(A, self.tgt.d(i), self.at(i))
            if not np.array_equal(lhs, rhs):
                return False
        return True


def perf_identity(P: PerfComplex) -> PerfMap:
    return PerfMap(P, P, {i: aidentity(P.algebra, P.v(i)) for i in range(P.lo, P.hi + 1)})


def perf_zero_map(P: PerfComplex, Q: PerfComplex) -> PerfMap:
    return PerfMap(P, Q, {})


def perf_shift_map(f: PerfMap, n: int) -> PerfMap:
    """f[n]: the same blocks, reindexed (no sign, matching the shift convention)."""
    return PerfMap(f.src.shift(n), f.tgt.shift(n), {i - n: m for i, m in f.blocks.items()})


def perf_direct_sum(xs: list[PerfComplex]) -> tuple[PerfComplex, list[PerfMap], list[PerfMap]]:
    """Direct sum with its inclusions and projections."""
    A = xs[0].algebra
    live = [x for x in xs if not x.is_zero()]
    if not live:
        Z = perf_zero(A)
        return Z, [perf_zero_map(x, Z) for x in xs], [perf_zero_map(Z, x) for x in xs]
    lo = min(x.lo for x in live)
    hi = max(x.hi for x in live)
    verts = [sum((x.v(i) for x in xs), []) for i in range(lo, hi + 1)]
    diffs = []
    for i in range(lo, hi):
        rs = [len(x.v(i + 1)) for x in xs]
        cs = [len(x.v(i)) for x in xs]
        rows = [[x.d(i) if j == k else None for k in range(len(xs))] for j, x in enumerate(xs)]
        diffs.append(ablock(rows, A, rs, cs))
    S = PerfComplex(A, lo, verts, diffs, check=False)
    incs, projs = [], []
    for j, x in enumerate(xs):
        ib, pb = {}, {}
        for i in range(lo, hi + 1):
            off = sum(len(y.v(i)) for y in xs[:j])
            n = len(x.v(i))
            m = azeros(A, len(S.v(i)), n)
            m[off:off + n] = aidentity(A, x.v(i))
            ib[i] = m
            pb[i] = m.transpose(1, 0, 2).copy()
        incs.append(PerfMap(x, S, ib))
        projs.append(PerfMap(S, x, pb))
    return S, incs, projs


def perf_map_from_blocks(src, tgt, blocks):
    return PerfMap(src, tgt, {i: np.asarray(m, dtype=np.int64) % PRIME for i, m in blocks.items()})


def _perf_cone(f: PerfMap) -> Triangle:
    P, Q = f.src, f.tgt
    A = P.algebra
    if not f.is_chain_map():
        raise ComplexError("cone of an invalid chain map")
    if P.is_zero() and Q.is_zero():
        Z = perf_zero(A)
        return Triangle(f, Z, perf_zero_map(Q, Z), perf_zero_map(Z, P.shift(1)))
    los = [x for x in ((P.lo - 1) if not P.is_zero() else None, Q.lo if not Q.is_zero() else None) if x is not None]
    his = [x for x in ((P.hi - 1) if not P.is_zero() else None, Q.hi if not Q.is_zero() else None) if x is not None]
    lo, hi = min(los), max(his)
    verts = [P.v(i + 1) + Q.v(i) for i in range(lo, hi + 1)]
    diffs = []
    for i in range(lo, hi):
        rs = [len(P.v(i + 2)), len(Q.v(i + 1))]
        cs = [len(P.v(i + 1)), len(Q.v(i))]
        diffs.append(ablock([[(-P.d(i + 1)) % PRIME, None], [f.at(i + 1), Q.d(i)]], A, rs, cs))
    C = PerfComplex(A, lo, verts, diffs, check=False)
    to_c, from_c = {}, {}
    P1 = P.shift(1)
    for i in range(lo, hi + 1):
        nP, nQ = len(P.v(i + 1)), len(Q.v(i))
        m = azeros(A, nP + nQ, nQ)
        m[nP:] = aidentity(A, Q.v(i))
        to_c[i] = m
        m2 = azeros(A, nP, nP + nQ)
        m2[:, :nP] = aidentity(A, P.v(i + 1))
        from_c[i] = m2
    return Triangle(f, C, PerfMap(Q, C, to_c), PerfMap(C, P1, from_c))


def twisted_sum(A_: PerfComplex, B_: PerfComplex, h: dict) -> PerfComplex:
    """A ⊕ B with differential [[d_A, h], [0, d_B]], h^i: B^i -> A^{i+1}.

    Fits in the triangle A -> X -> B -> A[1]; requires d_A h + h d_B = 0.
    """
    Alg = A_.algebra
    live = [x for x in (A_, B_) if not x.is_zero()]
    if not live:
        return perf_zero(Alg)
    lo = min(x.lo for x in live)
    hi = max(x.hi for x in live)
    verts = [A_.v(i) + B_.v(i) for i in range(lo, hi + 1)]
    diffs = []
    for i in range(lo, hi):
        hb = h.get(i)
        rs = [len(A_.v(i + 1)), len(B_.v(i + 1))]
        cs = [len(A_.v(i)), len(B_.v(i))]
        diffs.append(ablock([[A_.d(i), hb], [None, B_.d(i)]], Alg, rs, cs))
    X = PerfComplex(Alg, lo, verts, diffs, check=False)
    X.check()
    return X


# --------------------------------------------------------------- Hom complexes


class HomComplex:
    """Hom complex from a perfect complex P into a module complex X.

    An element of Hom^n is a tuple of generator images f_{i,a} ∈ X^{i+n}(v_a),
    one per summand ``a`` of ``P^i``, laid out in degree-then-summand order.
    """

    def __init__(self, P: PerfComplex, X):
        if isinstance(X, PerfComplex):
            X = X.realize()
        self.P, self.X = P, X
        self.A = P.algebra
        self._layout = {}
        self._diff = {}
        self._coh = {}

    def window(self) -> range:
        if self.P.is_zero() or self.X.is_zero():
            return range(0)
        return range(self.X.lo - self.P.hi, self.X.hi - self.P.lo + 1)

    def layout(self, n: int):
        lay = self._layout.get(n)
        if lay is None:
            blocks, off = [], 0
            for i in range(self.P.lo, self.P.hi + 1):
                T = self.X.term(i + n)
                for a, v in enumerate(self.P.v(i)):
                    blocks.append((i, a, v, off, T.dims[v]))
                    off += T.dims[v]
            lay = (blocks, off)
            self._layout[n] = lay
        return lay

    def dim_cochains(self, n: int) -> int:
        return self.layout(n)[1]

    def block_index(self, n: int) -> dict:
        return {(i, a): (off, size) for i, a, _, off, size in self.layout(n)[0]}

    def differential(self, n: int) -> np.ndarray:
        """Matrix of D: Hom^n -> Hom^{n+1}."""
        D = self._diff.get(n)
        if D is not None:
            return D
        src_blocks, ncols = self.layout(n)
        rows = self.block_index(n + 1)
        nrows = self.layout(n + 1)[1]
        D = el.zeros(nrows, ncols)
        X, P = self.X, self.P
        sign = -1 if n % 2 == 0 else 1  # -(-1)^n
        for i, b, vb, off, size in src_blocks:
            if size == 0:
                continue
            r0, rs = rows[(i, b)]
            if rs:
                D[r0:r0 + rs, off:off + size] = X.d(i + n).blocks[vb]
            if i - 1 >= P.lo:
                dP = P.d(i - 1)
                T = X.term(i + n)
                for a2, va2 in enumerate(P.v(i - 1)):
                    lam = dP[b, a2]
                    if not lam.any():
                        continue
                    r1, rs1 = rows[(i - 1, a2)]
                    if rs1 == 0:
                        continue
                    act = T.act_element(lam, vb, va2)
                    D[r1:r1 + rs1, off:off + size] = (D[r1:r1 + rs1, off:off + size] + sign * act) % PRIME
        self._diff[n] = D
        return D

    def cohomology(self, n: int) -> "HomDegree":
        h = self._coh.get(n)
        if h is None:
            N = self.dim_cochains(n)
            Z = el.nullspace(self.differential(n)) if N else el.zeros(0, 0)
            prev = self.differential(n - 1)
            B = el.column_space(prev) if prev.size else el.zeros(N, 0)
            reps = el.complement_basis(B, Z) if Z.shape[1] else el.zeros(N, 0)
            h = HomDegree(n, reps, B, Z)
            self._coh[n] = h
        return h

    def dim(self, n: int) -> int:
        return self.cohomology(n).dim

    def dims(self, window=None) -> dict:
        ns = self.window() if window is None else window
        return {n: self.dim(n) for n in ns}

    def precompose_matrix(self, g: PerfMap, other: "HomComplex", n: int) -> np.ndarray:
        """Matrix of c ↦ c∘g from Hom^n(P, X) (self) to Hom^n(P', X) (other), g: P' -> P."""
        P2 = g.src
        rows = other.block_index(n)
        cols = self.block_index(n)
        M = el.zeros(other.dim_cochains(n), self.dim_cochains(n))
        X = self.X
        for i in range(P2.lo, P2.hi + 1):
            G = g.at(i)
            T = X.term(i + n)
            for a2, va2 in enumerate(P2.v(i)):
                r0, rs = rows[(i, a2)]
                if rs == 0:
                    continue
                for b, vb in enumerate(self.P.v(i)):
                    lam = G[b, a2]
                    if not lam.any():
                        continue
                    c0, cs = cols[(i, b)]
                    if cs == 0:
                        continue
                    M[r0:r0 + rs, c0:c0 + cs] = (M[r0:r0 + rs, c0:c0 + cs] + T.act_element(lam, vb, va2)) % PRIME
        return M

    def postcompose(self, vec: np.ndarray, h: ChainMap, other: "HomComplex", n: int) -> np.ndarray:
        """h∘c for a degree-0 module chain map h: X -> Y (other = HomComplex(P, Y))."""
        out = np.zeros(other.dim_cochains(n), dtype=np.int64)
        rows = other.block_index(n)
        for i, a, v, off, size in self.layout(n)[0]:
            r0, rs = rows[(i, a)]
            if rs and size:
                out[r0:r0 + rs] = el.matmul(h.at(i + n).blocks[v], vec[off:off + size].reshape(-1, 1)).ravel()
        return out

    def to_perf_map(self, vec: np.ndarray, Q: PerfComplex, n: int = 0) -> PerfMap:
        """Read a cocycle of Hom^n(P, real Q) as a chain map P -> Q[n]."""
        A = self.A
        Qn = Q.shift(n)
        blocks = {}
        for i, a, v, off, size in self.layout(n)[0]:
            m = blocks.setdefault(i, azeros(A, len(Qn.v(i)), len(self.P.v(i))))
            if size:
                m[:, a, :] = element_to_column(A, Q.v(i + n), v, vec[off:off + size])
        return PerfMap(self.P, Qn, blocks)

    def from_perf_map(self, f: PerfMap, n: int = 0) -> np.ndarray:
        """Inverse of ``to_perf_map``: cochain of a map P -> Q[n] (self.X = real Q)."""
        Q = f.tgt.shift(-n)
        vec = np.zeros(self.dim_cochains(n), dtype=np.int64)
        for i, a, v, off, size in self.layout(n)[0]:
            if size:
                vec[off:off + size] = column_to_element(self.A, Q.v(i + n), v, f.at(i)[:, a, :])
        return vec

    def homotopy(self, vec: np.ndarray, n: int = 0):
        """h ∈ Hom^{n-1} with D h = vec, or None when vec is not a coboundary."""
        D = self.differential(n - 1)
        if D.shape[1] == 0:
            return np.zeros(0, dtype=np.int64) if not np.any(vec % PRIME) else None
        x, _ = el.linear_solve(D, vec.reshape(-1, 1))
        return None if x is None else x.ravel()


@dataclass
class HomDegree:
    n: int
    reps: np.ndarray        # columns: cocycles representing a basis
    boundaries: np.ndarray  # columns: basis of coboundaries
    cycles: np.ndarray

    def __post_init__(self):
        self.dim = self.reps.shape[1]
        self._inv = None

    def coords(self, z: np.ndarray) -> np.ndarray:
        """Coordinates of a cocycle modulo coboundaries in the ``reps`` basis."""
        if self.dim == 0:
            return np.zeros(0, dtype=np.int64)
        if self._inv is None:
            self._inv = el.LeftInverse(np.concatenate([self.reps, self.boundaries], axis=1))
        return self._inv.coords(np.asarray(z, dtype=np.int64) % PRIME)[: self.dim]

    def is_coboundary(self, z: np.ndarray) -> bool:
        if self.boundaries.shape[1] == 0:
            return not np.any(np.asarray(z) % PRIME)
        return el.rank(np.concatenate([self.boundaries, np.asarray(z).reshape(-1, 1)], axis=1)) == self.boundaries.shape[1]


# --------------------------------------------------------- projective models


@dataclass
class Resolution:
    complex: PerfComplex
    gens: dict          # degree -> list of generator images in X^i(v_a)
    terminated: bool
    target: Complex


def default_gldim_cap(A: PathAlgebra) -> int:
    return A.nv + 1


def projective_model(X, gldim_cap: int | None = None, strict: bool = True, minimal: bool = True) -> Resolution:
    """Perfect complex P with a quasi-isomorphism P -> X.

    Built by descending induction: P^i covers the cycles of the partial cone in
    degree i. Below the support of X at most ``gldim_cap`` further terms are
    allowed; beyond that ``strict`` raises "infinite global dimension", else the
    truncated model is returned with ``terminated = False``.
    """
    if isinstance(X, Module):
        X = module_complex(X)
    A = X.algebra
    cap = default_gldim_cap(A) if gldim_cap is None else gldim_cap
    if X.is_zero():
        return Resolution(perf_zero(A), {}, True, X)
    verts, dmats, gens = {}, {}, {}
    real = {}
    fmaps = {}
    terminated = True
    i = X.hi
    while True:
        Pn = real.get(i + 1) or al.zero_module(A)
        Pnn = real.get(i + 2) or al.zero_module(A)
        Xi, Xn = X.term(i), X.term(i + 1)
        blocks = []
        dP = (realize_amatrix(A, dmats[i + 1], verts[i + 1], verts.get(i + 2, []), Pn, Pnn)
              if i + 1 in dmats else Pn.zero_map(Pnn))
        fP = fmaps.get(i + 1) or Pn.zero_map(Xn)
        dX = X.d(i)
        for w in range(A.nv):
            top = np.concatenate([dP.blocks[w], el.zeros(Pnn.dims[w], Xi.dims[w])], axis=1)
            bot = np.concatenate([fP.blocks[w], dX.blocks[w]], axis=1)
            blocks.append(np.concatenate([top, bot], axis=0))
        amb, _, _ = al.direct_sum([Pn, Xi])
        cod, _, _ = al.direct_sum([Pnn, Xn])
        K, inc = al.kernel(ModuleMap(amb, cod, blocks))
        if K.dim == 0 and i < X.lo:
            break
        if i < X.lo - cap:
            terminated = False
            if strict:
                raise ComplexError("infinite global dimension: projective model does not terminate "
                                   f"within {cap} steps below degree {X.lo}")
            break
        tops = al.top_generators(K)
        vs = [v for v, _ in tops]
        verts[i] = vs
        D = azeros(A, len(verts.get(i + 1, [])), len(vs))
        g = []
        for a, (v, vec) in enumerate(tops):
            full = el.matmul(inc.blocks[v], vec.reshape(-1, 1)).ravel()
            p, x = full[: Pn.dims[v]], full[Pn.dims[v]:]
            if verts.get(i + 1):
                D[:, a, :] = (-element_to_column(A, verts[i + 1], v, p)) % PRIME
            g.append(x)
        if i + 1 in verts:
            dmats[i] = D
        gens[i] = g
        P_i, _ = al.realize_projective(A, vs)
        real[i] = P_i
        fmaps[i] = ModuleMap(P_i, Xi, [_gens_block(A, vs, g, Xi, w) for w in range(A.nv)])
        i -= 1
    if not verts:
        return Resolution(perf_zero(A), {}, terminated, X)
    lo, hi = min(verts), max(verts)
    vlist = [verts.get(k, []) for k in range(lo, hi + 1)]
    dl = [dmats.get(k, azeros(A, len(verts.get(k + 1, [])), len(verts.get(k, [])))) for k in range(lo, hi)]
    P = PerfComplex(A, lo, vlist, dl, check=False)
    gens = {k: gens.get(k, []) for k in range(P.lo, P.hi + 1)}
    res = Resolution(P, gens, terminated, X)
    if minimal and not P.is_minimal():
        Pm, F, G = minimalize(P)
        res = Resolution(Pm, precompose_gens(res.gens, G, X), terminated, X)
    return res


def _gens_block(A, verts, g, X: Module, w: int) -> np.ndarray:
    cols = []
    for a, v in enumerate(verts):
        for k in A.paths_between(v, w):
            cols.append(el.matmul(X.act(k), g[a].reshape(-1, 1)))
    return np.concatenate(cols, axis=1) if cols else el.zeros(X.dims[w], 0)


def precompose_gens(gens: dict, g: PerfMap, X: Complex) -> dict:
    """Generator images of (f∘g) for f: P -> X given by generator images."""
    out = {}
    P2, P = g.src, g.tgt
    for i in range(P2.lo, P2.hi + 1):
        T = X.term(i)
        G = g.at(i)
        row = []
        for a2, va2 in enumerate(P2.v(i)):
            acc = np.zeros(T.dims[va2], dtype=np.int64)
            for b, vb in enumerate(P.v(i)):
                lam = G[b, a2]
                if lam.any() and T.dims[vb]:
                    acc = (acc + el.matmul(T.act_element(lam, vb, va2), gens[i][b].reshape(-1, 1)).ravel()) % PRIME
            row.append(acc)
        out[i] = row
    return out


def projective_resolution(M: Module, length_cap: int = 8) -> Resolution:
    """Minimal projective resolution of a module, truncated after ``length_cap`` syzygies."""
    return projective_model(module_complex(M), gldim_cap=length_cap, strict=False)


def as_perf(x, gldim_cap: int | None = None) -> PerfComplex:
    """Perfect (minimal) model of a module, module complex or perfect complex."""
    if isinstance(x, PerfComplex):
        return x
    if isinstance(x, Module):
        x = module_complex(x)
    cached = getattr(x, "_perf_model", None)
    if cached is None:
        cached = projective_model(x, gldim_cap).complex
        x._perf_model = cached
    return cached


def as_complex(x) -> Complex:
    if isinstance(x, PerfComplex):
        return x.realize()
    if isinstance(x, Module):
        return module_complex(x)
    return x


# ------------------------------------------------------------------ derived Homs


@dataclass
class DerivedHom:
    source: PerfComplex
    target: Complex
    hom: HomComplex
    dims: dict

    def basis(self, n: int) -> np.ndarray:
        return self.hom.cohomology(n).reps

    def coords(self, n: int, z: np.ndarray) -> np.ndarray:
        return self.hom.cohomology(n).coords(z)


def hom_in_derived(a, b, gldim_cap: int | None = None, window=None) -> DerivedHom:
    """Hom_D(a, b[n]) for every n where it can be nonzero, with cocycle representatives."""
    P = as_perf(a, gldim_cap)
    X = as_complex(b)
    H = HomComplex(P, X)
    return DerivedHom(P, X, H, H.dims(window))


def derived_hom_dims(a, b, window: int = 6, gldim_cap: int | None = None) -> dict:
    """dim Hom_D(a, b[j]) for |j| ≤ window (zeros filled in)."""
    H = HomComplex(as_perf(a, gldim_cap), as_complex(b))
    live = set(H.window())
    return {j: (H.dim(j) if j in live else 0) for j in range(-window, window + 1)}


def ext_dims(M, N, i_max: int, gldim_cap: int | None = None) -> list[int]:
    H = HomComplex(as_perf(M, gldim_cap), as_complex(N))
    live = set(H.window())
    return [H.dim(i) if i in live else 0 for i in range(i_max + 1)]


def is_null_homotopic(f: PerfMap) -> bool:
    H = HomComplex(f.src, f.tgt)
    return H.homotopy(H.from_perf_map(f)) is not None


# --------------------------------------------------------------- minimal models


def _find_unit(P: PerfComplex):
    A = P.algebra
    for i in range(P.lo, P.hi):
        D = P.d(i)
        for b, vb in enumerate(P.v(i + 1)):
            for a, va in enumerate(P.v(i)):
                if va == vb and D[b, a, A.idem[va]] % PRIME:
                    return i, a, b
    return None


def _eliminate(P: PerfComplex, i: int, a: int, b: int):
    """Gaussian elimination of the unit entry d^i[b, a]; returns (P', F: P -> P', G: P' -> P)."""
    A = P.algebra
    D = P.d(i)
    v = P.v(i)[a]
    phinv = A.unit_inverse(D[b, a], v)[None, None, :]
    keep_a = [k for k in range(len(P.v(i))) if k != a]
    keep_b = [k for k in range(len(P.v(i + 1))) if k != b]
    beta = D[b:b + 1, keep_a]          # P^i' -> P_b
    gamma = D[keep_b][:, a:a + 1]      # P_a -> P^{i+1}'
    delta = D[keep_b][:, keep_a]
    corr = amul(A, amul(A, gamma, phinv), beta)
    new_diffs = {}
    verts = {k: list(P.v(k)) for k in range(P.lo, P.hi + 1)}
    verts[i] = [P.v(i)[k] for k in keep_a]
    verts[i + 1] = [P.v(i + 1)[k] for k in keep_b]
    for k in range(P.lo, P.hi):
        if k == i:
            new_diffs[k] = (delta - corr) % PRIME
        elif k == i - 1:
            new_diffs[k] = P.d(k)[keep_a]
        elif k == i + 1:
            new_diffs[k] = P.d(k)[:, keep_b]
        else:
            new_diffs[k] = P.d(k)
    P2 = PerfComplex(A, P.lo, [verts[k] for k in range(P.lo, P.hi + 1)],
                     [new_diffs[k] for k in range(P.lo, P.hi)], check=False)
    F, G = {}, {}
    for k in range(P.lo, P.hi + 1):
        if k == i:
            F[k] = aidentity(A, P.v(k))[keep_a]
            g = aidentity(A, P.v(k))[:, keep_a].copy()
            g[a:a + 1] = (-amul(A, phinv, beta)) % PRIME
            G[k] = g
        elif k == i + 1:
            f = aidentity(A, P.v(k))[keep_b].copy()
            f[:, b:b + 1] = (-amul(A, gamma, phinv)) % PRIME
            F[k] = f
            G[k] = aidentity(A, P.v(k))[:, keep_b].copy()
        else:
            F[k] = aidentity(A, P.v(k))
            G[k] = aidentity(A, P.v(k))
    return P2, PerfMap(P, P2, F), PerfMap(P2, P, G)


def minimalize(P: PerfComplex) -> tuple[PerfComplex, PerfMap, PerfMap]:
    """Homotopy-equivalent minimal complex with maps F: P -> P_min, G: P_min -> P."""
    F = perf_identity(P)
    G = perf_identity(P)
    cur = P
    while True:
        hit = _find_unit(cur)
        if hit is None:
            break
        nxt, f, g = _eliminate(cur, *hit)
        F = f.compose(F)
        G = G.compose(g)
        cur = nxt
    F = PerfMap(P, cur, F.blocks)
    G = PerfMap(cur, P, G.blocks)
    return cur, F, G


def transport(e: PerfMap, F: PerfMap, G: PerfMap) -> PerfMap:
    """F ∘ e ∘ G."""
    return F.compose(e).compose(G)


# --------------------------------------------------------------- Koszul complex


def koszul_complex(generators, base):
    """Koszul complex ⊗_i (R --z_i--> R) on central, pairwise commuting elements.

    ``base`` is a ``PathAlgebra`` (elements as basis vectors) or a graded ring
    from :mod:`levelforge.graded` (delegated there).
    """
    if not isinstance(base, PathAlgebra):
        from .graded import graded_koszul_complex
        return graded_koszul_complex(generators, base)
    A = base
    zs = [np.asarray(z, dtype=np.int64) % PRIME for z in generators]
    for z in zs:
        if not A.is_central(z):
            raise ComplexError("Koszul generator is not central")
    for x in zs:
        for y in zs:
            if not np.array_equal(A.multiply(x, y), A.multiply(y, x)):
                raise ComplexError("Koszul generators do not commute")
    n = len(zs)
    if n == 0:
        return perf_free(A)
    subsets = {k: list(combinations(range(n), k)) for k in range(n + 1)}
    nv = A.nv
    verts = [[v for _ in subsets[k] for v in range(nv)] for k in range(n, -1, -1)]
    diffs = []
    for k in range(n, 0, -1):
        src, tgt = subsets[k], subsets[k - 1]
        tix = {s: j for j, s in enumerate(tgt)}
        D = azeros(A, len(tgt) * nv, len(src) * nv)
        for si, S in enumerate(src):
            for pos, j in enumerate(S):
                T = S[:pos] + S[pos + 1:]
                sign = -1 if pos % 2 else 1
                for v in range(nv):
                    ev = np.zeros(A.dim, dtype=np.int64)
                    ev[A.idem[v]] = 1
                    D[tix[T] * nv + v, si * nv + v] = (sign * A.multiply(zs[j], ev)) % PRIME
        diffs.append(D)
    return PerfComplex(A, -n, verts, diffs)


# ------------------------------------------------------ homotopy idempotents


@dataclass
class Splitting:
    n1: PerfComplex
    n2: PerfComplex
    inc1: PerfMap
    ret1: PerfMap
    inc2: PerfMap
    ret2: PerfMap
    minimal: PerfComplex
    lift_steps: int


def _strict_idempotent(f: PerfMap, cap: int) -> tuple[PerfMap, int]:
    for step in range(cap + 1):
        f2 = f.compose(f)
        if (f2 - f).is_zero():
            return f, step
        f3 = f2.compose(f)
        f = f2.scale(3) - f3.scale(2)
    raise ComplexError(f"idempotent lifting did not stabilise within {cap} steps")


def _image_summand(f_i: np.ndarray, verts, A: PathAlgebra):
    """Split the image of an idempotent endomorphism of ⊕P_verts: (verts', inc, ret)."""
    M, _ = al.realize_projective(A, verts)
    fm = realize_amatrix(A, f_i, verts, verts, M, M)
    img, inc_img = al.image(fm)
    tops = al.top_generators(img)
    vs = [v for v, _ in tops]
    inc = azeros(A, len(verts), len(vs))
    for a, (v, vec) in enumerate(tops):
        x = el.matmul(inc_img.blocks[v], vec.reshape(-1, 1)).ravel()
        inc[:, a, :] = element_to_column(A, verts, v, x)
    # ret = inc^{-1} ∘ f: solve on realized modules, vertex by vertex on generators
    Q, _ = al.realize_projective(A, vs)
    incm = realize_amatrix(A, inc, vs, verts, Q, M)
    ret = azeros(A, len(vs), len(verts))
    for a, v in enumerate(verts):
        col = f_i[:, a, :]
        y = column_to_element(A, verts, v, col)
        if not Q.dims[v]:
            continue
        x, _ = el.linear_solve(incm.blocks[v], y.reshape(-1, 1))
        if x is None:
            raise ComplexError("idempotent image is not a projective summand")
        ret[:, a, :] = element_to_column(A, vs, v, x.ravel())
    return vs, inc, ret


def _split_with(P: PerfComplex, f: PerfMap):
    A = P.algebra
    verts, incs, rets = {}, {}, {}
    for i in range(P.lo, P.hi + 1):
        verts[i], incs[i], rets[i] = _image_summand(f.at(i), P.v(i), A)
    diffs = [amul(A, amul(A, rets[i + 1], P.d(i)), incs[i]) for i in range(P.lo, P.hi)]
    N = PerfComplex(A, P.lo, [verts[i] for i in range(P.lo, P.hi + 1)], diffs, check=False)
    N.check()
    return N, PerfMap(N, P, incs), PerfMap(P, N, rets)


def split_homotopy_idempotent(q: PerfComplex, e: PerfMap, gldim: int | None = None,
                              lift_cap: int = 64) -> Splitting:
    """Split a homotopy idempotent e of q: q ≅ N1 ⊕ N2 with N1 the image of e.

    e is moved to the minimal model of q, lifted to a strict idempotent by the
    iteration f -> 3f² - 2f³ (converges because e² - e is null-homotopic and
    null-homotopic endomorphisms of minimal complexes are nilpotent), and split
    degreewise as projective summands.
    """
    H = HomComplex(q, q)
    defect = e.compose(e) - e
    if H.homotopy(H.from_perf_map(defect)) is None:
        raise ComplexError("e is not idempotent up to homotopy")
    m, F, G = minimalize(q)
    f = transport(e, F, G)
    f = PerfMap(m, m, f.blocks)
    f, steps = _strict_idempotent(f, lift_cap)
    one_minus = perf_identity(m) - f
    n1, inc1, ret1 = _split_with(m, f)
    n2, inc2, ret2 = _split_with(m, one_minus)
    inc1 = G.compose(inc1)
    inc2 = G.compose(inc2)
    ret1 = ret1.compose(F)
    ret2 = ret2.compose(F)
    return Splitting(n1, n2, inc1, ret1, inc2, ret2, m, steps)


# ----------------------------------------------------------------- utilities


def random_complex(A: PathAlgebra, rng, width: int = 3, max_dim: int = 3, lo: int | None = None) -> Complex:
    """Random bounded complex of modules: each differential is a random map with
    d∘d = 0, obtained by factoring through a random submodule of the kernel."""
    if lo is None:
        lo = int(rng.integers(-2, 3))
    terms = [al.random_module(A, rng, max_dim) for _ in range(width)]
    diffs = []
    for k in range(width - 1):
        src, tgt = terms[k], terms[k + 1]
        hs = al.HomSpace(src, tgt)
        if hs.dim == 0:
            diffs.append(src.zero_map(tgt))
            continue
        coeffs = rng.integers(0, PRIME, size=hs.dim)
        f = hs.element(coeffs)
        if diffs:
            prev = diffs[-1]
            # restrict to maps killing im(prev): solve within Hom(src, tgt)
            basis = hs.basis
            cols = np.stack([b.compose(prev).vector() for b in basis], axis=1) if basis else None
            if cols is not None and cols.size:
                ker = el.nullspace(cols)
                if ker.shape[1] == 0:
                    f = src.zero_map(tgt)
                else:
                    c = el.matmul(ker, rng.integers(0, PRIME, size=(ker.shape[1], 1))).ravel()
                    f = hs.element(c)
        diffs.append(f)
    return Complex(A, lo, terms, diffs).check()


def perf_from_complex(X, gldim_cap: int | None = None) -> PerfComplex:
    return as_perf(X, gldim_cap)


def random_chain_map(P: PerfComplex, Q: PerfComplex, rng, n: int = 0) -> PerfMap:
    """A uniformly random cocycle of Hom^n(P, Q), read as a chain map P -> Q[n]."""
    H = HomComplex(P, Q)
    Z = H.cohomology(n).cycles
    if Z.shape[1] == 0:
        return PerfMap(P, Q.shift(n), {})
    c = rng.integers(0, PRIME, size=(Z.shape[1], 1))
    return H.to_perf_map(el.matmul(Z, c).ravel(), Q, n)
