"""Path algebras modulo homogeneous relations and their representations.

Conventions used everywhere in the package:

* A path is written in traversal order; the product ``p * q`` is "p then q"
  and is zero unless ``p`` ends where ``q`` starts.
* A module is a quiver representation with one matrix per arrow, of shape
  ``(dim at target, dim at source)``. A path ``p: s -> t`` acts ``M_s -> M_t``.
  Representations are right modules over the path algebra.
* The indecomposable projective at ``v`` is ``P_v = e_v A``, spanned by the
  basis paths starting at ``v``; ``Hom(P_u, P_v) = e_v A e_u`` (paths v -> u)
  and composition of such maps is the algebra product (later map first).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import exactlin as el
from .exactlin import PRIME

DEFAULT_PATH_CAP = 12
_MAX_PATHS_PER_LENGTH = 200_000


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class Quiver:
    """Quiver presentation: vertices, arrows ``(source, target, label)`` and
    relations as lists of ``(coefficient, [arrow labels])`` terms."""

    vertices: tuple
    arrows: tuple
    relations: tuple = ()

    @classmethod
    def make(cls, vertices, arrows, relations=()):
        vertices = tuple(vertices)
        arrows = tuple((a[0], a[1], a[2]) for a in arrows)
        rels = tuple(tuple((int(c), tuple(p)) for c, p in r) for r in relations)
        q = cls(vertices, arrows, rels)
        q.validate()
        return q

    def vertex_index(self, label) -> int:
        try:
            return self.vertices.index(label)
        except ValueError:
            raise AlgebraError(f"unknown vertex {label!r}") from None

    def arrow_index(self, label) -> int:
        for i, a in enumerate(self.arrows):
            if a[2] == label:
                return i
        raise AlgebraError(f"unknown arrow {label!r}")

    def validate(self):
        labels = [a[2] for a in self.arrows]
        if len(set(labels)) != len(labels):
            raise AlgebraError("arrow labels must be distinct")
        for s, t, lab in self.arrows:
            if s not in self.vertices or t not in self.vertices:
                raise AlgebraError(f"arrow {lab!r} has an undeclared endpoint")
        for r in self.relations:
            ends, lengths = set(), set()
            for _, path in r:
                if not path:
                    raise AlgebraError("relations must not contain trivial paths")
                idx = [self.arrow_index(lab) for lab in path]
                for a, b in zip(idx, idx[1:]):
                    if self.arrows[a][1] != self.arrows[b][0]:
                        raise AlgebraError(f"path {path} in a relation is not composable")
                ends.add((self.arrows[idx[0]][0], self.arrows[idx[-1]][1]))
                lengths.add(len(path))
            if len(ends) > 1:
                raise AlgebraError("paths in a relation must share source and target")
            if len(lengths) > 1:
                raise AlgebraError("only length-homogeneous relations are supported")


class PathAlgebra:
    """Finite-dimensional quotient ``kQ / I`` with basis of normal-form paths.

    Basis elements are pairs ``(source vertex index, tuple of arrow indices)``.
    """

    def __init__(self, quiver: Quiver, path_length_cap: int = DEFAULT_PATH_CAP, name: str = ""):
        self.quiver = quiver
        self.name = name or "algebra"
        self.nv = len(quiver.vertices)
        self.arrow_src = [quiver.vertex_index(a[0]) for a in quiver.arrows]
        self.arrow_tgt = [quiver.vertex_index(a[1]) for a in quiver.arrows]
        self._build(path_length_cap)

    # ------------------------------------------------------------ construction
    def _tgt(self, path):
        s, arrows = path
        return self.arrow_tgt[arrows[-1]] if arrows else s

    def _build(self, cap: int):
        q = self.quiver
        rel_by_len: dict[int, list] = {}
        for r in q.relations:
            terms = [(c % PRIME, tuple(q.arrow_index(l) for l in p)) for c, p in r]
            rel_by_len.setdefault(len(terms[0][1]), []).append(terms)

        levels = [[(v, ()) for v in range(self.nv)]]
        # per length: (all paths, index, rref rows, pivots, nonpivot positions)
        self._level_data = []
        ideal_rows_prev = np.zeros((0, self.nv), dtype=np.int64)
        self._level_data.append((levels[0], {p: i for i, p in enumerate(levels[0])}, None, [], list(range(self.nv))))
        basis = list(levels[0])
        length = 0
        while True:
            length += 1
            prev_paths = levels[-1]
            paths = [(s, arr + (a,)) for (s, arr) in prev_paths for a in range(len(q.arrows))
                     if self.arrow_src[a] == self._tgt((s, arr))]
            if len(paths) > _MAX_PATHS_PER_LENGTH:
                raise AlgebraError("dimension cap exceeded: too many paths to enumerate")
            if not paths:
                self._stop = length
                break
            index = {p: i for i, p in enumerate(paths)}
            rows = []
            for row in ideal_rows_prev:
                nz = np.flatnonzero(row)
                for a in range(len(q.arrows)):
                    right = np.zeros(len(paths), dtype=np.int64)
                    left = np.zeros(len(paths), dtype=np.int64)
                    for j in nz:
                        s, arr = prev_paths[j]
                        if self._tgt((s, arr)) == self.arrow_src[a]:
                            right[index[(s, arr + (a,))]] = row[j]
                        if self.arrow_tgt[a] == s:
                            left[index[(self.arrow_src[a], (a,) + arr)]] = row[j]
                    if right.any():
                        rows.append(right)
                    if left.any():
                        rows.append(left)
            for terms in rel_by_len.get(length, []):
                v = np.zeros(len(paths), dtype=np.int64)
                for c, arr in terms:
                    src = self.arrow_src[arr[0]]
                    v[index[(src, arr)]] = (v[index[(src, arr)]] + c) % PRIME
                rows.append(v)
            if rows:
                r, piv = el.rref(np.array(rows, dtype=np.int64))
                r = r[: len(piv)]
            else:
                r, piv = np.zeros((0, len(paths)), dtype=np.int64), []
            pivset = set(piv)
            nonpiv = [j for j in range(len(paths)) if j not in pivset]
            self._level_data.append((paths, index, r, piv, nonpiv))
            levels.append(paths)
            ideal_rows_prev = r
            if not nonpiv:
                self._stop = length
                break
            if length > cap:
                s, arr = paths[nonpiv[0]]
                lab = [q.arrows[a][2] for a in arr]
                raise AlgebraError(f"dimension cap exceeded: path {lab} of length {length} survives reduction")
            basis.extend(paths[j] for j in nonpiv)
        self.basis = basis
        self.dim = len(basis)
        self.index = {p: i for i, p in enumerate(basis)}
        self.src = [p[0] for p in basis]
        self.tgt = [self._tgt(p) for p in basis]
        self.length = [len(p[1]) for p in basis]
        self.idem = [self.index[(v, ())] for v in range(self.nv)]
        self.paths = {}
        for i in range(self.dim):
            self.paths.setdefault((self.src[i], self.tgt[i]), []).append(i)
        self.mult = self._mult_table()

    def reduce(self, path) -> np.ndarray:
        """Normal form of a path (source, arrow tuple) as a basis vector."""
        out = np.zeros(self.dim, dtype=np.int64)
        s, arr = path
        ell = len(arr)
        if ell >= self._stop or ell >= len(self._level_data):
            return out
        paths, index, r, piv, nonpiv = self._level_data[ell]
        j = index[path]
        if r is None or j not in piv:
            out[self.index[path]] = 1
            return out
        row = r[piv.index(j)]
        for k in nonpiv:
            if row[k]:
                out[self.index[paths[k]]] = (-row[k]) % PRIME
        return out

    def _mult_table(self) -> np.ndarray:
        n = self.dim
        m = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                if self.tgt[i] != self.src[j]:
                    continue
                s, a1 = self.basis[i]
                _, a2 = self.basis[j]
                m[i, j] = self.reduce((s, a1 + a2))
        return m

    # ------------------------------------------------------------------ queries
    def __repr__(self):
        return f"PathAlgebra({self.name}, dim={self.dim})"

    def label(self, i: int) -> str:
        s, arr = self.basis[i]
        if not arr:
            return f"e{self.quiver.vertices[s]}"
        return "*".join(str(self.quiver.arrows[a][2]) for a in arr)

    @property
    def radical_basis(self) -> list[int]:
        return [i for i in range(self.dim) if self.length[i] > 0]

    def paths_between(self, s: int, t: int) -> list[int]:
        return self.paths.get((s, t), [])

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two algebra elements given as basis vectors."""
        return (np.einsum("i,j,ijk->k", x % PRIME, y % PRIME, self.mult) % PRIME).astype(np.int64)

    def one(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.idem] = 1
        return v

    def is_associative(self) -> bool:
        m = self.mult
        left = np.einsum("ijl,lkm->ijkm", m, m) % PRIME
        right = np.einsum("jkl,ilm->ijkm", m, m) % PRIME
        return bool(np.array_equal(left, right))

    def is_central(self, x: np.ndarray) -> bool:
        for b in range(self.dim):
            e = np.zeros(self.dim, dtype=np.int64)
            e[b] = 1
            if not np.array_equal(self.multiply(x, e), self.multiply(e, x)):
                return False
        return True

    def radical_is_nilpotent(self) -> bool:
        return max(self.length, default=0) < self._stop

    def unit_inverse(self, x: np.ndarray, v: int) -> np.ndarray:
        """Inverse of ``x`` in the local ring ``e_v A e_v`` (x must have nonzero e_v part)."""
        c = int(x[self.idem[v]]) % PRIME
        if c == 0:
            raise AlgebraError("element is not invertible at its vertex")
        cinv = pow(c, PRIME - 2, PRIME)
        ev = np.zeros(self.dim, dtype=np.int64)
        ev[self.idem[v]] = 1
        n = (-(x * cinv) + ev) % PRIME  # nilpotent part: 1 - c^-1 x
        total = ev.copy()
        term = ev.copy()
        for _ in range(self._stop + 1):
            term = self.multiply(term, n)
            if not term.any():
                break
            total = (total + term) % PRIME
        return (total * cinv) % PRIME

    @cached_property
    def cartan(self) -> np.ndarray:
        """Cartan matrix C[u, v] = dim e_u A e_v (= dim P_u at v)."""
        c = np.zeros((self.nv, self.nv), dtype=np.int64)
        for (s, t), idx in self.paths.items():
            c[s, t] = len(idx)
        return c

    @cached_property
    def projective_arrow_mats(self) -> list[list[np.ndarray]]:
        """For each vertex v, arrow matrices of the representation P_v."""
        out = []
        for v in range(self.nv):
            mats = []
            for a, (s, t) in enumerate(zip(self.arrow_src, self.arrow_tgt)):
                src_b = self.paths_between(v, s)
                tgt_b = self.paths_between(v, t)
                m = np.zeros((len(tgt_b), len(src_b)), dtype=np.int64)
                ea = self.reduce((s, (a,)))
                for col, b in enumerate(src_b):
                    prod = self.multiply(_unit(self.dim, b), ea)
                    m[:, col] = prod[tgt_b]
                mats.append(m)
            out.append(mats)
        return out


def _unit(n: int, i: int) -> np.ndarray:
    v = np.zeros(n, dtype=np.int64)
    v[i] = 1
    return v


def path_algebra(q: Quiver, path_length_cap: int = DEFAULT_PATH_CAP, name: str = "") -> PathAlgebra:
    return PathAlgebra(q, path_length_cap, name)


# ------------------------------------------------------------------ built-ins


def linear_A(n: int) -> PathAlgebra:
    """Path algebra of the linearly oriented quiver 1 -> 2 -> ... -> n."""
    verts = list(range(1, n + 1))
    arrows = [(i, i + 1, f"a{i}") for i in range(1, n)]
    return path_algebra(Quiver.make(verts, arrows), name=f"A{n}")


def dual_numbers() -> PathAlgebra:
    """k[x]/(x^2) as a one-loop quiver."""
    return path_algebra(Quiver.make([1], [(1, 1, "x")], [[(1, ["x", "x"])]]), name="k[x]/(x^2)")


def kronecker(m: int = 2) -> PathAlgebra:
    arrows = [(1, 2, f"x{i}") for i in range(m)]
    return path_algebra(Quiver.make([1, 2], arrows), name=f"Kronecker{m}")


def ground_field() -> PathAlgebra:
    return path_algebra(Quiver.make([1], []), name="k")


def builtin(name: str) -> PathAlgebra:
    name = name.strip()
    if name in ("k", "field"):
        return ground_field()
    if name in ("dual_numbers", "k[x]/(x^2)"):
        return dual_numbers()
    if name.startswith("A") and name[1:].isdigit():
        return linear_A(int(name[1:]))
    if name.startswith("kronecker"):
        return kronecker(int(name[9:] or 2))
    raise AlgebraError(f"unknown built-in algebra {name!r}")


# -------------------------------------------------------------------- modules


class Module:
    """Finite-dimensional representation of the quiver of ``algebra``."""

    def __init__(self, algebra: PathAlgebra, dims, mats, check: bool = True):
        self.algebra = algebra
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != algebra.nv:
            raise AlgebraError("dimension vector has the wrong length")
        self.mats = []
        for a, m in enumerate(mats):
            s, t = algebra.arrow_src[a], algebra.arrow_tgt[a]
            m = np.asarray(m, dtype=np.int64).reshape(self.dims[t], self.dims[s]) % PRIME
            self.mats.append(m)
        if len(self.mats) != len(algebra.arrow_src):
            raise AlgebraError("need one matrix per arrow")
        self._act = {}
        if check and not self.satisfies_relations():
            raise AlgebraError("representation violates a relation")

    def __repr__(self):
        return f"Module(dims={self.dims})"

    @property
    def dim(self) -> int:
        return sum(self.dims)

    def act(self, k: int) -> np.ndarray:
        """Matrix of basis path ``k`` acting M_src -> M_tgt."""
        m = self._act.get(k)
        if m is None:
            A = self.algebra
            s, arr = A.basis[k]
            m = el.eye(self.dims[s])
            for a in arr:
                m = el.matmul(self.mats[a], m)
            self._act[k] = m
        return m

    def act_element(self, x: np.ndarray, s: int, t: int) -> np.ndarray:
        """Action of the component of ``x`` in e_s A e_t, as a map M_s -> M_t."""
        out = el.zeros(self.dims[t], self.dims[s])
        for k in self.algebra.paths_between(s, t):
            if x[k]:
                out = (out + int(x[k]) * self.act(k)) % PRIME
        return out

    def satisfies_relations(self) -> bool:
        A = self.algebra
        q = A.quiver
        for r in q.relations:
            s = A.arrow_src[q.arrow_index(r[0][1][0])]
            t = A.arrow_tgt[q.arrow_index(r[0][1][-1])]
            tot = el.zeros(self.dims[t], self.dims[s])
            for c, path in r:
                m = el.eye(self.dims[s])
                for lab in path:
                    m = el.matmul(self.mats[q.arrow_index(lab)], m)
                tot = (tot + c * m) % PRIME
            if tot.any():
                return False
        return True

    def is_zero(self) -> bool:
        return self.dim == 0

    def identity(self) -> "ModuleMap":
        return ModuleMap(self, self, [el.eye(d) for d in self.dims])

    def zero_map(self, other: "Module") -> "ModuleMap":
        return ModuleMap(self, other, [el.zeros(other.dims[v], self.dims[v]) for v in range(len(self.dims))])

    def same_as(self, other: "Module") -> bool:
        return self.dims == other.dims and all(np.array_equal(a, b) for a, b in zip(self.mats, other.mats))


@dataclass
class ModuleMap:
    src: Module
    tgt: Module
    blocks: list = field(default_factory=list)

    def __post_init__(self):
        self.blocks = [np.asarray(b, dtype=np.int64).reshape(self.tgt.dims[v], self.src.dims[v]) % PRIME
                       for v, b in enumerate(self.blocks)]

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self ∘ other."""
        return ModuleMap(other.src, self.tgt, [el.matmul(a, b) for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other):
        return ModuleMap(self.src, self.tgt, [(a + b) % PRIME for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        return ModuleMap(self.src, self.tgt, [(a - b) % PRIME for a, b in zip(self.blocks, other.blocks)])

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.src, self.tgt, [(b * c) % PRIME for b in self.blocks])

    def is_zero(self) -> bool:
        return all(not b.any() for b in self.blocks)

    def is_homomorphism(self) -> bool:
        A = self.src.algebra
        for a in range(len(A.arrow_src)):
            s, t = A.arrow_src[a], A.arrow_tgt[a]
            lhs = el.matmul(self.tgt.mats[a], self.blocks[s])
            rhs = el.matmul(self.blocks[t], self.src.mats[a])
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def rank(self) -> int:
        return sum(el.rank(b) for b in self.blocks)

    def vector(self) -> np.ndarray:
        return np.concatenate([b.ravel() for b in self.blocks]) if self.blocks else np.zeros(0, np.int64)


# --------------------------------------------------------- module constructors


def projective(A: PathAlgebra, v: int) -> Module:
    return Module(A, [len(A.paths_between(v, w)) for w in range(A.nv)], A.projective_arrow_mats[v], check=False)


def simple(A: PathAlgebra, v: int) -> Module:
    dims = [int(w == v) for w in range(A.nv)]
    return Module(A, dims, [el.zeros(dims[t], dims[s]) for s, t in zip(A.arrow_src, A.arrow_tgt)], check=False)


def zero_module(A: PathAlgebra) -> Module:
    return Module(A, [0] * A.nv, [el.zeros(0, 0) for _ in A.arrow_src], check=False)


def standard_modules(A: PathAlgebra):
    """(projectives, simples), one per vertex."""
    return [projective(A, v) for v in range(A.nv)], [simple(A, v) for v in range(A.nv)]


def free_module(A: PathAlgebra) -> Module:
    return realize_projective(A, list(range(A.nv)))[0]


def realize_projective(A: PathAlgebra, verts) -> tuple[Module, list]:
    """Representation of ⊕_a P_{verts[a]}.

    Returns the module and, per vertex w, the list of ``(summand, basis path)``
    labelling the coordinates at w.
    """
    verts = list(verts)
    dims = []
    coords = []
    for w in range(A.nv):
        lab = [(a, k) for a, v in enumerate(verts) for k in A.paths_between(v, w)]
        coords.append(lab)
        dims.append(len(lab))
    mats = []
    for a in range(len(A.arrow_src)):
        blocks = [A.projective_arrow_mats[v][a] for v in verts]
        mats.append(_block_diag(blocks, A.arrow_tgt[a], A.arrow_src[a], verts, A))
    return Module(A, dims, mats, check=False), coords


def _block_diag(blocks, t, s, verts, A):
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = el.zeros(rows, cols)
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def direct_sum(mods: list[Module]) -> tuple[Module, list[ModuleMap], list[ModuleMap]]:
    """Direct sum with its inclusions and projections."""
    A = mods[0].algebra
    dims = [sum(m.dims[v] for m in mods) for v in range(A.nv)]
    mats = []
    for a in range(len(A.arrow_src)):
        mats.append(_block_diag([m.mats[a] for m in mods], None, None, None, A))
    S = Module(A, dims, mats, check=False)
    incs, projs = [], []
    off = [0] * A.nv
    for m in mods:
        ib, pb = [], []
        for v in range(A.nv):
            i = el.zeros(dims[v], m.dims[v])
            i[off[v]:off[v] + m.dims[v]] = el.eye(m.dims[v])
            ib.append(i)
            pb.append(i.T.copy())
            off[v] += m.dims[v]
        incs.append(ModuleMap(m, S, ib))
        projs.append(ModuleMap(S, m, pb))
    return S, incs, projs


def _as_cols(b, rows: int) -> np.ndarray:
    b = np.asarray(b, dtype=np.int64)
    if b.size == 0:
        return np.zeros((rows, 0), dtype=np.int64)
    return b.reshape(rows, -1)


def submodule(M: Module, basis: list[np.ndarray]) -> tuple[Module, ModuleMap]:
    """Submodule spanned per vertex by the (independent) columns ``basis[v]``."""
    A = M.algebra
    basis = [_as_cols(b, M.dims[v]) for v, b in enumerate(basis)]
    inv = [el.LeftInverse(b) for b in basis]
    mats = []
    for a in range(len(A.arrow_src)):
        s, t = A.arrow_src[a], A.arrow_tgt[a]
        img = el.matmul(M.mats[a], basis[s])
        mats.append(inv[t].coords(img) if basis[t].shape[1] else el.zeros(0, basis[s].shape[1]))
    S = Module(A, [b.shape[1] for b in basis], mats, check=False)
    return S, ModuleMap(S, M, basis)


def quotient(M: Module, sub: list[np.ndarray]) -> tuple[Module, ModuleMap]:
    """Quotient by the submodule spanned by ``sub[v]`` (columns), with the projection."""
    A = M.algebra
    comp = []
    for v in range(A.nv):
        s = _as_cols(sub[v], M.dims[v])
        s = el.column_space(s) if s.size else s
        comp.append((s, el.complement_basis(s, el.eye(M.dims[v]))))
    inv = [el.LeftInverse(np.concatenate([c, s], axis=1)) for s, c in comp]
    mats = []
    for a in range(len(A.arrow_src)):
        s, t = A.arrow_src[a], A.arrow_tgt[a]
        img = el.matmul(M.mats[a], comp[s][1])
        k = comp[t][1].shape[1]
        mats.append(inv[t].coords(img)[:k] if M.dims[t] else el.zeros(0, comp[s][1].shape[1]))
    Q = Module(A, [c.shape[1] for _, c in comp], mats, check=False)
    proj = []
    for v in range(A.nv):
        k = comp[v][1].shape[1]
        proj.append(inv[v].coords(el.eye(M.dims[v]))[:k] if M.dims[v] else el.zeros(k, 0))
    return Q, ModuleMap(M, Q, proj)


def kernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    return submodule(f.src, [el.nullspace(b) if b.shape[1] else el.zeros(0, 0) for b in f.blocks])


def image_basis(f: ModuleMap) -> list[np.ndarray]:
    return [el.column_space(b) if b.size else el.zeros(b.shape[0], 0) for b in f.blocks]


def image(f: ModuleMap) -> tuple[Module, ModuleMap]:
    return submodule(f.tgt, image_basis(f))


def cokernel(f: ModuleMap) -> tuple[Module, ModuleMap]:
    return quotient(f.tgt, image_basis(f))


def span_sum(parts: list[np.ndarray], n: int) -> np.ndarray:
    cols = [p for p in parts if p.size]
    if not cols:
        return el.zeros(n, 0)
    return el.column_space(np.concatenate(cols, axis=1))


def radical(M: Module) -> list[np.ndarray]:
    """Per vertex, a basis of (rad M)_v = sum of images of arrows into v."""
    A = M.algebra
    return [span_sum([M.mats[a] for a in range(len(A.arrow_src)) if A.arrow_tgt[a] == v], M.dims[v])
            for v in range(A.nv)]


def top_generators(M: Module) -> list[tuple[int, np.ndarray]]:
    """Minimal generators: (vertex, vector in M_v) complementing the radical."""
    rad = radical(M)
    gens = []
    for v in range(M.algebra.nv):
        comp = el.complement_basis(rad[v], el.eye(M.dims[v]))
        gens.extend((v, comp[:, j].copy()) for j in range(comp.shape[1]))
    return gens


def map_from_projective(A: PathAlgebra, gens: list[tuple[int, np.ndarray]], M: Module):
    """Module map ⊕ P_{v_a} -> M sending e_{v_a} to the given element of M_{v_a}."""
    verts = [v for v, _ in gens]
    P, coords = realize_projective(A, verts)
    blocks = []
    for w in range(A.nv):
        b = el.zeros(M.dims[w], P.dims[w])
        for col, (a, k) in enumerate(coords[w]):
            b[:, col] = el.matmul(M.act(k), gens[a][1].reshape(-1, 1)).ravel()
        blocks.append(b)
    return P, verts, ModuleMap(P, M, blocks)


def projective_cover(M: Module):
    """Projective cover: (vertex list of summands, realized P, surjection P -> M)."""
    gens = top_generators(M)
    P, verts, f = map_from_projective(M.algebra, gens, M)
    return verts, P, f


def is_projective(M: Module) -> bool:
    verts, P, _ = projective_cover(M)
    return P.dims == M.dims


# ----------------------------------------------------------------- Hom spaces


class HomSpace:
    """Basis of Hom_A(M, N) with coordinate extraction."""

    def __init__(self, M: Module, N: Module):
        self.M, self.N = M, N
        A = M.algebra
        nv = A.nv
        offs = [0]
        for v in range(nv):
            offs.append(offs[-1] + N.dims[v] * M.dims[v])
        self.offs = offs
        nvar = offs[-1]
        rows = []
        for a in range(len(A.arrow_src)):
            s, t = A.arrow_src[a], A.arrow_tgt[a]
            nr = N.dims[t] * M.dims[s]
            if nr == 0:
                continue
            blk = el.zeros(nr, nvar)
            # N(a) f_s - f_t M(a), row-major vectorisation
            blk[:, offs[s]:offs[s + 1]] = np.kron(N.mats[a], el.eye(M.dims[s]))
            blk[:, offs[t]:offs[t + 1]] = (blk[:, offs[t]:offs[t + 1]] - np.kron(el.eye(N.dims[t]), M.mats[a].T)) % PRIME
            rows.append(blk)
        cons = np.concatenate(rows, axis=0) if rows else el.zeros(0, nvar)
        self.kernel = el.nullspace(cons) if nvar else el.zeros(0, 0)
        self.dim = self.kernel.shape[1]
        self._inv = el.LeftInverse(self.kernel) if self.dim else None

    def element(self, coeffs) -> ModuleMap:
        vec = el.matmul(self.kernel, np.asarray(coeffs, dtype=np.int64).reshape(-1, 1)).ravel()
        return self._from_vec(vec)

    def _from_vec(self, vec) -> ModuleMap:
        A = self.M.algebra
        blocks = [vec[self.offs[v]:self.offs[v + 1]].reshape(self.N.dims[v], self.M.dims[v]) for v in range(A.nv)]
        return ModuleMap(self.M, self.N, blocks)

    @property
    def basis(self) -> list[ModuleMap]:
        return [self._from_vec(self.kernel[:, j]) for j in range(self.dim)]

    def coords(self, f: ModuleMap) -> np.ndarray:
        if not self.dim:
            return np.zeros(0, dtype=np.int64)
        return self._inv.coords(f.vector())


def hom_space(M: Module, N: Module) -> list[ModuleMap]:
    """Basis of Hom_A(M, N) from the commutation constraints."""
    return HomSpace(M, N).basis


def hom_dim(M: Module, N: Module) -> int:
    return HomSpace(M, N).dim


def random_module(A: PathAlgebra, rng, max_dim: int = 3) -> Module:
    """Random representation; for algebras with relations, a random quotient of a
    projective is returned instead."""
    if not A.quiver.relations:
        dims = [int(rng.integers(0, max_dim + 1)) for _ in range(A.nv)]
        mats = [rng.integers(0, PRIME, size=(dims[t], dims[s])) for s, t in zip(A.arrow_src, A.arrow_tgt)]
        return Module(A, dims, mats, check=False)
    v = int(rng.integers(0, A.nv))
    P = projective(A, v)
    sub = []
    for w in range(A.nv):
        k = int(rng.integers(0, P.dims[w] + 1))
        sub.append(rng.integers(0, PRIME, size=(P.dims[w], k)))
    # close the random vectors under the arrow action to get a submodule
    basis = [el.column_space(s) if s.size else el.zeros(P.dims[w], 0) for w, s in enumerate(sub)]
    changed = True
    while changed:
        changed = False
        for a in range(len(A.arrow_src)):
            s, t = A.arrow_src[a], A.arrow_tgt[a]
            img = el.matmul(P.mats[a], basis[s])
            new = span_sum([basis[t], img], P.dims[t])
            if new.shape[1] > basis[t].shape[1]:
                basis[t] = new
                changed = True
    return quotient(P, basis)[0]
