"""Grothendieck group calculus for bounded derived categories of path algebras.

K_0 is identified with Z^{#vertices} through homology dimension vectors
(equivalently: composition multiplicities of the simples). Membership of a
class in a sublattice is decided over the integers by Smith normal form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import complexes as cx
from .algebra import Module
from .complexes import Complex, PerfComplex
from .exactlin import smith_normal_form, int_matmul


def class_of(x) -> tuple[int, ...]:
    """Σ_i (-1)^i dimvec H^i(x) as an integer vector.

    For a perfect complex this is computed from the terms (the Euler
    characteristic does not see the differential); :func:`class_from_homology`
    computes the same vector from homology and is used as a cross-check.
    """
    if isinstance(x, Module):
        return tuple(int(d) for d in x.dims)
    if isinstance(x, PerfComplex):
        A = x.algebra
        C = A.cartan
        out = np.zeros(A.nv, dtype=np.int64)
        for i in range(x.lo, x.hi + 1):
            for v in x.v(i):
                out += (-1) ** (i % 2) * C[v]
        return tuple(int(c) for c in out)
    return class_from_homology(x)


def class_from_homology(x) -> tuple[int, ...]:
    X = cx.as_complex(x)
    out = np.zeros(X.algebra.nv, dtype=np.int64)
    for i, dims in cx.homology_dims(X).items():
        out += (-1) ** (i % 2) * np.asarray(dims, dtype=np.int64)
    return tuple(int(c) for c in out)


def class_of_terms(X: Complex) -> tuple[int, ...]:
    """Alternating sum of the term dimension vectors of a module complex."""
    out = np.zeros(X.algebra.nv, dtype=np.int64)
    for i in range(X.lo, X.hi + 1):
        out += (-1) ** (i % 2) * np.asarray(X.term(i).dims, dtype=np.int64)
    return tuple(int(c) for c in out)


@dataclass
class Membership:
    member: bool
    coefficients: list | None     # c with Σ c_j g_j = target
    obstruction: str | None       # e.g. "mod 2 at invariant factor 1"
    invariant_factors: list

    @property
    def verdict(self) -> str:
        return "YES" if self.member else "NO"


def k0_membership(target, lattice) -> Membership:
    """Is ``target`` an integer combination of the ``lattice`` generators?

    ``lattice`` is a list of integer vectors (the generators). With
    U G V = D for G the matrix whose columns are the generators, the system
    G c = t becomes D y = U t; it is solvable iff each (U t)_i is divisible by
    d_i (and vanishes where d_i = 0). Then c = V y.
    """
    t = [int(a) for a in target]
    gens = [[int(a) for a in g] for g in lattice]
    n = len(t)
    m = len(gens)
    for g in gens:
        if len(g) != n:
            raise ValueError("generator length differs from target length")
    if m == 0:
        ok = not any(t)
        return Membership(ok, [] if ok else None, None if ok else "target is nonzero, lattice is 0", [])
    G = [[gens[j][i] for j in range(m)] for i in range(n)]
    D, U, V = smith_normal_form(G)
    ut = [sum(U[i][k] * t[k] for k in range(n)) for i in range(n)]
    diag = [D[i][i] for i in range(min(n, m))]
    factors = [d for d in diag if d]
    y = [0] * m
    for i in range(n):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ut[i] != 0:
                return Membership(False, None, f"not in the rational span (coordinate {i} of U t is {ut[i]})", factors)
            continue
        if ut[i] % d:
            return Membership(False, None, f"mod {d} at invariant factor {i + 1} (residue {ut[i] % d})", factors)
        y[i] = ut[i] // d
    c = [sum(V[j][k] * y[k] for k in range(m)) for j in range(m)]
    check = int_matmul(G, [[a] for a in c])
    if [r[0] for r in check] != t:
        raise ArithmeticError("Smith normal form solution does not reproduce the target")
    return Membership(True, c, None, factors)


def brute_force_membership(target, lattice, box: int = 5):
    """Search coefficient vectors with |c_j| ≤ box; returns one or None."""
    t = tuple(int(a) for a in target)
    gens = [tuple(int(a) for a in g) for g in lattice]
    if not gens:
        return [] if not any(t) else None
    for c in itertools.product(range(-box, box + 1), repeat=len(gens)):
        s = tuple(sum(cj * g[i] for cj, g in zip(c, gens)) for i in range(len(t)))
        if s == t:
            return list(c)
    return None


def sublattice_of_objects(objects) -> list:
    """Generators of the image of K_0 of the subcategory generated by ``objects``."""
    return [list(class_of(x)) for x in objects]
