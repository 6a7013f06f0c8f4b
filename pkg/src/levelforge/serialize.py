"""JSON encodings of modules, perfect complexes and level certificates.

Algebra matrices are stored sparsely as ``[row, col, basis index, value]``
quadruples together with their shape; vertices are written by label.
"""
from __future__ import annotations

import numpy as np

from . import algebra as al
from . import levels as lv
from .complexes import PerfComplex


def jsonable(x):
    """Recursively turn numpy scalars/arrays, tuples and non-string keys into JSON types."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def amatrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m)
    nz = np.argwhere(m)
    return {"shape": list(m.shape), "entries": [[int(r), int(c), int(k), int(m[r, c, k])] for r, c, k in nz]}


def amatrix_from_json(d: dict) -> np.ndarray:
    m = np.zeros(tuple(d["shape"]), dtype=np.int64)
    for r, c, k, v in d["entries"]:
        m[r, c, k] = v
    return m


def module_to_json(M: al.Module) -> dict:
    return {"dims": list(M.dims), "mats": [m.tolist() for m in M.mats]}


def perf_to_json(P: PerfComplex) -> dict:
    labels = P.algebra.quiver.vertices
    return {"lo": P.lo, "verts": [[labels[v] for v in vs] for vs in P.verts],
            "diffs": [amatrix_to_json(d) for d in P.diffs]}


def perf_from_json(A: al.PathAlgebra, d: dict) -> PerfComplex:
    q = A.quiver
    verts = [[q.vertex_index(v) for v in vs] for vs in d["verts"]]
    return PerfComplex(A, int(d["lo"]), verts, [amatrix_from_json(x) for x in d["diffs"]])


def _blocks_to_json(blocks: dict) -> dict:
    return {str(i): amatrix_to_json(m) for i, m in sorted(blocks.items())}


def _blocks_from_json(d: dict) -> dict:
    return {int(i): amatrix_from_json(m) for i, m in d.items()}


def cert_to_json(cert) -> dict:
    if isinstance(cert, lv.Leaf):
        return {"leaf": {"gen": cert.gen, "shift": cert.shift, "mult": cert.mult}}
    if isinstance(cert, lv.DirectSum):
        return {"sum": [cert_to_json(c) for c in cert.children]}
    if isinstance(cert, lv.Cone):
        return {"cone": {"left": cert_to_json(cert.left), "right": cert_to_json(cert.right),
                         "twist": _blocks_to_json(cert.twist)}}
    if isinstance(cert, lv.Summand):
        return {"summand": {"child": cert_to_json(cert.child), "object": perf_to_json(cert.obj),
                            "s": _blocks_to_json(cert.s), "r": _blocks_to_json(cert.r)}}
    raise lv.CertificateError(f"cannot encode {type(cert).__name__}")


def cert_from_json(A: al.PathAlgebra, d: dict):
    if len(d) != 1:
        raise lv.CertificateError("certificate node must have exactly one key")
    (kind, body), = d.items()
    if kind == "leaf":
        return lv.Leaf(int(body["gen"]), int(body.get("shift", 0)), int(body.get("mult", 1)))
    if kind == "sum":
        return lv.DirectSum([cert_from_json(A, c) for c in body])
    if kind == "cone":
        return lv.Cone(cert_from_json(A, body["left"]), cert_from_json(A, body["right"]),
                       _blocks_from_json(body.get("twist", {})))
    if kind == "summand":
        return lv.Summand(cert_from_json(A, body["child"]), perf_from_json(A, body["object"]),
                          _blocks_from_json(body["s"]), _blocks_from_json(body["r"]))
    raise lv.CertificateError(f"unknown certificate node {kind!r}")
