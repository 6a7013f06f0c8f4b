"""Scenario-driven command line: ``levelforge <task> scenario.json [...]``.

A scenario is a JSON object::

    {"task": "brown", "seed": 0,
     "algebra": "A2",                      # or {"vertices", "arrows", "relations"}
     "graded": {"ring": "polynomial"},     # graded tasks only
     "params": {...}}                      # task specific, see the README

Exit status: 0 when every report is PASS or COMPUTED, 1 when some report is
FAIL, 2 on a schema violation or a module error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import acceptance as ac
from . import algebra as al
from . import brown as br
from . import complexes as cx
from . import graded as gr
from . import kzero as kz
from . import levels as lv
from . import torsion as ts
from .exactlin import PRIME
from .serialize import cert_to_json, jsonable, module_to_json, perf_to_json

TASKS = ("algebra", "resolve", "level", "brown", "k0", "graded", "tilt", "selftest")
GRADED_OPS = ("serre", "local_cohomology", "chi", "twist_bound", "strong_gen", "betti", "ext_kk", "tilting",
              "koszul", "certificate")
TILT_CHECKS = ("torsion_pair", "cotilting", "tilting", "heart", "quasi_abelian", "chain", "decompose")
OBJECT_KINDS = ("simple", "projective", "free", "module", "complex", "random_module", "random_complex", "sum",
                "zero")


class SchemaError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where


# ------------------------------------------------------------------ schema


def _expect(cond: bool, where: str, msg: str):
    if not cond:
        raise SchemaError(where, msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _pos_int(d: dict, key: str, where: str, default=None):
    if key not in d:
        return default
    v = d[key]
    _expect(_is_int(v) and v > 0, f"{where}.{key}", "expected a positive integer")
    return v


def _int(d: dict, key: str, where: str, default=None):
    if key not in d:
        return default
    _expect(_is_int(d[key]), f"{where}.{key}", "expected an integer")
    return d[key]


def _window(d: dict, key: str, where: str, default):
    if key not in d:
        return default
    w = d[key]
    _expect(isinstance(w, list) and len(w) == 2 and all(_is_int(x) for x in w) and w[0] <= w[1],
            f"{where}.{key}", "expected [lo, hi] with lo <= hi")
    return tuple(w)


def validate(sc, task: str) -> dict:
    """Check the scenario shape; returns it unchanged. Raises SchemaError with a $-path."""
    _expect(isinstance(sc, dict), "$", "scenario must be a JSON object")
    known = {"task", "seed", "algebra", "graded", "params", "name"}
    extra = sorted(set(sc) - known)
    _expect(not extra, "$", f"unknown keys {extra}")
    if "task" in sc:
        _expect(sc["task"] in TASKS, "$.task", f"expected one of {list(TASKS)}")
        _expect(sc["task"] == task, "$.task", f"scenario is for {sc['task']!r}, invoked as {task!r}")
    if "seed" in sc:
        _expect(_is_int(sc["seed"]) and sc["seed"] >= 0, "$.seed", "expected a non-negative integer")
    params = sc.get("params", {})
    _expect(isinstance(params, dict), "$.params", "expected an object")
    if task in ("algebra", "resolve", "level", "brown", "k0", "tilt"):
        _expect("algebra" in sc, "$.algebra", "required for this task")
        _validate_algebra(sc["algebra"], "$.algebra")
    if task == "graded":
        _expect("graded" in sc, "$.graded", "required for graded scenarios")
        g = sc["graded"]
        _expect(isinstance(g, dict) and g.get("ring") in ("polynomial", "quantum", "field"),
                "$.graded.ring", "expected polynomial, quantum or field")
        if g["ring"] == "quantum":
            _expect(_is_int(g.get("q")) and g["q"] % PRIME != 0, "$.graded.q", "expected a nonzero integer")
    _validate_params(task, params, "$.params")
    return sc


def _validate_algebra(a, where):
    if isinstance(a, str):
        return
    _expect(isinstance(a, dict), where, "expected a built-in name or a quiver object")
    _expect(isinstance(a.get("vertices"), list) and a["vertices"], f"{where}.vertices", "expected a non-empty list")
    _expect(isinstance(a.get("arrows", []), list), f"{where}.arrows", "expected a list")
    for k, arr in enumerate(a.get("arrows", [])):
        _expect(isinstance(arr, list) and len(arr) == 3, f"{where}.arrows[{k}]", "expected [source, target, label]")
    _expect(isinstance(a.get("relations", []), list), f"{where}.relations", "expected a list")


def _validate_object(o, where):
    _expect(isinstance(o, dict), where, "expected an object description")
    kinds = [k for k in o if k in OBJECT_KINDS]
    _expect(len(kinds) == 1, where, f"expected exactly one of {list(OBJECT_KINDS)}")
    extra = sorted(set(o) - set(OBJECT_KINDS) - {"shift"})
    _expect(not extra, where, f"unknown keys {extra}")
    if "shift" in o:
        _expect(_is_int(o["shift"]), f"{where}.shift", "expected an integer")
    kind = kinds[0]
    body = o[kind]
    if kind == "sum":
        _expect(isinstance(body, list), f"{where}.sum", "expected a list")
        for k, x in enumerate(body):
            _validate_object(x, f"{where}.sum[{k}]")
    elif kind == "module":
        _expect(isinstance(body, dict) and isinstance(body.get("dims"), list), f"{where}.module",
                "expected {dims, mats}")
    elif kind == "complex":
        _expect(isinstance(body, dict) and isinstance(body.get("terms"), list), f"{where}.complex",
                "expected {lo, terms, diffs}")
    elif kind in ("random_module", "random_complex"):
        _expect(isinstance(body, dict), f"{where}.{kind}", "expected an object")
        _pos_int(body, "width", f"{where}.{kind}")
        _pos_int(body, "max_dim", f"{where}.{kind}")


def _validate_params(task, p, where):
    if task in ("resolve", "level"):
        _expect("object" in p, f"{where}.object", "required")
        _validate_object(p["object"], f"{where}.object")
    if task == "level":
        _pos_int(p, "cap", where)
        for k, g in enumerate(p.get("gens", [])):
            _validate_object(g, f"{where}.gens[{k}]")
    if task == "algebra":
        for key in ("hom", "ext"):
            if key in p:
                _expect(isinstance(p[key], list) and len(p[key]) == 2, f"{where}.{key}", "expected [object, object]")
                for k, x in enumerate(p[key]):
                    _validate_object(x, f"{where}.{key}[{k}]")
        _pos_int(p, "window", where)
    if task == "brown":
        _expect("backing" in p, f"{where}.backing", "required")
        _validate_object(p["backing"], f"{where}.backing")
        steps = _pos_int(p, "steps", where, 4)
        _expect(steps % 2 == 0, f"{where}.steps", "expected an even number of stages")
        _pos_int(p, "window", where)
    if task == "k0":
        _expect("lattice" in p and isinstance(p["lattice"], list), f"{where}.lattice", "expected a list")
        _expect("target" in p, f"{where}.target", "required")
        for k, g in enumerate(p["lattice"]):
            if not isinstance(g, list):
                _validate_object(g, f"{where}.lattice[{k}]")
        if not isinstance(p["target"], list):
            _validate_object(p["target"], f"{where}.target")
        _pos_int(p, "box", where)
    if task == "graded":
        ops = p.get("ops", ["serre"])
        _expect(isinstance(ops, list) and all(o in GRADED_OPS for o in ops), f"{where}.ops",
                f"expected a list drawn from {list(GRADED_OPS)}")
        _window(p, "window", where, None)
        _window(p, "range", where, None)
        _pos_int(p, "i_max", where)
        if "twists" in p:
            _expect(isinstance(p["twists"], list) and all(_is_int(t) for t in p["twists"]), f"{where}.twists",
                    "expected a list of integers")
        if "module" in p:
            m = p["module"]
            _expect(isinstance(m, dict) and m.get("kind") in ("ring", "residue", "truncation"),
                    f"{where}.module.kind", "expected ring, residue or truncation")
    if task == "tilt":
        _expect(isinstance(p.get("torsion_generators"), list), f"{where}.torsion_generators", "expected a list")
        for k, g in enumerate(p["torsion_generators"]):
            _validate_object(g, f"{where}.torsion_generators[{k}]")
        checks = p.get("checks", ["torsion_pair", "cotilting"])
        _expect(isinstance(checks, list) and all(c in TILT_CHECKS for c in checks), f"{where}.checks",
                f"expected a list drawn from {list(TILT_CHECKS)}")
        _pos_int(p, "cap", where)
        _pos_int(p, "samples", where)
        if "decompose" in p:
            _validate_object(p["decompose"], f"{where}.decompose")
    if task == "selftest":
        if "criteria" in p:
            _expect(isinstance(p["criteria"], list), f"{where}.criteria", "expected a list")
        if "mutate" in p:
            _expect(p["mutate"] in (False, True, "cone-sign"), f"{where}.mutate", "expected false or \"cone-sign\"")


# ------------------------------------------------------------- object building


def make_algebra(a) -> al.PathAlgebra:
    if isinstance(a, str):
        return al.builtin(a)
    q = al.Quiver.make(a["vertices"], a.get("arrows", []), a.get("relations", []))
    return al.path_algebra(q, name=a.get("name", "custom"))


def make_object(A: al.PathAlgebra, o: dict, rng):
    """Module complex (or module) described by ``o``."""
    kind = next(k for k in o if k in OBJECT_KINDS)
    body = o[kind]
    q = A.quiver
    P, S = al.standard_modules(A)
    if kind == "simple":
        X = cx.module_complex(S[q.vertex_index(body)])
    elif kind == "projective":
        X = cx.module_complex(P[q.vertex_index(body)])
    elif kind == "free":
        X = cx.module_complex(al.free_module(A))
    elif kind == "zero":
        X = cx.zero_complex(A)
    elif kind == "module":
        X = cx.module_complex(al.Module(A, body["dims"], body.get("mats", [])))
    elif kind == "random_module":
        X = cx.module_complex(al.random_module(A, rng, body.get("max_dim", 3)))
    elif kind == "random_complex":
        X = cx.random_complex(A, rng, width=body.get("width", 3), max_dim=body.get("max_dim", 3),
                              lo=body.get("lo"))
    elif kind == "complex":
        terms = [al.Module(A, t["dims"], t.get("mats", [])) for t in body["terms"]]
        diffs = [al.ModuleMap(terms[k], terms[k + 1], blocks) for k, blocks in enumerate(body.get("diffs", []))]
        X = cx.Complex(A, body.get("lo", 0), terms, diffs).check()
    else:  # sum
        parts = [make_object(A, x, rng) for x in body]
        X = cx.direct_sum_complexes(parts) if parts else cx.zero_complex(A)
    return cx.shift(X, o.get("shift", 0)) if o.get("shift") else X


def _dims_table(X) -> dict:
    return {str(i): list(d) for i, d in sorted(cx.homology_dims(X).items()) if any(d)}


# ------------------------------------------------------------------- tasks


def task_algebra(sc, rng):
    A = make_algebra(sc["algebra"])
    p = sc.get("params", {})
    P, S = al.standard_modules(A)
    out = {"name": A.name, "vertices": list(A.quiver.vertices), "dim": A.dim,
           "cartan": A.cartan.tolist(), "projectives": [list(M.dims) for M in P],
           "simples": [list(M.dims) for M in S]}
    w = p.get("window", 6)
    if "hom" in p:
        a, b = (make_object(A, x, rng) for x in p["hom"])
        out["derived_hom"] = {str(j): d for j, d in sorted(cx.derived_hom_dims(a, b, w).items())}
    if "ext" in p:
        a, b = (make_object(A, x, rng) for x in p["ext"])
        out["derived_hom_ext"] = {str(j): d for j, d in sorted(cx.derived_hom_dims(a, b, w).items()) if j >= 0}
    return "COMPUTED", out, {}


def task_resolve(sc, rng):
    A = make_algebra(sc["algebra"])
    p = sc["params"]
    X = make_object(A, p["object"], rng)
    P = cx.as_perf(X)
    m, _, _ = cx.minimalize(P)
    out = {"homology": _dims_table(X), "projective_model": perf_to_json(P), "minimal_model": perf_to_json(m),
           "minimal_size": m.size()}
    ok = _dims_table(m) == _dims_table(X)
    return ("COMPUTED" if ok else "FAIL"), out, {}


def task_level(sc, rng):
    A = make_algebra(sc["algebra"])
    p = sc["params"]
    X = make_object(A, p["object"], rng)
    gens = [make_object(A, g, rng) for g in p.get("gens", [{"free": {}}])]
    cap = p.get("cap", 3)
    b = lv.level_upper_bound(X, gens, search_cap=cap)
    out = {"homology": _dims_table(X), "verdict": b.verdict, "level": b.level, "strategy": b.strategy}
    if b.cert is None:
        return "FAIL", out, {"cap": cap}
    rep = lv.verify_certificate(X, b.cert, gens, seed=sc.get("seed", 0))
    out.update({"size": rep.size, "verify": rep.verdict, "certificate": cert_to_json(b.cert)})
    return ("PASS" if rep.passed else "FAIL"), out, {"cap": cap}


def task_brown(sc, rng):
    A = make_algebra(sc["algebra"])
    p = sc["params"]
    X = make_object(A, p["backing"], rng)
    steps = p.get("steps", 4)
    w = p.get("window", 6)
    gens = [cx.as_perf(make_object(A, g, rng)) for g in p.get("gens", [{"free": {}}])]
    oracle = br.MaskedOracle(br.RepresentedOracle(X))
    res = br.representability_pipeline(oracle, gens, steps // 2)
    N = res.recovered
    tables, ok = {}, True
    for v, S in enumerate(al.standard_modules(A)[1]):
        Sp = cx.as_perf(S)
        H = cx.HomComplex(Sp, N)
        got = {j: H.dim(-j) for j in range(-w, w + 1)}
        want = {j: oracle.eval(Sp.shift(j)) for j in range(-w, w + 1)}
        ok = ok and got == want
        tables[str(A.quiver.vertices[v])] = {"recovered": got, "oracle": want}
    out = {"stages": [s.obj.size() for s in res.system.stages], "recovered": perf_to_json(N),
           "recovered_homology": _dims_table(N), "backing_homology": _dims_table(X),
           "hom_tables": tables, "oracle_queries": len(oracle.log)}
    out["homology_matches_backing"] = out["recovered_homology"] == out["backing_homology"]
    return ("PASS" if ok else "FAIL"), out, {"steps": steps, "window": w}


def task_k0(sc, rng):
    A = make_algebra(sc["algebra"])
    p = sc["params"]

    def vec(x):
        return list(x) if isinstance(x, list) else list(kz.class_of(make_object(A, x, rng)))
    lattice = [vec(g) for g in p["lattice"]]
    target = vec(p["target"])
    m = kz.k0_membership(target, lattice)
    out = {"target": target, "lattice": lattice, "member": m.verdict, "coefficients": m.coefficients,
           "obstruction": m.obstruction, "invariant_factors": m.invariant_factors}
    if "box" in p:
        b = kz.brute_force_membership(target, lattice, p["box"])
        out["brute_force"] = "YES" if b is not None else "NO"
        return ("PASS" if (b is not None) == m.member else "FAIL"), out, {"box": p["box"]}
    return "COMPUTED", out, {}


_RING_NAMES = {"polynomial": "polynomial_2", "quantum": "quantum_plane", "field": "field"}


def _graded_ring(g):
    return gr.graded_builtin(_RING_NAMES[g["ring"]], g.get("q"))


def _graded_module(R, m):
    if m is None or m["kind"] == "ring":
        return gr.twisted_ring(R, m.get("twist", 0)) if m else gr.free_graded_module(R)
    if m["kind"] == "residue":
        return gr.residue_field(R)
    return gr.truncation_quotient(R, m.get("n", 2))


def task_graded(sc, rng):
    R = _graded_ring(sc["graded"])
    p = sc.get("params", {})
    window = _window(p, "window", "$.params", (-8, 8))
    i_max = p.get("i_max", 3)
    out, flags, status = {}, {}, "COMPUTED"
    for op in p.get("ops", ["serre"]):
        if op == "serre":
            lo, hi = _window(p, "range", "$.params", (-6, 6))
            m = p.get("m", 0)
            rows = {}
            for n in range(lo, hi + 1):
                t = gr.serre_ext_table(R, m, n, i_max)
                rows[str(n)] = [t.dims[i] for i in range(i_max + 1)]
                flags[f"serre[{n}]"] = t.stabilized
            out["serre"] = rows
        elif op == "local_cohomology":
            M = _graded_module(R, p.get("module"))
            lc = gr.local_cohomology_table(M, i_max, window)
            out["local_cohomology"] = {str(i): {str(d): v for d, v in sorted(w.dims.items())} for i, w in lc.items()}
            for i, w in lc.items():
                flags[f"R{i}tau"] = w.stabilized
        elif op == "chi":
            c = gr.chi_check(R, i_max, window)
            out["chi"] = {"verdict": c.verdict, "bounds": c.bounds, "cohomological_dimension":
                          c.cohomological_dimension, "reason": c.reason}
            flags["chi"] = c.stabilized
            if c.verdict != "PASS":
                status = "FAIL"
        elif op == "twist_bound":
            t = gr.twist_bound(R, window)
            out["twist_bound"] = {"l": t.l, "cones": t.cones, "d": t.d, "ext_twists": t.ext_twists,
                                  "observed_l": t.observed_l}
        elif op == "certificate":
            c = gr.twist_certificate(R, p.get("n", 3))
            out["certificate"] = {"n": c.n, "left": c.left, "middle": c.middle, "exact": c.exact,
                                  "injective": c.injective, "torsion_cokernel": c.torsion_cokernel,
                                  "level": c.level, "verified": c.verified}
            if not c.verified:
                status = "FAIL"
        elif op == "strong_gen":
            s = gr.strong_gen_window(R, window)
            out["strong_gen"] = {"a": s.a, "b": s.b, "d": s.d, "h": s.h, "l": s.l, "l_opp": s.l_opp,
                                 "constituents": s.constituents}
        elif op == "betti":
            out["betti"] = gr.betti_table(_graded_module(R, p.get("module")), p.get("hom_cap", 4))
        elif op == "ext_kk":
            out["ext_kk"] = gr.ext_kk_table(R, i_max)
        elif op == "tilting":
            b = gr.tilting_bridge(R, p.get("twists", [0, 1]), window,
                                  require_tilting=p.get("require_tilting", True))
            out["tilting"] = {"tilting": b.tilting, "vertices": list(b.algebra.quiver.vertices),
                              "arrows": [list(a) for a in b.algebra.quiver.arrows], "relations": b.relation_count,
                              "dim": b.algebra.dim, "hom_dims": {f"{a},{c}": v for (a, c), v in b.hom_dims.items()}}
        elif op == "koszul":
            K = gr.graded_koszul_complex([dict([((1, 0), 1)]), dict([((0, 1), 1)])], R)
            lo, hi = window
            out["koszul"] = {str(k): K.homology_dims(k, lo, hi) for k in range(3)}
    return status, out, {"window": list(window), "stabilization": flags}


def task_tilt(sc, rng):
    A = make_algebra(sc["algebra"])
    p = sc["params"]
    seed = sc.get("seed", 0)
    gens = [make_object(A, g, rng) for g in p["torsion_generators"]]
    mods = []
    for g in gens:
        H = {i: cx.homology(g, i) for i in range(g.lo, g.hi + 1)}
        live = [M for M in H.values() if M.dim]
        mods.extend(live)
    pair = ts.TorsionPairSpec(A, mods, "cli")
    cap = p.get("cap", 6)
    samples = p.get("samples", 200)
    out, ok = {}, True
    for c in p.get("checks", ["torsion_pair", "cotilting"]):
        if c == "torsion_pair":
            v = ts.is_torsion_pair(pair, cap, seed=seed)
        elif c == "cotilting":
            v = ts.cotilting_check(pair, cap, seed=seed)
        elif c == "tilting":
            v = ts.tilting_check(pair, cap, seed=seed)
        elif c == "heart":
            v = ts.heart_check(pair, cap, seed)
        elif c == "quasi_abelian":
            st = ts.quasi_abelian_probe(pair, samples, seed, cap)
            out[c] = {"samples": st.samples, "epi_pass": st.epi_pass, "mono_pass": st.mono_pass}
            ok = ok and st.all_strict
            continue
        elif c == "chain":
            ch = ts.noetherian_chain_probe(pair, seed=seed, cap=cap)
            out[c] = {"chains": ch.chains, "max_length": ch.max_length, "bound": ch.bound,
                      "stationary": ch.stationary}
            ok = ok and ch.stationary
            continue
        else:
            M = make_object(A, p.get("decompose", {"free": {}}), rng)
            d = ts.torsion_part(pair, cx.homology(M, 0))
            out[c] = {"t": list(d.t.dims), "f": list(d.f.dims)}
            continue
        out[c] = {"verdict": v.verdict, "mode": v.mode, "cap": v.cap, "details": v.details}
        ok = ok and v.passed
    out["generators"] = [module_to_json(M) for M in mods]
    return ("PASS" if ok else "FAIL"), out, {"cap": cap, "samples": samples}


def task_selftest(sc, rng):
    p = (sc or {}).get("params", {})
    mutate = bool(p.get("mutate", False))
    only = p.get("criteria")
    warnings = []
    if only is not None and not only:
        warnings.append("empty criterion list: nothing to run, vacuous PASS")
        print("warning: " + warnings[0], file=sys.stderr)
        return "PASS", {"criteria": [], "warnings": warnings}, {}
    results = ac.run_suite(mutate=mutate, only=set(only) if only else None)
    rows = [{"key": r.key, "title": r.title, "verdict": r.verdict, "details": r.details} for r in results]
    ok = all(r.passed for r in results)
    out = {"criteria": rows, "summary": [f"{r.key} {r.verdict}" for r in results], "mutated": mutate}
    return ("PASS" if ok else "FAIL"), out, {}


DISPATCH = {"algebra": task_algebra, "resolve": task_resolve, "level": task_level, "brown": task_brown,
            "k0": task_k0, "graded": task_graded, "tilt": task_tilt, "selftest": task_selftest}


# ------------------------------------------------------------------ driver


def run_scenario(task: str, sc: dict | None, seed_override: int | None = None) -> tuple[int, dict]:
    """Validate and run one scenario; returns (exit code, report)."""
    if sc is None:
        sc = {}
    try:
        validate(sc, task)
    except SchemaError as exc:
        return 2, {"task": task, "status": "ERROR", "error": f"schema: {exc}"}
    seed = seed_override if seed_override is not None else sc.get("seed", 0)
    sc = dict(sc, seed=seed)
    rng = np.random.default_rng(seed)
    try:
        status, result, prov = DISPATCH[task](sc, rng)
    except Exception as exc:  # module errors are reported verbatim
        return 2, {"task": task, "status": "ERROR", "error": f"{type(exc).__name__}: {exc}"}
    report = {"task": task, "scenario": sc, "status": status, "result": result,
              "provenance": {"prime": PRIME, "seed": seed, **prov}}
    return (1 if status == "FAIL" else 0), jsonable(report)


def load_scenario(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _job(args):
    task, path, seed = args
    if path is None:
        return run_scenario(task, None, seed)
    try:
        sc = load_scenario(path)
    except (OSError, json.JSONDecodeError) as exc:
        return 2, {"task": task, "status": "ERROR", "error": f"{path}: {exc}"}
    code, rep = run_scenario(task, sc, seed)
    rep["path"] = path
    return code, rep


def dumps(report) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levelforge", description=__doc__.splitlines()[0])
    ap.add_argument("task", choices=TASKS)
    ap.add_argument("scenarios", nargs="*", help="scenario JSON files (selftest needs none)")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--seed", type=int, help="override the scenario seed")
    ap.add_argument("--jobs", type=int, default=1, help="run independent scenarios in parallel")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return 2
    paths = args.scenarios
    if not paths:
        if args.task != "selftest":
            print(f"error: {args.task} needs a scenario file", file=sys.stderr)
            return 2
        paths = [None]
    jobs = [(args.task, p, args.seed) for p in paths]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_job, jobs))
    else:
        results = [_job(j) for j in jobs]
    code = max(c for c, _ in results)
    report = results[0][1] if len(results) == 1 else {"reports": [r for _, r in results]}
    if args.task == "selftest":
        for r in (results[0][1].get("result", {}).get("criteria", []) if len(results) == 1 else []):
            print(f"{r['key']:>3} {r['verdict']}  {r['title']}", file=sys.stderr)
    for _, r in results:
        if r.get("status") == "ERROR":
            print(f"error: {r['error']}", file=sys.stderr)
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
