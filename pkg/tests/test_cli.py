import json
import pathlib
import subprocess
import sys

import pytest

from levelforge import cli

SCEN = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def run(tmp_path, task, scenario, *extra):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(scenario) if not isinstance(scenario, str) else scenario)
    out = tmp_path / "out.json"
    code = cli.main([task, str(p), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_brown_scenario_recovers_simple_top(tmp_path):
    code, rep, _ = run(tmp_path, "brown", json.loads((SCEN / "brown_A2_S1.json").read_text()))
    assert code == 0 and rep["status"] == "PASS"
    assert rep["result"]["recovered_homology"] == {"0": [1, 0]}
    assert rep["result"]["homology_matches_backing"]
    assert rep["provenance"]["prime"] > 2 and rep["provenance"]["seed"] == 0


def test_level_scenario_certificate(tmp_path):
    code, rep, _ = run(tmp_path, "level", json.loads((SCEN / "level_A3_random.json").read_text()))
    assert code == 0
    assert rep["result"]["level"] <= 2 and rep["result"]["verify"] == "PASS"
    assert "certificate" in rep["result"]


@pytest.mark.parametrize("bad,where", [
    ('{"algebra": "A2", "params": {"steps": 3}}', "$.params.backing"),
    ('{"algebra": "A2", "params": {"backing": {"simple": 1}, "steps": 3}}', "$.params.steps"),
    ('{"algebra": "A2", "params": {"backing": {"simple": 1, "projective": 1}}}', "$.params.backing"),
    ('{"task": "level", "algebra": "A2", "params": {"backing": {"simple": 1}}}', "$.task"),
    ('{"algebra": "A2", "seed": -1, "params": {"backing": {"simple": 1}}}', "$.seed"),
    ('[1, 2]', "$"),
])
def test_schema_violations_exit_2(tmp_path, bad, where):
    code, rep, _ = run(tmp_path, "brown", bad)
    assert code == 2
    assert rep["status"] == "ERROR" and where in rep["error"]


def test_unparsable_file_exits_2(tmp_path):
    code, rep, _ = run(tmp_path, "brown", "{not json")
    assert code == 2 and rep["status"] == "ERROR"


def test_module_errors_are_reported(tmp_path):
    code, rep, _ = run(tmp_path, "algebra", {"algebra": "E8"})
    assert code == 2 and "unknown built-in algebra" in rep["error"]


def test_reports_are_byte_identical(tmp_path):
    sc = json.loads((SCEN / "tilt_A2.json").read_text())
    _, _, out = run(tmp_path, "tilt", sc)
    first = out.read_bytes()
    _, _, out = run(tmp_path, "tilt", sc)
    assert out.read_bytes() == first


def test_seed_override(tmp_path):
    sc = json.loads((SCEN / "level_A3_random.json").read_text())
    _, rep, _ = run(tmp_path, "level", sc, "--seed", "11")
    assert rep["provenance"]["seed"] == 11 and rep["scenario"]["seed"] == 11


def test_k0_and_graded_and_algebra(tmp_path):
    code, rep, _ = run(tmp_path, "k0", json.loads((SCEN / "k0_A2.json").read_text()))
    assert code == 0 and rep["result"]["member"] == "NO" and rep["result"]["brute_force"] == "NO"
    code, rep, _ = run(tmp_path, "graded", json.loads((SCEN / "graded_P1.json").read_text()))
    assert code == 0
    assert rep["result"]["serre"]["-3"][:2] == [0, 2] and rep["result"]["serre"]["2"][:2] == [3, 0]
    assert all(rep["provenance"]["stabilization"].values())
    code, rep, _ = run(tmp_path, "algebra", json.loads((SCEN / "algebra_A2.json").read_text()))
    assert code == 0 and rep["result"]["cartan"] == [[1, 1], [0, 1]]
    code, rep, _ = run(tmp_path, "resolve", json.loads((SCEN / "resolve_A3.json").read_text()))
    assert code == 0


def test_failing_verdict_exits_1(tmp_path):
    sc = {"algebra": "A2", "params": {"torsion_generators": [{"simple": 2}], "checks": ["cotilting"]}}
    code, rep, _ = run(tmp_path, "tilt", sc)
    assert code == 1 and rep["status"] == "FAIL"


def test_selftest_empty_and_mutated(tmp_path, capsys):
    code, rep, _ = run(tmp_path, "selftest", {"params": {"criteria": []}})
    assert code == 0 and rep["result"]["warnings"]
    assert "warning" in capsys.readouterr().err
    code, rep, _ = run(tmp_path, "selftest", {"params": {"mutate": "cone-sign"}})
    assert code == 1 and rep["result"]["summary"] == ["T FAIL"]


def test_selftest_subset(tmp_path):
    code, rep, _ = run(tmp_path, "selftest", {"params": {"criteria": ["C5", "C11"]}})
    assert code == 0 and rep["result"]["summary"] == ["C5 PASS", "C11 PASS"]


def test_parallel_jobs_keep_order(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text((SCEN / "level_A3_random.json").read_text())
    b.write_text(json.dumps({"algebra": "A2", "params": {"object": {"simple": 1}}}))
    out1, out2 = tmp_path / "o1.json", tmp_path / "o2.json"
    assert cli.main(["level", str(a), str(b), "--jobs", "2", "--out", str(out1)]) == 0
    assert cli.main(["level", str(a), str(b), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert [r["path"] for r in json.loads(out1.read_text())["reports"]] == [str(a), str(b)]


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "levelforge", "brown", str(SCEN / "malformed.json")],
                         capture_output=True, text=True)
    assert out.returncode == 2 and "$.params.backing" in out.stderr


def test_certificate_json_round_trip():
    import numpy as np
    from levelforge import algebra as al, complexes as cx, levels as lv
    from levelforge.serialize import cert_from_json, cert_to_json, perf_from_json, perf_to_json

    A = al.linear_A(3)
    rng = np.random.default_rng(5)
    X = cx.random_complex(A, rng)
    P = cx.as_perf(X)
    assert perf_from_json(A, json.loads(json.dumps(perf_to_json(P)))).size() == P.size()
    gens = [cx.as_perf(al.free_module(A))]
    b = lv.level_upper_bound(X, gens)
    back = cert_from_json(A, json.loads(json.dumps(cert_to_json(b.cert))))
    assert cert_to_json(back) == cert_to_json(b.cert)
    assert lv.verify_certificate(X, back, gens).passed
