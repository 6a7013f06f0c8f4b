"""All acceptance criteria at their stated sizes and tolerances, one line each."""
import pytest

from levelforge import acceptance as ac

from conftest import ACCEPTANCE_LINES

KEYS = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C13", "T"]


@pytest.fixture(scope="module")
def suite():
    return {r.key: r for r in ac.run_suite()}


@pytest.mark.parametrize("key", KEYS)
def test_criterion(suite, key):
    r = suite[key]
    line = ac.format_line(r)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert r.passed, r.details


def test_sizes_are_as_stated(suite):
    assert suite["C1"].details["backings"] >= 50
    assert suite["C1"].details["within_budget"]
    assert len(suite["C4"].details["levels"]) == 30
    assert suite["C10"].details["samples"] == 30
    assert suite["C12"].details["samples"] == 200
    assert suite["C13"].details["instances"] == 50
    assert suite["C13"].details["nonzero_attaching_maps"] > 0


def test_sign_flipped_cone_is_caught():
    (r,) = ac.run_suite(mutate=True)
    line = ac.format_line(r) + "  [mutation: cone sign flipped, expected FAIL]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert not r.passed
    assert any(p["invariant"] == "d∘d = 0" for p in r.details["problems"])
    # the patch is undone afterwards
    assert ac.triangle_exactness(trials=3).passed
