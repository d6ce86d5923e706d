import json
import random

import pytest

from apfol.structures import find_isomorphisms
from apfol.suites import (
    SUITES, SuiteConfig, cyclic_group, random_graph, random_structure, report_json, run_suite,
)

FAST = ["properties-general", "properties-graphs-four-arrows", "empty-signature", "ept",
        "gn-target-corrected", "walk-sets"]


@pytest.mark.parametrize("name", FAST)
def test_small_runs_pass(name):
    r = run_suite(name, SuiteConfig(trials=3))
    assert r.passed and r.trials > 0 and r.failures == []


@pytest.mark.parametrize("name", ["properties-graphs", "gn-target", "catalog"])
def test_known_red_suites_report_failures(name):
    r = run_suite(name, SuiteConfig(trials=3))
    assert not r.passed and r.failure_count >= len(r.failures) > 0
    f = r.failures[0]
    assert set(f) == {"structure", "input", "expected", "got", "check"}


def test_report_json_is_deterministic():
    a = report_json(run_suite("properties-general", SuiteConfig(trials=4)), with_time=False)
    b = report_json(run_suite("properties-general", SuiteConfig(trials=4)), with_time=False)
    assert a == b
    data = json.loads(a)
    assert set(data) == {"suite", "passed", "trials", "failureCount", "failures", "bounds", "notes"}
    assert data["bounds"]["max_atoms"] == 2


def test_seed_controls_the_sample():
    same = [random_graph(random.Random(9), 5, 0.5).edges for _ in range(2)]
    assert same[0] == same[1]
    a = run_suite("properties-general", SuiteConfig(seed=1, trials=3))
    b = run_suite("properties-general", SuiteConfig(seed=2, trials=3))
    assert a.trials != b.trials


def test_text_report():
    text = run_suite("catalog").to_text()
    assert text.startswith("FAIL catalog: 29 checks, 4 failures")
    assert "note: graphs/central-p-transitivity" in text


def test_unknown_suite():
    with pytest.raises(KeyError, match="unknown suite"):
        run_suite("nope")
    assert list(SUITES)[0] == "properties-general"


def test_generators():
    rng = random.Random(3)
    S = random_structure(rng, 4)
    assert len(S.universe) == 4 and set(S.functions) == {"f", "g"}
    assert all(len(t) == 4 for t in S.functions.values())
    G = random_graph(rng, 5, 0.5)
    assert len(G.vertices) == 5
    Z = cyclic_group(5)
    assert len(find_isomorphisms(Z, Z)) == 4  # x -> kx for k = 1..4
