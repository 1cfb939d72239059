"""End-to-end smoke of the python facade against the C++ core."""

import json

import pytest

import clustersend as cs

SCENARIO = {
    "system": {
        "c1": {"n": 8, "faulty": [0, 2, 3]},
        "c2": {"n": 7, "faulty": [0, 2]},
        "model": "byzantine",
        "signing": "cluster",
    },
    "value": "0xdeadbeef",
}


def test_bounds_values():
    assert cs.sigma(7, 2, 7, 2) == 5
    assert cs.tau(7, 2, 7, 2) == 7
    report = cs.sigma_report(8, 3, 7, 2)
    assert report["value"] == 6
    assert report["kind"] == "sigma"
    assert cs.guarded_term(5, 0) == 0
    assert cs.guarded_term(5, 3) == 5


def test_binding_clause_can_cross_sizes():
    # The sender-side deletion game binds even though the receiving cluster
    # is larger; the oracle agrees exactly.
    assert cs.sigma(3, 1, 4, 3) == 8
    assert cs.min_schedule_size(3, 1, 4, 3) == (8, False)


def test_oracle_matches_closed_form():
    assert cs.min_schedule_size(3, 1, 3, 1) == (3, False)
    value, hit_cap = cs.min_schedule_size(3, 1, 3, 1, cap=2)
    assert hit_cap


def test_validation_codes():
    assert cs.validate(8, 3, 7, 2, "byzantine", "cluster") == []
    codes = cs.validate(4, 2, 3, 1, "byzantine", "cluster")
    assert "c1.n>2f" in codes
    assert "signing.none-requires-crash-or-omit" in cs.validate(3, 1, 3, 1, "byzantine", "none")


def test_selection():
    choice = cs.select_protocol(8, 3, 7, 2, "byzantine", "cluster")
    assert choice["protocol"] == "bs-bcs"
    assert choice["flavor"] == "bcs"
    choice = cs.select_protocol(13, 4, 4, 1, "byzantine", "cluster")
    assert choice["protocol"] == "spbs"
    assert choice["alpha"] == 7


def test_run_scenario_roundtrip():
    transcript = cs.run(SCENARIO)
    assert transcript["protocol"] == "bs-bcs"
    assert transcript["metrics"]["msgs"] == 6
    assert transcript["receipt"] and transcript["agreement"] and transcript["confirmation"]
    # Same scenario as raw json text.
    again = json.loads(cs.run_scenario(json.dumps(SCENARIO)))
    assert again["metrics"] == transcript["metrics"]


def test_bounds_facade():
    report = cs.bounds(SCENARIO)
    assert report["sigma"]["value"] == 6
    assert report["tau"]["value"] == 11
    assert report["selected"]["protocol"] == "bs-bcs"


def test_verify_small_campaign():
    scenario = {
        "system": {"c1": {"n": 3, "f": 1}, "c2": {"n": 3, "f": 1},
                   "model": "byzantine", "signing": "cluster"},
        "value": "0x10203040",
    }
    report = cs.verify_scenario(json.dumps(scenario), budget=64, seeds=5)
    assert report["ok"]
    assert report["runs"] > 0


def test_config_errors_surface_as_value_error():
    with pytest.raises(ValueError):
        cs.run({"system": {"c1": {"n": 2, "f": 1}, "c2": {"n": 3, "f": 1},
                           "model": "byzantine", "signing": "cluster"}})
    with pytest.raises(ValueError):
        cs.run_scenario("{not json")
