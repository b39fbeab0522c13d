import math

import pytest

import smatv


def test_power_to_level():
    assert smatv.power_to_level(0.0, 1) == pytest.approx(108.75)
    assert smatv.power_to_level(0.0, 2) == pytest.approx(108.75 - 10 * math.log10(2))


def test_cascade_cnr_matches_closed_form():
    cn, n, u, k, f = 16.0, 10, 80.0, 36.0, 8.0
    amp = -(u - k - f - 10 * math.log10(n))
    want = -10 * math.log10(10 ** (-cn / 10) + 10 ** (amp / 10))
    assert smatv.cascade_cnr(cn, n, u, k, f) == pytest.approx(want, abs=1e-12)


def test_case_study_validates_clean():
    net = smatv.case_study()
    assert len([n for n in net["nodes"] if n["kind"] == "output"]) == 60
    assert smatv.validate(net) == []


def test_simulate_counts():
    report = smatv.simulate(smatv.case_study())
    assert report["total"] == 60
    assert report["outputs_within"] + report["outputs_outside"] == 60
    assert len(report["outputs"]) == 60


def test_sweep_rows():
    rows = smatv.sweep(smatv.case_study())["rows"]
    assert [r["within"] for r in rows] == [0, 0, 24, 57, 4]


def test_scenario_override_and_errors():
    net = smatv.case_study()
    low = smatv.simulate(net, {"source_trims_db": {"terr_ant": {"TERR": -20}}})
    assert low["outputs_within"] < smatv.simulate(net)["outputs_within"]
    with pytest.raises(ValueError):
        smatv.simulate(net, {"regulators": {"ms1": {"terr": 99}}})
    with pytest.raises(ValueError):
        smatv.simulate("{")


def test_optimize_small_budget():
    result = smatv.optimize(smatv.case_study(), budget=200, seed=5)
    assert result["kind"] == "optimize"
    assert result["best_count"] >= result["start_count"]
