"""Acceptance battery: one test per criterion, each printing a single verdict line.

Criteria run serially, so the wall-clock time is checked against the budget here as
well as the CPU time the suite itself charges.
"""

import math

import pytest

from hamca import acceptance
from hamca.acceptance import PASS, SuiteConfig, run_criterion

CFG = SuiteConfig(seed=0)


def check(cid: int, capsys) -> dict:
    res = run_criterion(cid, CFG)
    with capsys.disabled():
        print(f"\n{res.line()}  wall {res.seconds:.2f}s")
    assert res.status == PASS, res.detail
    assert res.cpu_seconds < res.budget_s and res.seconds < res.budget_s
    return res.detail


def test_criterion_01_pauli_run(capsys):
    d = check(1, capsys)
    assert (d["antiperiod"], d["period"], d["ontological"]) == (6, 12, True)
    assert d["sequence_mismatch_at"] == []


def test_criterion_02_action_vanishes(capsys):
    d = check(2, capsys)
    assert d["hamiltonians"] == 100 and d["nonzero_cases"] == []


def test_criterion_03_stationarity(capsys):
    d = check(3, capsys)
    assert d["trials"] == 100
    assert d["solutions_not_stationary"] == [] and d["corruptions_undetected"] == []


def test_criterion_04_conservation(capsys):
    d = check(4, capsys)
    assert (d["hamiltonians"], d["steps"]) == (50, 10_000)
    assert d["non_constant"] == [] and d["noncommuting_drift_observed"]


def test_criterion_05_closed_form(capsys):
    d = check(5, capsys)
    assert d["max_relative_deviation"] <= 1e-9 and d["composition_failures"] == []


def test_criterion_06_dispersion(capsys):
    d = check(6, capsys)
    assert d["grid_error"] <= 1e-12 and d["band_edges_exact"]
    assert d["stationary_relative_residual"] <= 1e-12


def test_criterion_07_sampling_bridge(capsys):
    d = check(7, capsys)
    assert d["windows"] == [256, 512, 1024, 2048, 4096]
    res = d["midpoint_residuals"]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert d["sample_points_exact"] and d["Q_cos_within_estimate"]
    assert d["Q_vs_q_symmetrized"] <= 1e-9


def test_criterion_08_multipartite(capsys):
    d = check(8, capsys)
    assert d["pairs"] >= 50 and d["naive_fails_on_witness"]
    assert d["eom_nonzero"] == [] and d["corrected_rule_failures"] == [] and d["correlator_not_factorized"] == []


def test_criterion_09_uncertainty(capsys):
    d = check(9, capsys)
    assert d["robertson_min_slack"] >= -1e-10
    assert abs(d["wide_gaussian_product"] - 0.5) <= 0.025
    for bound, rep in d["min_deltaX"].items():
        assert rep["target"] == pytest.approx(1 / math.sqrt(2))
        assert "discrepancy" in rep
        with capsys.disabled():
            print(f"    min dX under {bound!r} bound: {rep['dX_min']} (target {rep['target']:.4f}, "
                  f"discrepancy {rep['discrepancy']})")


def test_criterion_10_linearity(capsys):
    d = check(10, capsys)
    assert d["trials"] == 100 and d["single_failures"] == [] and d["multi_failures"] == []


def test_all_criteria_registered():
    assert sorted(acceptance.CRITERIA) == list(range(1, 11))
