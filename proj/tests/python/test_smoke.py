import json
import math
from pathlib import Path

import pytest

import uiobs

SYSTEMS = Path(__file__).resolve().parents[2] / "systems"


def test_simplify_and_differentiate():
    states = ["r", "phi", "theta"]
    assert uiobs.simplify("r + r", states) == "2*r"
    assert uiobs.differentiate("r^2*phi", "r", states) == "2*r*phi"
    assert uiobs.evaluate("sin(theta - phi)/r", states, [2.0, 0.3, 0.9]) == pytest.approx(math.sin(0.6) / 2.0)


def test_lie_operations():
    states = ["x", "y", "theta"]
    assert uiobs.lie_derivative(["cos(theta)", "sin(theta)", "0"], "x", states) == "cos(theta)"
    bracket = uiobs.lie_bracket(["0", "0", "1"], ["cos(theta)", "sin(theta)", "0"], states)
    assert bracket == ["-sin(theta)", "cos(theta)", "0"]


def test_unknown_identifier():
    with pytest.raises(uiobs.UnknownIdentifier):
        uiobs.simplify("cos(q)", ["r"])


def test_analyze_file_single_input():
    report = uiobs.analyze(SYSTEMS / "range_v.json")
    assert report.exit_code == uiobs.EXIT_OK
    data = report.data
    assert data["path"] == "single"
    assert data["single_ui"]["m_prime"] == 2
    assert data["single_ui"]["m_star"] == 2
    assert data["single_ui"]["rank"] == 2
    assert report.verdicts == {"r": "OBSERVABLE", "phi": "NOT-OBSERVABLE", "theta": "NOT-OBSERVABLE"}
    assert "m' = 2" in report.text


def test_analyze_spec_eorc():
    spec = json.loads((SYSTEMS / "gps_unknown.json").read_text())
    report = uiobs.analyze_spec(spec)
    assert report.exit_code == 0
    assert report.data["path"] == "eorc"
    assert report.data["eorc"]["k_used"] == 1
    assert set(report.verdicts.values()) == {"OBSERVABLE"}


def test_single_mode_rejects_two_unknown_inputs():
    report = uiobs.analyze(SYSTEMS / "gps_unknown.json", mode="single")
    assert report.exit_code == uiobs.EXIT_SPEC_ERROR
    assert report.data["error"]["kind"] == "spec"


def test_invalid_spec_raises():
    with pytest.raises(uiobs.SpecError):
        uiobs.analyze_spec({"states": ["a"], "outputs": ["b"], "x0": [0.0]})


def test_reports_are_deterministic():
    a = uiobs.analyze(SYSTEMS / "angle_omega.json", seed=7)
    b = uiobs.analyze(SYSTEMS / "angle_omega.json", seed=7)
    assert a.raw == b.raw
