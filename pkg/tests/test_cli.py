import json

import pytest
from click.testing import CliRunner

from spectralcover.cli import curve_info, main


@pytest.fixture
def runner():
    return CliRunner()


def _strip_timing(report):
    for c in report["checks"]:
        c["timing"] = 0
        if isinstance(c["witness"], dict):
            c["witness"].pop("timing", None)
    report.pop("timing", None)
    return report


def test_even_prime_is_config_error(runner):
    res = runner.invoke(main, ["suite", "--prime", "2", "--trials", "1"])
    assert res.exit_code == 2


def test_branch_collision_is_config_error(runner):
    res = runner.invoke(main, ["suite", "--lambda", "1", "--trials", "1"])
    assert res.exit_code == 2
    assert "branch-point collision" in res.output


def test_unknown_suite_is_config_error(runner):
    res = runner.invoke(main, ["suite", "--suites", "nonsense"])
    assert res.exit_code == 2


def test_bad_branch_token(runner):
    res = runner.invoke(main, ["suite", "--family", "p1-six", "--branch", "0,1,2,3,4,x"])
    assert res.exit_code == 2


def test_tiny_ceiling_is_config_error(runner):
    res = runner.invoke(main, ["suite", "--ext-ceiling", "10"])
    assert res.exit_code == 2


@pytest.mark.parametrize("kind,pair", [("p1-five", (2, 3)), ("p1-six", (3, 5))])
def test_curve_info_genera_over_small_field(kind, pair):
    for seed in range(6):
        info = curve_info(kind, 11, seed=seed)
        if info["certificates"]["X_s"] and info["certificates"]["Y_r"]:
            assert (info["X_s"]["genus"], info["Y_r"]["genus"]) == pair
            assert info["xi_degree"] == 2
            assert set(info["point_counts"]) == {"X_s", "Y", "Y_r"}
            return
    pytest.fail("no generic section among six seeds over F_11")


def test_curve_info_explicit_coefficients(runner):
    res = runner.invoke(main, ["curve-info", "--prime", "11", "--s", "4,2"])
    assert res.exit_code == 0, res.output
    info = json.loads(res.output)
    assert info["s"] == [4, 2]
    assert info["family"] == "p1-five"


def test_curve_info_wrong_coefficient_count(runner):
    res = runner.invoke(main, ["curve-info", "--prime", "11", "--s", "1,2,3"])
    assert res.exit_code == 2


def test_small_suite_report_shape_and_determinism(runner, tmp_path):
    args = ["suite", "--prime", "101", "--trials", "2", "--suites", "fields,divisors,elem",
            "--genericity-draws", "10"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    r1 = runner.invoke(main, args + ["--json", str(a)])
    r2 = runner.invoke(main, args + ["--json", str(b)])
    assert r1.exit_code == 0, r1.output
    assert r2.exit_code == 0
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert ra["schema"] == "spectralcover.report/1"
    assert ra["summary"]["failed"] == 0
    for c in ra["checks"]:
        assert set(c) == {"suite", "name", "ref", "pass", "witness", "timing"}
    assert _strip_timing(ra) == _strip_timing(rb)
    assert "checks passed" in r1.output


def test_example_command_runs(runner, tmp_path):
    out = tmp_path / "ex.json"
    res = runner.invoke(main, ["example", "p1-five", "--trials", "1", "--json", str(out)])
    assert res.exit_code == 0, res.output
    report = json.loads(out.read_text())
    assert report["curve_info"]["X_s"]["genus"] == 2
    assert {c["suite"] for c in report["checks"]} >= {"curves", "etale", "theorem"}


def test_scenario_file_and_flag_precedence(runner, tmp_path):
    scn = tmp_path / "scn.json"
    scn.write_text(json.dumps({"family": "p1-six", "prime": 11, "s": [1, 2, 3]}))
    res = runner.invoke(main, ["curve-info", "--scenario", str(scn)])
    assert res.exit_code == 0, res.output
    info = json.loads(res.output)
    assert (info["family"], info["prime"], info["s"]) == ("p1-six", 11, [1, 2, 3])
    res = runner.invoke(main, ["curve-info", "--scenario", str(scn), "--prime", "13"])
    assert json.loads(res.output)["prime"] == 13


@pytest.mark.parametrize("content", ['{"prime": "x"}', '{"colour": 1}', "[1, 2]", "not json"])
def test_bad_scenario_file(runner, tmp_path, content):
    scn = tmp_path / "bad.json"
    scn.write_text(content)
    assert runner.invoke(main, ["suite", "--scenario", str(scn)]).exit_code == 2
