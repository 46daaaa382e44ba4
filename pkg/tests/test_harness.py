import csv
import io
import json
from fractions import Fraction

import pytest

from ldplpp import harness
from ldplpp.cli import main
from ldplpp.errors import ValidationError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exact_command_all_routes(capsys):
    code, out, _ = run(capsys, "exact", "--n", "2", "--m", "1", "--ell", "1", "--q2", "1/2")
    assert code == 0
    data = json.loads(out)
    assert [r["value"] for r in data["rows"]] == ["1/2"] * 3
    assert all(r["certified_exact"] for r in data["rows"])
    assert data["meta"]["params"]["q2"] == "1/2" and data["meta"]["tool"] == "ldplpp"


def test_exact_command_single_route_csv(capsys):
    code, out, _ = run(capsys, "exact", "--n", "3", "--m", "3", "--ell", "2", "--q2", "0.25", "--route", "jue", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# tool:")
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    assert len(rows) == 1 and rows[0]["route"] == "JueDeterminant"


@pytest.mark.parametrize(
    "argv",
    [
        ("exact", "--n", "2", "--m", "1", "--ell", "1", "--q2", "3/2"),
        ("exact", "--n", "2", "--m", "1", "--q2", "1/2"),
        ("converge", "--q2", "1/2", "--delta", "1", "--N-list", "16,8"),
        ("simulate", "--q2", "1/2", "--trials", "0"),
        ("converge", "--q2", "1/2", "--delta", "1", "--gamma", "1/2", "--N-list", "8"),
        ("exact", "--q2", "half"),
        ("bogus",),
    ],
)
def test_malformed_input_exits_2(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_uptail_regime_violation_exit_code(capsys):
    code, _, err = run(capsys, "uptail", "--q2", "1/2", "--delta", "4", "--N-list", "4")
    assert code == 3 and "omega" in err


def test_converge_rows(capsys, tmp_path):
    out = tmp_path / "c.json"
    code, _, _ = run(capsys, "converge", "--q2", "1/2", "--delta", "1", "--N-list", "8,16", "--out", str(out))
    assert code == 0
    data = json.loads(out.read_text())
    res = [abs(float(r["residual"])) for r in data["rows"]]
    assert res[0] > res[1]
    assert data["meta"]["regime"] == "LowerSquare"


def test_uptail_rows(capsys):
    code, out, _ = run(capsys, "uptail", "--q2", "1/2", "--delta", "6", "--N-list", "4,8")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert abs(float(rows[1]["residual"])) < abs(float(rows[0]["residual"]))
    assert rows[0]["U2"] == "-1.0"


def test_simulate_is_byte_identical(capsys):
    argv = ("simulate", "--q2", "1/2", "--N-list", "20", "--trials", "50", "--seed", "3", "--delta", "5", "--path")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0 and first[1] == second[1]
    meta = json.loads(first[1])["meta"]
    assert meta["summary"]["path"][0] == [1, 1] and meta["summary"]["path"][-1] == [20, 20]


def test_simulate_raw_rows(capsys):
    code, out, _ = run(capsys, "simulate", "--q2", "1/2", "--N-list", "5", "--trials", "7", "--raw")
    assert code == 0 and len(json.loads(out)["rows"]) == 7


@pytest.mark.parametrize(
    "extra",
    [
        ("--q2", "1/2", "--delta", "1"),
        ("--q2", "1/2", "--delta", "6"),
        ("--kind", "tue-weak", "--c", "1/2", "--z", "3/10", "--s", "1"),
        ("--kind", "tue-strong", "--c", "1/2", "--rho", "1", "--z", "0.8", "--t", "1"),
        ("--kind", "jue", "--alpha", "0", "--beta", "2", "--d", "0.6"),
    ],
)
def test_asymptote_kinds(capsys, extra):
    code, out, _ = run(capsys, "asymptote", "--N-list", "10,20", *extra)
    assert code == 0
    data = json.loads(out)
    assert set(data["meta"]["coefficients"]) == {"c2", "c1", "clog", "c0"}
    assert len(data["rows"]) == 2


def test_asymptote_critical_circle(capsys):
    code, _, _ = run(capsys, "asymptote", "--kind", "tue-weak", "--c", "1/2", "--z", "1/2")
    assert code == 3


def test_verify_passes_and_fault_is_caught(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    report = harness.VerificationReport.from_dict(
        {"passed": json.loads(out)["meta"]["passed"], "checks": json.loads(out)["rows"]}
    )
    assert report.passed and len(report.checks) >= 6
    code, out, _ = run(capsys, "verify", "--inject-fault", "duality-constant")
    assert code == 5
    failed = [r for r in json.loads(out)["rows"] if r["status"] == "fail"]
    assert [r["name"] for r in failed] == ["duality_grid"]


def test_report_round_trip():
    report = harness.VerificationReport([harness.CheckRecord("x", "anchor", "pass", 0.0, 0.1, "")])
    again = harness.VerificationReport.from_dict(json.loads(json.dumps(report.to_dict())))
    assert again == report
    bad = report.to_dict()
    bad["passed"] = False
    with pytest.raises(ValidationError):
        harness.VerificationReport.from_dict(bad)


def test_validate_direct():
    harness.validate(harness.RunConfig("exact", q2=Fraction(1, 2), n=2, m=2, ell=1))
    with pytest.raises(ValidationError):
        harness.validate(harness.RunConfig("exact", q2=Fraction(1, 2), n=2, m=2, ell=1, precision=8))


def test_fmt_value():
    from mpmath import mpf

    assert harness.fmt_value(Fraction(3, 4)) == "3/4"
    assert harness.fmt_value(Fraction(4, 2)) == 2
    assert harness.fmt_value({"a": [mpf(1) / 3]})["a"][0].startswith("0.3333")
