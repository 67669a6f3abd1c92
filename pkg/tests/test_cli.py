import json
from pathlib import Path

import pytest

from pdakit import fileformat, fixtures
from pdakit.cli import main

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="module")
def fx(tmp_path_factory):
    out = tmp_path_factory.mktemp("fx")
    assert main(["--quiet", "fixtures", "--out", str(out), "--substring-len", "6"]) == 0
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    report = json.loads(captured.out) if captured.out else None
    return code, report, captured.err


def test_fixture_export(fx):
    names = {p.name for p in fx.iterdir()}
    assert {"h3.json", "colored-h3.json", "palindrome-matcher.json",
            "substring-f.json", "substring-first.json"} <= names
    assert fileformat.load(fx / "h3.json") == fixtures.all_fixtures()["h3"]


def test_run_outputs(capsys, fx):
    code, report, _ = run(capsys, "run", fx / "h3.json", "01#10#01", "--outputs")
    assert code == 0
    assert report["payload"]["outputs"] == ["00111", "011"]
    code, report, _ = run(capsys, "run", fx / "h3.json", "010")
    assert code == 0 and report["payload"]["outputs"] == []


def test_run_colors_and_paths(capsys, fx):
    code, report, _ = run(capsys, "run", fx / "colored-h3.json", "0#1#1")
    assert code == 0 and report["payload"]["colors"] == ["00111"]
    code, report, _ = run(capsys, "run", fx / "h3.json", "0#0#0", "--paths")
    accepted = [p for p in report["payload"]["paths"] if p["verdict"] == "accepted"]
    assert len(accepted) == 3


def test_run_exit_codes(capsys, fx, tmp_path):
    code, _, err = run(capsys, "run", fx / "lambda-loop.json", "0", "--bound", "10")
    assert code == 2 and "exceeds 10 steps" in err
    code, _, err = run(capsys, "run", fx / "h3.json", "0a")
    assert code == 1
    (tmp_path / "broken.json").write_text("{", encoding="utf-8")
    code, _, err = run(capsys, "run", tmp_path / "broken.json", "0")
    assert code == 1 and "JSON" in err
    code, _, _ = run(capsys, "run", tmp_path / "missing.json", "0")
    assert code == 1


def test_global_flags_before_subcommand(capsys, fx):
    code, report, _ = run(capsys, "--quiet", "run", fx / "h3.json", "##")
    assert code == 0 and report is None
    code, _, err = run(capsys, "--bound", "10", "run", fx / "lambda-loop.json", "0")
    assert code == 2


def test_normalize(capsys, fx, tmp_path):
    out = tmp_path / "ideal.json"
    code, report, _ = run(capsys, "normalize", fx / "colored-h3.json", "--regress", "4",
                          "--trace", "--out", out)
    assert code == 0
    assert report["payload"]["ideal_shape"] is True
    assert report["payload"]["regression"]["mismatches"] == []
    assert report["payload"]["trace"][0]["states"] == 32
    code, report, _ = run(capsys, "check", out, "--probe", "4")
    assert code == 0 and report["payload"]["ideal_shape"] is True
    code, report, _ = run(capsys, "normalize", out, "--regress", "3")
    assert code == 0 and report["payload"]["ideal_shape"] is True


def test_normalize_rejects_bad_partition(capsys, fx, tmp_path):
    d = json.loads((fx / "palindrome-matcher.json").read_text(encoding="utf-8"))
    d["partition"]["B"] = "nope"
    (tmp_path / "bad.json").write_text(json.dumps(d), encoding="utf-8")
    code, _, err = run(capsys, "normalize", tmp_path / "bad.json")
    assert code == 1 and "partition" in err
    code, report, _ = run(capsys, "check", tmp_path / "bad.json")
    assert code == 1 and report["payload"]["diagnostics"]
    code, _, err = run(capsys, "normalize", fx / "h3.json")
    assert code == 1


def test_reverse(capsys, fx, tmp_path):
    out = tmp_path / "rev.json"
    code, report, _ = run(capsys, "reverse", fx / "colored-h3.json", "--certify", "2", "--out", out)
    assert code == 0
    assert report["payload"]["certificates"] == {"checked": 343, "max_part": 2, "mismatches": []}
    code, report, _ = run(capsys, "reverse", out, "--certify", "1")
    assert code == 0 and report["payload"]["certificates"]["mismatches"] == []
    code, _, err = run(capsys, "reverse", fx / "h3.json")
    assert code == 1 and "colored" in err


def test_experiment_suites(capsys, fx, tmp_path):
    code, report, _ = run(capsys, "experiment", fx / "colored-h3.json", "--n", "2")
    d = report["payload"]["D"]
    assert d["011"]["2"] == d["00111"]["2"] == ["00", "01", "10", "11"]
    assert report["payload"]["union_12_23_is_full"] == {"1": True, "2": True}
    code, report, _ = run(capsys, "experiment", "--machine", fx / "palindrome-matcher.json",
                          "--n", "3", "--suite", "lemmas")
    assert code == 0 and report["payload"]["no_repeat_violations"] == 0
    csv = tmp_path / "ex.csv"
    code, report, _ = run(capsys, "experiment", fx / "colored-h3.json", "--n", "2",
                          "--suite", "ex", "--csv", csv, "--color", "1,2")
    assert csv.read_text(encoding="utf-8").splitlines()[0] == "x,H_size,E_size,E"
    code, report, _ = run(capsys, "experiment", fx / "colored-h3.json", "--n", "1", "--suite", "msc")
    assert code == 0 and len(report["payload"]["rows"]) == 2


def test_experiment_cap(capsys, fx):
    code, _, err = run(capsys, "experiment", fx / "colored-h3.json", "--n", "9")
    assert code == 1 and "--force" in err
    code, _, err = run(capsys, "experiment", fx / "colored-h3.json", "--n", "1", "--suite", "ex",
                      "--color", "7,7")
    assert code == 1


def test_reports_are_byte_stable(capsys, fx, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["experiment", fx / "colored-h3.json", "--n", "2", "--suite", "lemmas", "--quiet"]
    assert main([str(x) for x in args + ["--report", a]]) == 0
    assert main([str(x) for x in args + ["--report", b]]) == 0
    assert a.read_bytes() == b.read_bytes()
    code, report, _ = run(capsys, "run", fx / "h3.json", "##", "--timing")
    assert "timing" in report


@pytest.mark.parametrize("name, argv", [
    ("run-h3", ["run", "{fx}/h3.json", "01#10#01", "--outputs"]),
    ("dsets-h3", ["experiment", "{fx}/colored-h3.json", "--n", "2", "--suite", "dsets"]),
    ("lemmas-palindrome", ["experiment", "{fx}/palindrome-matcher.json", "--n", "2",
                           "--suite", "lemmas"]),
])
def test_golden_reports(capsys, fx, name, argv):
    # the command echo holds the fixture path, so compare with it normalized
    code = main([a.format(fx=fx) for a in argv])
    out = capsys.readouterr().out
    report = json.loads(out)
    report["command"] = [c.replace(str(fx), "{fx}") for c in report["command"]]
    report.pop("report_digest")
    golden = GOLDEN / f"{name}.json"
    assert code == 0
    assert json.dumps(report, sort_keys=True, indent=1, ensure_ascii=False) + "\n" == \
        golden.read_text(encoding="utf-8")
