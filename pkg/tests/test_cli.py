import csv
import io
import json
import math

import pytest

from heisentrace import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_theorem_n1(capsys):
    code, out, _ = run(capsys, "verify", "theorem", "--n", "1")
    assert code == 0
    assert "theorem" in out and "FAIL" not in out


def test_verify_lemmas_n2(capsys):
    code, out, _ = run(capsys, "verify", "lemmas", "--n", "2")
    assert code == 0, out


def test_unsupported_n(capsys):
    code, _, err = run(capsys, "verify", "theorem", "--n", "3")
    assert code == 2 and "CapabilityError" in err


def test_json_report_stable(tmp_path, capsys, monkeypatch):
    paths = []
    for threads in ("1", "4"):
        monkeypatch.setenv("HEISENTRACE_THREADS", threads)
        p = tmp_path / f"r{threads}.json"
        assert run(capsys, "verify", "theorem", "--n", "1", "--out", str(p))[0] == 0
        paths.append(p)
    a, b = (json.loads(p.read_text()) for p in paths)
    assert a["schema"] == 1 and "timestamp" in a
    assert json.dumps(cli.stable_view(a), sort_keys=True) == json.dumps(cli.stable_view(b), sort_keys=True)
    assert list(a["symbols"]) == sorted(a["symbols"])
    assert a["symbols"]["gaussian"]["tau"]["value"]["re"] == pytest.approx(0.5)


def test_residual_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "_lemma_checks",
                        lambda n, spec: [cli.Check("injected", "x", 1.0, 1e-3, "forced")])
    code, out, _ = run(capsys, "verify", "lemmas", "--n", "1")
    assert code == 1 and "FAILED injected" in out


def test_exit_code_is_function_of_report():
    ok = {"checks": [{"passed": True}], "errors": []}
    assert cli.exit_code(ok) == 0
    assert cli.exit_code({"checks": [{"passed": False}], "errors": []}) == 1
    assert cli.exit_code({"checks": [{"passed": False}], "errors": [{"x": 1}]}) == 2


def test_trace_gaussian(capsys):
    code, out, _ = run(capsys, "trace", "gaussian", "--s", "1", "--n", "1", "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert d["tau"]["value"]["re"] == pytest.approx(0.5, abs=1e-10)
    assert d["tau_z"][0]["value"]["re"] == pytest.approx(-1 / (8 * math.pi ** 2), abs=1e-10)


def test_trace_parabolic_and_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "trace", "parabolic", "--s", "1", "--s", "-1", "--csv-dir", str(tmp_path))
    assert code == 0 and "tau_+" in out and "tau_-" in out
    rows = list(csv.DictReader((tmp_path / "parabolic_s1.csv").open()))
    assert tuple(rows[0]) == cli.CSV_COLUMNS


def test_trace_unit(capsys):
    code, out, _ = run(capsys, "trace", "unit", "--s", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0
    assert abs(complex(d["tau"]["value"]["re"], d["tau"]["value"]["im"])) < 1e-10
    assert abs(complex(d["tau_z"][0]["value"]["re"], d["tau_z"][0]["value"]["im"])) < 1e-10


def test_trace_errors(tmp_path, capsys):
    code, _, err = run(capsys, "trace", "nosuchsymbol")
    assert code == 2 and "unknown symbol" in err
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"name": "bad", "n": 1, "sigma_plus": "exp(-norm2(x)", "sigma_minus": "0"}))
    code, _, err = run(capsys, "trace", str(f))
    assert code == 2 and "line 1" in err and "column" in err


def test_sharp_commands(capsys):
    code, out, _ = run(capsys, "sharp", "gaussian", "unit", "--v=0.3,-0.2", "--format", "json")
    assert code == 0
    assert json.loads(out)["value"]["re"] == pytest.approx(math.exp(-0.13), abs=1e-12)
    code, out, _ = run(capsys, "sharp", "gaussian", "gaussian", "--v", "0,0", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["discrepancy"] < 1e-10
    code, _, err = run(capsys, "sharp", "parabolic", "gaussian", "--v", "0,0")
    assert code == 2 and "CapabilityError" in err


def test_sweep(tmp_path, capsys):
    out_path = tmp_path / "g.csv"
    code, _, err = run(capsys, "sweep", "gaussian", "--s", "1", "--out", str(out_path))
    assert code == 0 and "extrapolant" in err
    rows = list(csv.DictReader(out_path.open()))
    assert tuple(rows[0]) == cli.CSV_COLUMNS
    last = rows[-1]
    assert float(last["extrapolant_re"]) == pytest.approx(-1 / (8 * math.pi ** 2), abs=1e-8)
    code, out, _ = run(capsys, "sweep", "unit", "--s", "1")
    assert all(abs(float(r["value_re"])) < 1e-10 for r in csv.DictReader(io.StringIO(out)))
    code, out, _ = run(capsys, "sweep", "parabolic", "--s", "1", "--format", "json")
    d = json.loads(out)
    assert abs(complex(d["extrapolant"]["re"], d["extrapolant"]["im"]) - 1j / (8 * math.pi)) < 1e-4


def test_spec_and_symbols(tmp_path, capsys):
    f = tmp_path / "spec.json"
    f.write_text(json.dumps({"radial_order": 30}))
    code, out, _ = run(capsys, "spec", "--spec", str(f))
    assert code == 0 and json.loads(out)["radial_order"] == 30
    f.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "spec", "--spec", str(f))[0] == 2
    code, out, _ = run(capsys, "symbols", "--n", "2")
    assert code == 0 and "parabolic" in out
