import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from specgap.cli import main

GOLDEN = Path(__file__).parent / "golden"
SCHEMAS = Path(__file__).parents[1] / "src" / "specgap" / "schemas"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_derive_golden(N, capsys):
    code, out, _ = run(["derive", "--N", str(N)], capsys)
    assert code == 0
    assert out == (GOLDEN / f"derive_N{N}.txt").read_text()


def test_derive_rejects_zero(capsys):
    code, _, err = run(["derive", "--N", "0"], capsys)
    assert code == 2 and "N" in err


def test_derive_json(tmp_path, capsys):
    path = tmp_path / "d.json"
    assert main(["derive", "--N", "2", "--json", str(path)]) == 0
    rep = json.loads(path.read_text())
    jsonschema.validate(rep, schema("derive_report"))
    assert rep["VForm"] == "(1/2)*a0''' - 4*(V-E)*a0' - 2*V'*a0"


def test_parse_error_exit_2(capsys):
    code, _, err = run(["gaps", "--potential", "x^^2", "--a0", "l1*x", "--e-range", "-1:1"], capsys)
    assert code == 2
    assert "column 3" in err


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["gaps", "--N", "two"])
    assert info.value.code == 2


def test_missing_setting(capsys):
    code, _, err = run(["gaps", "--potential", "x^2"], capsys)
    assert code == 2 and "a0Family" in err


HARMONIC = ["--potential", "1/2*x^2", "--N", "2", "--a0", "l1*x+l2*x^3", "--e-range", "-2:3", "--e-step", "1/10"]


def test_gaps_harmonic_report(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, out, _ = run(["gaps", *HARMONIC, "--json", str(path), "--check"], capsys)
    assert code == 0
    rep = json.loads(path.read_text())
    jsonschema.validate(rep, schema("gaps_report"))
    jsonschema.validate(rep["config"], schema("run_config"))
    assert rep["disjoint"] is True and rep["witnessesVerified"] is True
    assert [round(e["value"], 6) for e in rep["oracleSpectrum"][:3]] == [0.5, 1.5, 2.5]
    assert rep["gaps"] and rep["gaps"][0]["eHigh"] < 0.5
    assert "disjoint=true" in out


def test_gaps_config_file_and_override(tmp_path, capsys):
    cfg = {"potential": "x^4", "N": 2, "a0Family": "l1*x+l2*x^3", "eRange": ["-1", "1"], "eStep": "1/10",
           "lambdaBox": [["-2", "2"], ["-2", "2"]], "oracle": {"k": 4}, "seed": 5}
    jsonschema.validate(cfg, schema("run_config"))
    cpath = tmp_path / "c.json"
    cpath.write_text(json.dumps(cfg))
    path = tmp_path / "g.json"
    assert main(["gaps", "--config", str(cpath), "--e-range", "-1:2", "--json", str(path)]) == 0
    rep = json.loads(path.read_text())
    assert rep["config"]["eRange"] == ["-1", "2"]
    assert rep["config"]["seed"] == 5
    assert len(rep["oracleSpectrum"]) == 4


def test_gaps_bad_config(tmp_path, capsys):
    cpath = tmp_path / "c.json"
    cpath.write_text(json.dumps({"potential": "x^2", "bogus": 1}))
    code, _, err = run(["gaps", "--config", str(cpath)], capsys)
    assert code == 2 and "bogus" in err


def test_gaps_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gaps", *HARMONIC, "--seed", "3", "--json", str(a), "--workers", "1"]) == 0
    assert main(["gaps", *HARMONIC, "--seed", "3", "--json", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_gaps_exit_reflects_disjointness(monkeypatch, tmp_path, capsys):
    import specgap.gapcert as gc

    monkeypatch.setattr(gc, "disjoint_from", lambda *a, **k: False)
    code, _, _ = run(["gaps", *HARMONIC, "--check", "--json", str(tmp_path / "g.json")], capsys)
    assert code == 1
    assert json.loads((tmp_path / "g.json").read_text())["disjoint"] is False


def test_spectrum(tmp_path, capsys):
    path = tmp_path / "s.json"
    assert main(["spectrum", "--potential", "1/2*x^2", "--count", "3", "--json", str(path)]) == 0
    rep = json.loads(path.read_text())
    jsonschema.validate(rep, schema("spectrum_report"))
    assert [round(e["value"], 6) for e in rep["eigenvalues"]] == [0.5, 1.5, 2.5]
    assert main(["spectrum", "--potential", "x^4", "--count", "2", "--method", "shoot"]) == 0


@pytest.mark.parametrize("what,extra", [("kernel", ["--max-N", "4"]), ("words", ["--max-N", "4"]),
                                        ("divergence", []), ("multidim", ["--d", "3"])])
def test_verify(what, extra, tmp_path, capsys):
    path = tmp_path / "v.json"
    code, out, _ = run(["verify", what, *extra, "--json", str(path)], capsys)
    assert code == 0
    assert f"{what}: pass" in out
    rep = json.loads(path.read_text())
    jsonschema.validate(rep, schema("verify_report"))
    if what == "multidim":
        assert rep["checks"][0]["dimension"] == 10


def test_multidim_report(tmp_path, capsys):
    path = tmp_path / "m.json"
    assert main(["multidim", "--d", "3", "--json", str(path)]) == 0
    rep = json.loads(path.read_text())
    jsonschema.validate(rep, schema("multidim_report"))
    assert rep["nullspaceDim"] == 10
    Es = sorted(c["E"] for c in rep["criticalPoints"])
    assert Es.count(0.0) == 8 and Es[-1] == 3.0
    assert all(c["passed"] for c in rep["d2IntegralChecks"])


def test_console_script():
    out = subprocess.run([sys.executable, "-m", "specgap.cli", "derive", "--N", "1"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout == (GOLDEN / "derive_N1.txt").read_text()
