import json
import subprocess
import sys

import pytest

from cifslab.cli import (
    EXIT_ERROR,
    EXIT_OK,
    EXIT_UNDETERMINED,
    ConfigError,
    main,
    parse_config,
    reproduce,
)
from cifslab.digits import AffineFamily, PolynomialFamily
from cifslab.geometry import read_ppm


def _report(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


# ---------------------------------------------------------------- config


def test_parse_minimal_F():
    cfg = parse_config({"system": {"family": "F", "T": 2, "digits": {"kind": "affine", "a": 2, "b": 0}}}, "dim")
    assert cfg.spec.digits == AffineFamily(2, 0) and cfg.spec.T == 2 and cfg.K == 30


def test_parse_polynomial_T4():
    doc = {"command": "dim", "system": {"family": "G", "T": 4, "digits": {"kind": "polynomial", "c": 1, "gamma": 3, "L": 1}},
           "knobs": {"tol": 1e-6, "M": 5000}}
    cfg = parse_config(doc)
    assert cfg.spec.digits == PolynomialFamily(1, 3, 1) and cfg.tol == 1e-6 and cfg.M == 5000


@pytest.mark.parametrize(
    "doc,key",
    [
        ({"system": {"digits": "2n"}, "knobs": {"tol": -1e-3}}, "tol"),
        ({"system": {"digits": "2n"}, "knobs": {"tol": 0.5}}, "tol"),
        ({"system": {"digits": "2n"}, "knobs": {"M": 0}}, "M"),
        ({"system": {"digits": "2n"}, "knobs": {"speed": 3}}, "knobs.speed"),
        ({"system": {"digits": "2n", "colour": 1}}, "system.colour"),
        ({"extra": {}}, "extra"),
        ({"system": {"digits": {"kind": "affine", "a": 2, "q": 1}}}, "q"),
        ({"knobs": {}}, "system"),
    ],
)
def test_schema_errors_name_the_key(doc, key):
    with pytest.raises(ConfigError, match=key):
        parse_config(doc, "dim")


def test_render_K_default():
    assert parse_config({"system": {"digits": "2n"}}, "render").K == 200


def test_flags_override_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"system": {"family": "F", "T": 1, "digits": "2n"}, "knobs": {"t": [1.0]}}))
    code = main(["pressure", "--config", str(p), "--T", "2", "--out", str(tmp_path / "r.json")])
    rep = json.loads((tmp_path / "r.json").read_text())
    assert code == EXIT_OK and rep["spec"]["T"] == 2


# ---------------------------------------------------------------- commands and exit codes


def test_dim_telescoping(capsys):
    code, rep = _report(capsys, ["dim", "--d", "2n", "--T", "2", "--tol", "1e-8"])
    assert code == EXIT_OK
    assert set(rep) == {"spec", "command", "results", "trace", "budgets", "version"}
    lo, hi = rep["results"]["h"]
    assert lo <= 1 <= hi and hi - lo <= 2e-8
    assert rep["budgets"]["escalated"] is False
    assert any(r["tag"] == "pressure-zero-bisection" for r in rep["trace"])


def test_compare_example(capsys):
    code, rep = _report(capsys, ["compare", "--d", "example", "--T", "4", "--tol", "1e-6"])
    assert code == EXIT_OK
    assert rep["results"]["verdict"]["kind"] == "F_strictly_greater"


def test_classify_irregular(capsys):
    code, rep = _report(capsys, ["classify", "--d", "log:1.7", "--family", "G", "--T", "1"])
    assert code == EXIT_OK and rep["results"]["regularity"] == "Irregular"


def test_pressure_infinite_serialized(capsys):
    code, rep = _report(capsys, ["pressure", "--d", "2n", "--T", "2", "--t", "0.5", "--t", "1.0"])
    assert code == EXIT_OK
    assert rep["results"]["0.5"]["interval"] == ["inf", "inf"]
    lo, hi = rep["results"]["1.0"]["interval"]
    assert lo <= 0 <= hi


def test_pressure_needs_t(capsys):
    assert main(["pressure", "--d", "2n"]) == EXIT_ERROR
    assert "t:" in capsys.readouterr().err


def test_validate_exit_codes(capsys):
    assert main(["validate", "--d", "2n", "--T", "6"]) == EXIT_OK
    capsys.readouterr()
    assert main(["validate", "--d", "2n", "--T", "7"]) == EXIT_ERROR


def test_bad_input_exits_one(capsys):
    assert main(["dim", "--d", "2n", "--tol", "-1"]) == EXIT_ERROR
    assert main(["dim", "--d", "fib"]) == EXIT_ERROR
    assert main(["dim", "--d", "2n", "--config", "/nonexistent/c.json"]) == EXIT_ERROR
    err = capsys.readouterr().err
    assert err.count("cifslab: error:") == 3


def test_gap_command(capsys):
    code, rep = _report(capsys, ["gap", "--d", "poly:1,2,1", "--T", "1", "--tol", "1e-6"])
    assert code == EXIT_OK and rep["results"]["q"] == 27 and rep["results"]["dimension_gap"] is True


def test_undetermined_exit_two(monkeypatch, capsys):
    import cifslab.cli as cli
    from cifslab.pressure import UNDETERMINED, Regularity

    calls = []

    def fake(spec, M):
        calls.append(M)
        return Regularity(UNDETERMINED, 0.5)

    monkeypatch.setattr(cli, "classify", fake)
    code, rep = _report(capsys, ["classify", "--d", "2n", "--T", "2", "--M", "1000"])
    assert code == EXIT_UNDETERMINED
    assert calls == [1000, 10000] and rep["budgets"]["escalated"] is True
    assert any(r["tag"] == "budget-escalation" for r in rep["trace"])


def test_pretty_output(capsys):
    assert main(["classify", "--d", "2n", "--T", "2", "--pretty"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("cifslab ") and "regularity: HereditarilyRegular" in out


def test_report_to_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["classify", "--d", "2n", "--T", "2", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["command"] == "classify"


# ---------------------------------------------------------------- render


def test_render_files(tmp_path):
    img, rep, png = tmp_path / "f.ppm", tmp_path / "f.json", tmp_path / "f.png"
    argv = ["render", "--d", "affine:2,1e-9", "--T", "5", "--family", "F", "--width", "80", "--height", "80",
            "--K", "40", "--out", str(img), "--report", str(rep), "--png", str(png)]
    assert main(argv) == EXIT_OK
    assert read_ppm(img).shape == (80, 80, 3) and png.exists()
    info = json.loads(rep.read_text())["results"]
    assert info["discs"] > 0 and info["K"] == 40
    first = img.read_bytes()
    assert main(argv) == EXIT_OK
    assert img.read_bytes() == first


def test_render_needs_out(capsys):
    assert main(["render", "--d", "2n"]) == EXIT_ERROR


# ---------------------------------------------------------------- reproduce and determinism


def test_reproduce_single_case(capsys):
    assert main(["reproduce", "example-2n-T2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("PASS  example-2n-T2")


def test_reproduce_unknown_case(capsys):
    assert main(["reproduce", "nope"]) == EXIT_ERROR
    assert "known:" in capsys.readouterr().err


def test_reproduce_lambda0_inside_bracket():
    res = reproduce("lambda0")["lambda0"]
    assert res["ok"]


def test_reports_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["dim", "--d", "example", "--family", "G", "--T", "4", "--tol", "1e-6", "--out", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cifslab", "classify", "--d", "2n", "--T", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["results"]["regularity"] == "HereditarilyRegular"


def test_validate_finite_table(tmp_path, capsys):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"system": {"family": "F", "T": 1, "digits": {"kind": "prefix", "head": [3, 5, 7]}}}))
    code, rep = _report(capsys, ["validate", "--config", str(p)])
    assert code == EXIT_OK and rep["results"]["osc"]["tangencies"] == 2
    assert main(["dim", "--config", str(p)]) == EXIT_ERROR
