import json
import math
import subprocess
import sys
from fractions import Fraction as Fr

import pytest

from classica import demo
from classica.cli import PolySpecError, dumps, main, parse_grid, parse_params, parse_poly_spec
from classica.series import BivariatePolynomial


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_poly_spec_examples(tmp_path):
    assert parse_poly_spec("2,-3,1") == [2, -3, 1]
    assert parse_poly_spec("1/2, 0.25") == [Fr(1, 2), 0.25]
    with pytest.raises(PolySpecError) as err:
        parse_poly_spec("2,,3")
    assert err.value.position == 2
    with pytest.raises(PolySpecError):
        parse_poly_spec("")
    with pytest.raises(PolySpecError) as err:
        parse_poly_spec("[{\"i\": 1,")
    assert err.value.position > 0
    bp = parse_poly_spec('[{"i": 1, "j": 0, "c": "1/2"}, {"i": 0, "j": 2, "c": 3}]')
    assert isinstance(bp, BivariatePolynomial)
    assert bp(Fr(2), Fr(1)) == 4
    f = tmp_path / "p.json"
    f.write_text('{"terms": [{"i": 0, "j": 1, "c": 2}]}')
    assert parse_poly_spec(str(f))(0, 5) == 10


def test_parse_params_and_grid():
    assert parse_params("a=1,b=2.5") == {"a": 1.0, "b": 2.5}
    assert parse_params(None) == {}
    with pytest.raises(ValueError):
        parse_params("a1")
    assert parse_grid("0,1,3") == [0, Fr(1, 2), 1]
    assert parse_grid("0,1.0,3") == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        parse_grid("0,1,1")


def test_dumps_format():
    text = dumps({"b": 0.1, "a": Fr(1, 3), "z": complex(1, -2), "i": math.inf})
    data = json.loads(text)
    assert list(data) == ["b", "a", "z", "i"]
    assert data["a"] == "1/3" and data["b"] == 0.1 and data["z"] == [1, -2]
    assert "0.10000000000000001" in text


def test_newton_command(capsys):
    f = '[{"i":1,"j":0,"c":-3},{"i":0,"j":1,"c":1},{"i":0,"j":0,"c":1},{"i":2,"j":0,"c":1},{"i":1,"j":1,"c":1}]'
    code, out, _ = run(capsys, "--json", "newton", "--f", f, "--order", "6", "--eval", "0.1")
    assert code == 0
    data = json.loads(out)
    assert data["coeffs"][:4] == [0, 1, -1, "1/3"]
    assert data["eval"]["gap"] <= 1e-8


def test_const_ode_command(capsys):
    code, out, _ = run(capsys, "const-ode", "--coeffs", "2,-3,1", "--rhs", "1,1", "--json")
    data = json.loads(out)
    assert code == 0
    assert sorted(r["re"] for r in data["roots"]) == [1.0, 2.0]
    assert data["pi"][:2] == ["5/4", "1/2"]


def test_negative_values_and_errors(capsys):
    code, out, _ = run(capsys, "--json", "hypergeom", "--a", "-2", "--b", "5", "--c", "5", "--x", "-3/10")
    assert code == 0 and json.loads(out)["F"] == "169/100"
    code, _, err = run(capsys, "const-ode", "--coeffs", "2,,1")
    assert code == 2 and "position 2" in err
    code, _, err = run(capsys, "hypergeom", "--a", "1", "--b", "1", "--c", "0", "--x", "0.5")
    assert code == 2 and "error" in err


def test_verify_command(capsys):
    code, out, _ = run(capsys, "--json", "verify", "--ode", "parabola",
                       "--candidate", "splice(-1,2)", "--grid", "-5,5,41")
    data = json.loads(out)
    assert code == 0 and data["max_residual"] == 0


def test_ivp2_csv(tmp_path, capsys):
    out_csv = tmp_path / "cat.csv"
    code, out, _ = run(capsys, "--json", "ivp2", "--preset", "catenary", "--x-end", "1",
                       "--out", str(out_csv))
    assert code == 0
    assert abs(json.loads(out)["y_end"] - math.cosh(1)) <= 1e-8
    assert out_csv.read_text().startswith("x,y,yp")


def test_phase_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "phase", "classify", "--coeffs", "0,1,-1,0", "--json")
    assert code == 0 and json.loads(out)["kind"] == "Center"
    csv = tmp_path / "p.csv"
    code, out, _ = run(capsys, "--json", "phase", "portrait", "--system", "volterra(1,1,1,1)",
                       "--box", "0.5,2.5,0.5,2.5", "--seeds", "2", "--t-end", "2", "--out", str(csv))
    assert code == 0
    kinds = sorted(r["kind"] for r in json.loads(out)["critical_points"])
    assert kinds == ["Center", "Saddle"]


def test_identities_command(capsys):
    code, _, _ = run(capsys, "hypergeom-identities")
    assert code == 0
    code, out, _ = run(capsys, "--json", "hypergeom-identities", "--printed-arctan")
    assert code == 0 and "false" in out


def test_output_deterministic():
    argv = [sys.executable, "-m", "classica", "--json", "const-ode", "--coeffs", "1,2,5",
            "--rhs", "0,1", "--ic", "0,1,0"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first


def test_demo_passes_and_detects_corruption(capsys):
    code, out, _ = run(capsys, "demo")
    assert code == 0 and "FAIL" not in out
    bad = dict(demo.DEFAULT_FIXTURES, const_coeffs=(2, -3, 2))
    manifest = demo.run_demo(bad)
    assert not manifest.ok
    failed = [c.name for c in manifest.checks if not c.passed]
    assert failed and all("D^2-3D+2" in n or "const" in n.lower() or "root" in n for n in failed)
