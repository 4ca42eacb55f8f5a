import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from looptop.cli import run

DATA = Path(__file__).parent / "data"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def test_sphere_compare_example():
    code, out, _ = call("sphere", "coproduct", "--k", 2, "--field", "F2", "--mode", "compare")
    assert code == 0
    assert out.startswith("MATCH")
    assert "λ(AU^2) = A⊗AU + AU⊗A" in out


def test_compare_exit_code_tracks_mismatch():
    assert call("sphere", "coproduct", "--k", 6, "--field", "Q", "--mode", "compare")[0] == 0
    code, out, _ = call("sphere", "coproduct", "--k", 6, "--field", "Q", "--mode", "compare", "--convention", "right")
    assert code == 1 and out.startswith("MISMATCH")
    # over F2 signs vanish, so every convention matches
    assert call("sphere", "coproduct", "--k", 6, "--field", "F2", "--mode", "compare", "--convention", "right")[0] == 0


def test_field_env_default(monkeypatch):
    monkeypatch.setenv("LOOPTOP_FIELD", "Q")
    code, out, _ = call("sphere", "coproduct", "--k", 3, "--mode", "compare", "--convention", "right")
    assert code == 1 and "field Q" in out
    monkeypatch.delenv("LOOPTOP_FIELD")
    assert "field F2" in call("sphere", "coproduct", "--k", 1, "--mode", "compare")[1]


def test_sphere_json_is_stable():
    args = ("sphere", "coproduct", "--k", 5, "--field", "Q", "--format", "json")
    first, second = call(*args)[1], call(*args)[1]
    assert first == second
    rows = json.loads(first)
    assert rows[2]["input"] == "U" and {"left": "A", "right": "1", "coeff": 1} in rows[2]["terms"]


@pytest.mark.parametrize("identity", ["sullivan", "coassoc", "cocomm", "assoc"])
def test_sphere_checks_pass(identity):
    assert call("sphere", "check", identity, "--k", 6, "--field", "Q")[0] == 0


def test_sphere_check_violation_report():
    code, out, _ = call("sphere", "check", "sullivan", "--k", 3, "--field", "Q", "--side", "right", "--format", "json")
    rep = json.loads(out)
    assert code == 1 and rep["violations"]
    assert call("sphere", "check", "cocomm", "--k", 4, "--field", "Q", "--side", "right")[0] == 1
    assert call("sphere", "check", "cocomm", "--k", 4, "--field", "Q", "--side", "right", "--shift", 5)[0] == 0


def test_sphere_sweep():
    code, out, _ = call("sphere", "sweep", "--k", 4, "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["pinned"] == "none" and data["conventions"]["none"]["sullivan_violations"] == 0


def test_chain_homology():
    code, out, _ = call("chain", "homology", DATA / "rp2.json")
    assert code == 0 and "H_1 = Z/2" in out
    assert "H_2 = F2" in call("chain", "homology", DATA / "rp2.json", "--field", "F2")[1]
    data = json.loads(call("chain", "homology", DATA / "circle.json", "--format", "json")[1])
    assert data["homology"]["1"] == {"rank": 1, "torsion": []}


def test_chain_reduced():
    code, out, _ = call("chain", "reduced", DATA / "point.json", "--chi", 2, "--point", "q0")
    assert code == 0 and "H_0 = Z/2" in out and "EQUAL" in out
    code, out, _ = call("chain", "reduced", DATA / "point.json", "--chi", 0, "--point", "q0")
    assert code == 0 and "H_0 = Z\n" in out


def test_chain_verify_homotopy(tmp_path):
    assert call("chain", "verify-homotopy", DATA / "homotopy.json")[0] == 0
    data = json.loads((DATA / "homotopy.json").read_text())
    data["F"]["maps"][0]["matrix"] = [[2]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, out, _ = call("chain", "verify-homotopy", bad)
    assert code == 1 and "FAIL" in out and "degree 0" in out


def test_chain_validate_round_trip(tmp_path):
    code, out, _ = call("chain", "validate", DATA / "circle.json")
    assert code == 0
    again = tmp_path / "c.json"
    again.write_text(out)
    assert call("chain", "validate", again)[1] == out


def test_filtered_commands():
    code, out, _ = call("filtered", "invert", DATA / "invert.json")
    assert code == 0 and "two-sided inverse: yes" in out
    code, out, _ = call("filtered", "window", DATA / "circle.json", "--a", 0.25, "--b", 1.5)
    assert code == 0 and "H_0 = 0" in out and "H_1 = 0" in out
    code, _, err = call("filtered", "window", DATA / "circle.json", "--a", 0.25, "--b", 2)
    assert code == 2 and "collides" in err


def test_localsys_commands():
    code, out, _ = call("localsys", "compat", DATA / "sigma.json")
    assert code == 0 and "compatible with products" in out
    code, out, _ = call("localsys", "compat", DATA / "eta.json")
    assert code == 1 and "degree -3" in out
    data = json.loads(call("localsys", "build", DATA / "eta.json", "--format", "json")[1])
    assert data["spec"]["degree"] == -3 and data["compatible"] is False
    data = json.loads(call("localsys", "tensor", DATA / "tensor.json", "--format", "json")[1])
    assert data["spec"]["degree"] == -4


def test_annulus_commands(tmp_path):
    code, out, _ = call("annulus", "modulus", "--outer", "0,0,534.49", "--inner", "0,0,1")
    assert code == 0 and abs(float(out.split("=")[1]) - 1.0) < 1e-3
    data = json.loads(call("annulus", "normalize", "--outer", "0,0,3", "--inner", "0.5,0,1", "--format", "json")[1])
    assert set(data["map"]) == set("abcd") and data["R"] > 0
    svg = tmp_path / "f.svg"
    code, out, _ = call("annulus", "foliate", "--outer", "0,0,3", "--inner", "0.5,0,1", "--svg", svg)
    assert code == 0 and "PASS" in out and svg.read_text().startswith("<svg")
    code, out, _ = call("annulus", "foliate", "--outer", "0,0,3", "--inner", "0.5,0,1", "--format", "svg")
    assert out.startswith("<svg")
    code, _, err = call("annulus", "modulus", "--outer", "0,0,1", "--inner", "0.5,0,0.5")
    assert code == 2 and "tangent" in err


def test_profile_verify(tmp_path):
    code, out, _ = call("profile", "verify", "--mu", 2, "--eps", 0.1, "--delta", 0.05)
    assert code == 0 and out.startswith("PASS max_gap") and "≤ μδ = 0.1" in out
    csv = tmp_path / "p.csv"
    call("profile", "verify", "--mu", 2, "--eps", 0.1, "--delta", 0.05, "--samples", 101, "--csv", csv)
    assert csv.read_text().splitlines()[0] == "r,h,dh,A,gap"
    assert call("profile", "verify", "--mu", 2, "--eps", 0.1, "--delta", 0.5)[0] == 2


def test_input_errors():
    assert call("bogus")[0] == 2
    assert call("chain", "homology", "/nonexistent/file.json")[0] == 2
    assert call("sphere", "coproduct", "--k", 2, "--field", "R")[0] == 2
    assert call("annulus", "modulus", "--outer", "1,2", "--inner", "0,0,1")[0] == 2


def test_help_documents_csv_columns():
    out = subprocess.run([sys.executable, "-m", "looptop.cli", "profile", "verify", "--help"],
                         capture_output=True, text=True).stdout
    assert "r, h, dh" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "looptop.cli", "annulus", "modulus",
                          "--outer", "0,0,534.49", "--inner", "0,0,1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("R = 0.99")
