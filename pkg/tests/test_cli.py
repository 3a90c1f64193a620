import io
import json
import math

import numpy as np
import pytest

from tendonhand.cli import main
from tendonhand.geometry import default_config_path, geometry_to_dict, load_geometry


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_fk_zeros():
    code, text = run("fk", "--u", "0,0,0,0,0,0", "--format", "json")
    assert code == 0
    assert json.loads(text)["q_rad"] == [0.0] * 15


def test_fk_cmc_ideal():
    code, text = run("fk", "--u", "0,0,0,0,0,0.7", "--model", "ideal", "--format", "json")
    q = json.loads(text)["q_rad"]
    assert q[14] == 0.7 and q[:14] == [0.0] * 14


def test_fk_degrees():
    code, text = run("fk", "--u", "0,0,0,0,0,45", "--deg", "--format", "json")
    assert json.loads(text)["q_deg"][14] == pytest.approx(45.0, abs=1e-12)


def test_fk_over_retraction(capsys):
    code, _ = run("fk", "--u", "0,0,9,0,0,0")
    assert code == 3
    assert "u3" in capsys.readouterr().err


def test_fk_bad_vector(capsys):
    code, _ = run("fk", "--u", "0,0,0")
    assert code == 1
    assert "expected 6 values" in capsys.readouterr().err


def test_usage_errors_exit_1():
    with pytest.raises(SystemExit) as err:
        main(["bogus"])
    assert err.value.code == 1
    with pytest.raises(SystemExit) as err:
        main(["fk"])
    assert err.value.code == 1


def test_ik_zeros():
    code, text = run("ik", "--q", ",".join(["0"] * 15), "--format", "json")
    doc = json.loads(text)
    assert code == 0
    assert doc["u_rad"] == [0.0] * 6
    assert doc["residual_rad"] == [0.0] * 15


def test_ik_roundtrip_from_fk():
    u = [0.4, 0.9, 0.3, 0.0, 1.1, 0.8]
    _, text = run("fk", "--u", ",".join(map(repr, u)), "--format", "json")
    q = json.loads(text)["q_rad"]
    _, text = run("ik", "--q", ",".join(map(repr, q)), "--format", "json")
    doc = json.loads(text)
    np.testing.assert_allclose(doc["u_rad"], u, atol=1e-9, rtol=0)
    assert doc["clipped_joints"] == []


def test_ik_notes_clipping():
    q = ["0"] * 15
    q[3] = "2.0"
    code, text = run("ik", "--q", ",".join(q))
    assert code == 0
    assert "clipped to workspace: q4 (index_pip)" in text
    _, text = run("ik", "--q", ",".join(q), "--format", "json")
    assert json.loads(text)["clipped_joints"] == [4]


def test_ik_from_pose_name():
    code, text = run("ik", "--name", "cmc-abduct", "--format", "json")
    assert json.loads(text)["u_rad"] == [0, 0, 0, 0, 0, 1.0]


def test_sweep_report_pipeline(tmp_path):
    out = tmp_path / "s.csv"
    code, _ = run("sweep", "--servo", "2", "--k", "100", "--plant", "compensated", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == (
        "servo_index,u_rad,joint_index,q_meas_rad,q_ideal_rad,q_comp_rad,residual_ideal_deg,residual_comp_deg"
    )
    assert len(lines) == 1 + 100 * 15
    res = tmp_path / "res.csv"
    code, text = run("report", str(out), "--format", "json", "--residuals", str(res))
    doc = json.loads(text)["joints"]
    for label in ("index_dip", "index_pip"):
        assert doc[label]["mae_ideal_deg"] > doc[label]["mae_comp_deg"]
    assert doc["index_dip"]["mae_ideal_deg"] == pytest.approx(1.15, abs=0.01)
    assert res.read_text().startswith("servo_index,u_rad,joint_index,residual_ideal_deg")
    code, text = run("report", str(out))
    assert "index_dip" in text


def test_sweep_seed_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run("sweep", "--servo", "4", "--k", "30", "--noise", "0.1", "--deg", "--seed", "7", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_sweep_bad_servo():
    code, _ = run("sweep", "--servo", "9")
    assert code == 1


def test_validate_ok_and_bad(tmp_path):
    code, text = run("validate")
    assert code == 0 and "0 violations" in text
    doc = geometry_to_dict(load_geometry(default_config_path()))
    doc["digits"][3]["guide"]["d1_m"] = 0.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, text = run("validate", "--config", str(bad))
    assert code == 2
    assert "digits[3].guide.d1: d1 must be positive" in text


def test_config_env_override(tmp_path, monkeypatch):
    doc = geometry_to_dict(load_geometry(default_config_path()))
    doc["cmc_gain"] = 2.0
    p = tmp_path / "gain2.json"
    p.write_text(json.dumps(doc))
    monkeypatch.setenv("TENDONHAND_CONFIG", str(p))
    _, text = run("fk", "--u", "0,0,0,0,0,0.5", "--format", "json")
    assert json.loads(text)["q_rad"][14] == 1.0


def test_pose_commands():
    code, text = run("pose", "list")
    assert code == 0 and "fist" in text and "tweezers" in text
    code, text = run("pose", "show", "open", "--format", "json")
    assert json.loads(text)["q_d_rad"] == [0.0] * 15
    code, text = run("pose", "run", "fist", "--format", "json")
    doc = json.loads(text)
    assert code == 0 and all(math.isfinite(x) for x in doc["u_rad"])
    code, _ = run("pose", "run", "no-such-pose")
    assert code == 1


def test_fit_command(tmp_path):
    out = tmp_path / "fitted.json"
    code, text = run("fit", "--target-mae", "1.15", "--format", "json", "--write", str(out))
    doc = json.loads(text)
    assert code == 0
    assert doc["verify_index_dip_mae_ideal_deg"] == pytest.approx(1.15, rel=0.01)
    assert load_geometry(out).transmission[1].k_s == doc["k_s_n_per_m"]


def test_fit_unreachable_exit_code():
    code, _ = run("fit", "--target-mae", "80")
    assert code == 2
