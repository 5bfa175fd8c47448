import io
import itertools
import json
import math
import subprocess
import sys

import pytest

from gmecert import cli
from gmecert.polytopes import canonical_l2_behavior, svetlichny_box
from gmecert.behavior import Behavior, deterministic, white_noise
from gmecert.witnesses import mermin_max


def run(argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = cli.main(argv, out)
    return code, out.getvalue()


def strip_timestamp(text):
    obj = json.loads(text)
    box = obj.get("manifest") or obj["meta"]["manifest"]
    box.pop("timestamp")
    return json.dumps(obj, sort_keys=True)


@pytest.fixture
def appendix_a_file(tmp_path):
    code, text = run(["behavior", "gen", "--state", "noisy-w:0.928585", "--settings", "appendix-a"])
    assert code == 0
    path = tmp_path / "a.json"
    path.write_text(text)
    return path


def write(tmp_path, name, beh):
    path = tmp_path / name
    path.write_text(json.dumps(beh.to_json()))
    return str(path)


def test_behavior_gen_manifest(appendix_a_file):
    obj = json.loads(appendix_a_file.read_text())
    man = obj["meta"]["manifest"]
    assert man["command"] == "behavior"
    assert man["argv"][:2] == ["behavior", "gen"]
    assert set(man) >= {"arguments", "seed", "tolerances", "tool_version", "timestamp"}
    assert len(obj["p"]) == 64


def test_reports_reproduce_from_manifest(appendix_a_file):
    first = appendix_a_file.read_text()
    argv = json.loads(first)["meta"]["manifest"]["argv"]
    _, again = run(argv)
    assert strip_timestamp(first) == strip_timestamp(again)
    code, w1 = run(["witness", str(appendix_a_file)])
    _, w2 = run(json.loads(w1)["manifest"]["argv"])
    assert strip_timestamp(w1) == strip_timestamp(w2)


def test_witness_appendix_a(appendix_a_file):
    code, text = run(["witness", str(appendix_a_file)])
    report = json.loads(text)
    assert code == 0
    assert report["verdicts"]["DI_GME"] is True
    assert report["mermin_max"] == pytest.approx(2 * math.sqrt(2), abs=1e-3)


def test_witness_from_stdin(appendix_a_file, monkeypatch):
    code, text = run(["witness", "-"], appendix_a_file.read_text(), monkeypatch)
    assert code == 0 and json.loads(text)["certificate"]["verdict"] == "GME_certified"


def test_witness_white_noise(tmp_path):
    code, text = run(["witness", write(tmp_path, "w.json", white_noise())])
    assert code == 1 and json.loads(text)["certificate"]["verdict"] == "not_certified"


def test_witness_canonical_l2(tmp_path):
    code, text = run(["witness", write(tmp_path, "l2.json", canonical_l2_behavior(0.2, 0.3, 0.5))])
    report = json.loads(text)
    assert code == 0
    assert report["verdicts"]["DI_GME"] is False and report["verdicts"]["semi_DI_GME"] is True
    assert any("dimension" in a for a in report["certificate"]["assumptions"])


def test_witness_signaling_exit_2(tmp_path, capsys):
    path = tmp_path / "s.json"
    p = [0.0] * 64
    # Alice copies Bob's input; everything else uniform
    for i, (x, y, z, a, b, c) in enumerate(itertools.product((0, 1), repeat=6)):
        p[i] = 0.25 * (a == y)
    path.write_text(json.dumps({"inputs": 2, "outputs": 2, "parties": 3, "p": p}))
    code, _ = run(["witness", str(path)])
    assert code == 2
    assert "deviation 5.000e-01" in capsys.readouterr().err


def test_ghz_xy_settings():
    code, text = run(["behavior", "gen", "--state", "ghz", "--settings", "ghz-xy"])
    assert mermin_max(Behavior.from_json(text))[0] == pytest.approx(4)


def test_malformed_settings(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"A": [[1, 0, 0], [0, 1, 0]], "B": [[1, 0, 0]], "C": []}))
    code, _ = run(["behavior", "gen", "--state", "w", "--settings", str(path)])
    assert code == 2
    assert "'B'" in capsys.readouterr().err


@pytest.mark.parametrize("state", ["noisy-w:1.5", "gghz:0", "noisy-w:abc", "biseparable:AB"])
def test_invalid_state_parameters(state):
    assert run(["behavior", "gen", "--state", state, "--settings", "appendix-a"])[0] == 3


def test_unknown_state_kind():
    assert run(["behavior", "gen", "--state", "cat", "--settings", "appendix-a"])[0] == 2


def test_polytope_exit_codes(tmp_path, appendix_a_file):
    det = write(tmp_path, "d.json", deterministic((0, 1), (1, 1), (0, 0)))
    assert run(["polytope", det, "--set", "local"])[0] == 0
    assert run(["polytope", det, "--set", "local", "--exact"])[0] == 0
    assert run(["polytope", str(appendix_a_file), "--set", "local"])[0] == 1
    sv = write(tmp_path, "sv.json", svetlichny_box())
    code, text = run(["polytope", sv, "--set", "two-way"])
    assert code == 1 and json.loads(text)["member"] is False


def test_vertices_export():
    _, text = run(["vertices", "--set", "two-way"])
    assert len(json.loads(text)) == 160


def test_reproduce_appendix_b(tmp_path):
    path = tmp_path / "b.json"
    code, text = run(["reproduce", "appendix-b", "--json", str(path)])
    assert code == 0
    assert "<C0>" in text and "info" in text
    report = json.loads(path.read_text())
    assert report["all_passed"] is True


def test_reproduce_appendix_a_table():
    code, text = run(["reproduce", "appendix-a"])
    assert "Mermin value" in text and "<A0>" in text and "Q" in text
    # the quoted single-party values are not reproduced at this visibility
    assert code == 1


def test_csv_export():
    code, text = run(["behavior", "gen", "--state", "w", "--settings", "appendix-a", "--format", "csv"])
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,z,a,b,c,p" and len(lines) == 65
    assert lines[1].startswith("0,0,0,0,0,0,")


def test_optimize_is_seeded():
    argv = ["optimize", "--state", "ghz", "--objective", "mermin", "--restarts", "3", "--seed", "5"]
    _, a = run(argv)
    _, b = run(argv)
    assert strip_timestamp(a) == strip_timestamp(b)
    assert json.loads(a)["best_value"] == pytest.approx(4, abs=1e-6)


def test_optimize_bad_config():
    assert run(["optimize", "--state", "w", "--restarts", "0"])[0] == 3


def test_console_script_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "gmecert.cli", "reproduce", "appendix-b", "--format", "json"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["target"] == "appendix-b"
