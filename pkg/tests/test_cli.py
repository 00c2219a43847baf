from __future__ import annotations

import json
import subprocess
import sys

import pytest

from conftest import GALLERY, gallery_problem
from toroidal_k.cli import COMMANDS, ProblemError, load_problem, main, run


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


@pytest.mark.parametrize("name", sorted(p.stem for p in GALLERY.glob("*.json")))
def test_gallery_problems_load(name):
    p = load_problem(str(GALLERY / f"{name}.json"))
    assert p.fan_plus.maximal


def test_fixed_point_report(capsys):
    code, out, _ = run_cli(capsys, "--input", str(GALLERY / "a2_wonderful.json"), "--command", "gkm-graph")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "ok"
    assert rep["payload"]["vertex_count"] == 36 and len(rep["payload"]["edges"]) == 144


def test_cellularity_exit_codes(capsys):
    code, out, _ = run_cli(capsys, "--input", str(GALLERY / "a1_wonderful.json"), "--command", "check-cellular")
    assert code == 0 and json.loads(out)["payload"]["transfer"]["agree"]
    code, out, _ = run_cli(capsys, "--input", str(GALLERY / "a2_wonderful.json"), "--command", "check-cellular")
    assert code == 1 and json.loads(out)["status"] == "fail"


def test_known_failure_exits_with_two(capsys):
    code, out, _ = run_cli(capsys, "--input", str(GALLERY / "a1xa1_two_cones.json"), "--command", "relwond-check")
    rep = json.loads(out)
    assert code == 2 and rep["status"] == "paper-consistency-failure"
    assert rep["payload"]["surjective"] is False and rep["witnesses"]


def test_membership_and_decompose_payloads(capsys, tmp_path):
    # the basis element attached to s1, in product coordinates
    payload = write(tmp_path, "p.json", {"class": {"0": "1*e[(0,-1)] - 1*e[(2,-3)]"}})
    args = ["--input", str(GALLERY / "a1_wonderful.json"), "--payload", payload]
    code, out, _ = run_cli(capsys, *args, "--command", "membership")
    assert code == 0
    code, out, _ = run_cli(capsys, *args, "--command", "decompose")
    rep = json.loads(out)
    coeffs = rep["payload"]["coefficients"]
    assert code == 0 and coeffs["s1"]["coefficients"] == ["1*e[(0,0)]"] and coeffs["e"]["coefficients"] == ["0"]
    bad = write(tmp_path, "q.json", {"class": {"0": "1*e[(1,0)]"}})
    code, out, _ = run_cli(capsys, "--input", str(GALLERY / "a1_wonderful.json"), "--payload", bad,
                           "--command", "membership")
    assert code == 1 and json.loads(out)["payload"]["reduced"]["member"] is False


def test_multstr_threads_give_the_same_report(capsys):
    args = ["--input", str(GALLERY / "a2_wonderful.json"), "--command", "multstr-check"]
    _, one, _ = run_cli(capsys, *args)
    _, four, _ = run_cli(capsys, *args, "--threads", "4")
    assert one == four and json.loads(one)["payload"] == {"pairs": 36, "passed": 36}


def test_text_format(capsys):
    code, out, _ = run_cli(capsys, "--input", str(GALLERY / "a1_wonderful.json"), "--command", "ordinary-rank",
                           "--format", "text")
    assert code == 0 and out.splitlines()[:4] == ["command: ordinary-rank", "status: ok", "rank: 4", "fixed_points: 4"]


def test_ray_outside_chamber_has_pointer(tmp_path, capsys):
    data = gallery_problem("a2_two_cones")
    data["fan_plus"]["cones"][1][1] = [1, -2]
    code, _, err = run_cli(capsys, "--input", write(tmp_path, "bad.json", data), "--command", "gkm-graph")
    assert code == 1
    assert "/fan_plus/cones/1/1" in err and "outside the dominant chamber" in err


def test_validation_errors():
    with pytest.raises(ProblemError) as e:
        load_problem({"fan_plus": {}})
    assert e.value.pointer == "/root_datum"
    with pytest.raises(ProblemError) as e:
        load_problem({"root_datum": {"type": "A2"}, "fan_plus": {"ambient_rank": 3, "cones": []}})
    assert e.value.pointer == "/fan_plus/ambient_rank"
    with pytest.raises(ProblemError):
        load_problem("{not json")


def test_every_command_runs_on_the_a1_problem():
    p = load_problem(str(GALLERY / "a1_wonderful.json"))
    one = {"0": "1*e[(0,0)]"}
    for command in COMMANDS:
        p.payload = {"class": {"0": "1*e[(0)]"}} if command == "symmetrize" else {"class": one, "f": one, "g": one}
        rep = run(p, command)
        assert rep.status in ("ok", "fail"), (command, rep.payload)


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "toroidal_k", "--input", str(GALLERY / "a1_wonderful.json"),
                          "--command", "steinberg"], capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["payload"]["basis"] == {"e": "1*e[(0)]", "s1": "1*e[(-1)]"}
