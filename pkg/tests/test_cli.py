import json
import subprocess
import sys

import pytest

from sofic.cli import build_parser, main
from sofic.harness import parse_rationals


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sqrt_count(capsys, tmp_path):
    f = tmp_path / "y.txt"
    f.write_text("1 0 3 2\n")
    code, out, _ = run(capsys, "sqrt-count", "--perm-file", str(f), "--bruteforce")
    assert code == 0
    assert json.loads(out) == {"type": "2^2", "degree": 4, "count": 2, "bruteforce": 2}
    code, out, _ = run(capsys, "sqrt-count", "--type", "1^4")
    assert json.loads(out)["count"] == 10


def test_near_commute(capsys):
    code, out, _ = run(capsys, "near-commute", "--n", "6", "--k", "2")
    data = json.loads(out)
    assert code == 0 and data["equal"] and data["ball_size"] == 6
    code, out, _ = run(capsys, "near-commute", "--n", "5", "--epsilon", "11/10", "--mode", "bcyc")
    assert json.loads(out)["size"] == 24
    code, out, _ = run(capsys, "near-commute", "--n", "5", "--k", "3", "--mode", "construct")
    assert parse_rationals(json.loads(out))["max_defect"] <= parse_rationals(json.loads(out))["defect_bound"]


def test_expander_csv_and_out(capsys, tmp_path):
    out_path = tmp_path / "e.csv"
    code, out, _ = run(capsys, "expander", "--n", "12", "--trials", "3", "--mode", "exact", "--format", "csv", "--out", str(out_path))
    assert code == 0 and out == ""
    lines = out_path.read_text().splitlines()
    assert lines[0].startswith("trial,seed,lambda2") and len(lines) == 4


def test_extract_files(capsys, tmp_path):
    from sofic.intertwiner import planted_instance
    import numpy as np

    inst = planted_instance(10, np.random.default_rng(1))
    for name, p in (("x", inst.x), ("z", inst.z), ("y", inst.y)):
        (tmp_path / f"{name}.txt").write_text(str(p) + "\n")
    code, out, _ = run(
        capsys, "extract", "--x-file", str(tmp_path / "x.txt"), "--z-file", str(tmp_path / "z.txt"), "--y-file", str(tmp_path / "y.txt")
    )
    data = json.loads(out)
    assert code == 0 and data["certificate_holds"] and data["epsilon"] == "0/1"
    code, out, _ = run(capsys, "extract", "--construct", "--n", "12", "--trials", "2", "--perturb", "1")
    assert code == 0 and len(json.loads(out)["records"]) == 2


def test_fullgroup(capsys, tmp_path):
    u = tmp_path / "u.itm"
    u.write_text("0 1/3 1/3\n1/3 1 1/3\n")
    code, out, _ = run(capsys, "fullgroup", "compose", str(u), str(u))
    assert code == 0 and out == "0 1 2/3\n"
    code, out, _ = run(capsys, "fullgroup", "approx", str(u), "--epsilon", "1/10")
    assert json.loads(out)["p"] == [1, 2, 0]
    code, out, _ = run(capsys, "fullgroup", "distance", str(u), str(u))
    assert json.loads(out) == {"distance": "0/1"}
    p = tmp_path / "p.txt"
    p.write_text("1 0\n")
    code, out, _ = run(capsys, "fullgroup", "embed", str(p))
    assert out == "0 1 1/2\n"
    code, _, err = run(capsys, "fullgroup", "compose", str(u))
    assert code == 2 and "two map files" in err


def test_rep(capsys, tmp_path):
    rep = {"generators": ["a", "b"], "degree": 3, "images": {"a": [1, 2, 0], "b": [0, 2, 1]}, "relators": []}
    f = tmp_path / "r.json"
    f.write_text(json.dumps(rep))
    code, out, _ = run(capsys, "rep", "defect", str(f), "--L", "2")
    assert code == 0 and "trace_defect" in json.loads(out)
    code, out, _ = run(capsys, "rep", "combine", str(f), str(f), "--lambda", "1/2")
    assert json.loads(out)["degree"] == 18
    combined = tmp_path / "c.json"
    combined.write_text(out)
    s = tmp_path / "s.txt"
    s.write_text(" ".join(map(str, range(9))))
    code, out, _ = run(capsys, "rep", "cut", str(combined), "--set-file", str(s))
    assert code == 0 and json.loads(out)["degree"] == 9
    code, out, _ = run(capsys, "rep", "distance", str(f), str(f), "--budget", "50")
    assert json.loads(out)["upper_bound_squared"] == "0/1"


def test_run_manifest_command(capsys, tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"subcommand": "fullgroup", "seed": 5, "trials": 3, "format": "csv"}))
    code, out1, _ = run(capsys, "run", str(m))
    code2, out2, _ = run(capsys, "run", str(m), "--jobs", "2")
    assert code == code2 == 0 and out1 == out2 and out1.startswith("trial,seed")


def test_exit_codes(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["expander", "--n", "10", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["sqrt-count", "--type", "2^x"])
    assert exc.value.code == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"subcommand": "expander", "params": {}}')
    assert run(capsys, "run", str(bad))[0] == 2
    assert run(capsys, "sqrt-count", "--perm-file", str(tmp_path / "missing.txt"))[0] == 1
    broken = tmp_path / "broken.txt"
    broken.write_text("0 0 1")
    code, _, err = run(capsys, "sqrt-count", "--perm-file", str(broken))
    assert code == 1 and "index" in err


def test_help_lists_schema():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    assert set(sub) == {"sqrt-count", "near-commute", "expander", "extract", "fullgroup", "rep", "run"}
    for name, flags in {
        "expander": ["--n", "--lambda", "--mode", "--threshold", "--seed", "--trials", "--jobs", "--out", "--format"],
        "extract": ["--x-file", "--construct", "--perturb"],
        "rep": ["--L", "--lambda", "--set-file", "--budget"],
        "near-commute": ["--k", "--epsilon", "--mode"],
    }.items():
        text = sub[name].format_help()
        assert all(flag in text for flag in flags)


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sofic", "sqrt-count", "--type", "3^1"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["count"] == 1
