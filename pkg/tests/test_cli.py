import re

import pytest

from ca93.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check_rules(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "check-rules")
    assert code == 0 and "281 rules, 0 conflicts" in out and "199, 201" in out
    toy = tmp_path / "toy.txt"
    toy.write_text("1 W WBWWWWBBB B\n2 W WBWWWWBBB W\n")
    code, out, _ = run_cli(capsys, "check-rules", "--rules", str(toy))
    assert code == 1 and "conflict: rule 1" in out
    assert run_cli(capsys, "check-rules", "--rules", str(tmp_path / "none.txt"))[0] == 2
    toy.write_text("1 W WB W\n")
    assert run_cli(capsys, "check-rules", "--rules", str(toy))[0] == 2


def test_verify_traces(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "verify-traces")
    assert code == 0 and "23/23 traces pass" in out
    code, out, _ = run_cli(capsys, "verify-traces", "--only", "execseld")
    assert code == 0 and "execseld: Pass (10 rows" in out
    assert run_cli(capsys, "verify-traces", "--only", "nosuch")[0] == 2
    from ca93.data import data_path

    text = re.sub(r"^17 .*\n", "", data_path("rules_93.txt").read_text(), flags=re.M)
    bad = tmp_path / "bad.txt"
    bad.write_text(text)
    code, out, _ = run_cli(capsys, "verify-traces", "--rules", str(bad))
    assert code == 1 and "Fail" in out
    code, out, _ = run_cli(capsys, "verify-traces", "--only", "execfk", "--csv")
    assert out.splitlines()[1].startswith("execfk,Pass")


def test_simulate_doubler(capsys, tmp_path):
    out_csv, svg_dir = tmp_path / "log.csv", tmp_path / "svg"
    code, _, err = run_cli(capsys, "simulate", "--structure", "doubler", "--inject", "entry:simple",
                           "--steps", "11", "--out", str(out_csv), "--svg", str(svg_dir), "--size", "200")
    assert code == 0 and "exit exit: double" in err
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "step,cell,rule_id,new_state"
    assert len(list(svg_dir.glob("step_*.svg"))) == 12


def test_simulate_doubler_matches_table(capsys):
    from ca93.traces import get_trace

    code, out, _ = run_cli(capsys, "simulate", "--structure", "doubler", "--inject", "entry:simple", "--steps", "11")
    tr = get_trace("execdbl")
    got = {}
    for line in out.splitlines()[1:]:
        t, c, rid, _ = line.split(",")
        got[(int(t), c)] = int(rid)
    for i, row in enumerate(tr.rows):
        assert [got[(i + 1, str(c))] for c in tr.header] == list(row)


def test_simulate_white_controller_cancels(capsys):
    code, out, err = run_cli(capsys, "simulate", "--structure", "controller", "--color", "white",
                             "--inject", "main:simple", "--steps", "10")
    assert code == 0 and "exit exit: none" in err and ",0(0),259,W" in out


def test_simulate_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--structure", "doubler", "--inject", "entry:simple", "--steps", "0"])
    assert exc.value.code == 2
    assert run_cli(capsys, "simulate", "--structure", "doubler", "--inject", "entry", "--steps", "3")[0] == 2
    assert run_cli(capsys, "simulate", "--structure", "doubler", "--inject", "x:simple", "--steps", "3")[0] == 2
    code, _, err = run_cli(capsys, "simulate", "--structure", "sensor", "--color", "white",
                           "--inject", "signal:signal", "--steps", "10")
    assert code == 1 and "no rule" in err


def test_render(capsys, tmp_path):
    out = tmp_path / "fs.svg"
    assert run_cli(capsys, "render", "--structure", "fixed_switch", "--out", str(out), "--size", "300")[0] == 0
    assert out.read_text().startswith("<?xml")
    cfg = tmp_path / "c.cfg"
    cfg.write_text("0(0) B 0\n")
    code, svg, _ = run_cli(capsys, "render", "--config", str(cfg), "--levels", "1")
    assert code == 0 and svg.count("<path") == 55
    assert run_cli(capsys, "render")[0] == 2
    assert run_cli(capsys, "render", "--config", str(tmp_path / "none.cfg"))[0] == 2
    assert run_cli(capsys, "render", "--structure", "controller", "--levels", "1")[0] == 2


def test_stats(capsys):
    code, out, _ = run_cli(capsys, "stats", "--levels", "3", "--check-recurrence")
    assert code == 0 and "1, 5, 24, 115" in out and "u(n+1)=5u(n)-u(n-1): OK" in out
    code, out, _ = run_cli(capsys, "stats", "--levels", "0")
    assert "sector: 1\n" in out
    with pytest.raises(SystemExit):
        main(["stats", "--levels", "11"])


def test_data_dir_override(capsys, monkeypatch, tmp_path):
    (tmp_path / "rules_93.txt").write_text("1 W WWWWWWWWW W\n")
    monkeypatch.setenv("HCA_DATA_DIR", str(tmp_path))
    code, out, _ = run_cli(capsys, "check-rules")
    assert code == 0 and out.startswith("1 rules")
