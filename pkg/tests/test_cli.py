import json
import math
import subprocess
import sys
import time
from fractions import Fraction

import pytest

from graphdyn import cli, load_map, zoo


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return "".join(line for line in text.splitlines(keepends=True) if not line.startswith("#"))


def test_davenport_trace(capsys):
    code, out, _ = run_cli(capsys, "run", "davenport", "alpha=0", "N=1000000")
    assert code == 0
    meta, rows = cli.read_output(out)
    assert meta["seed"] == "0" and len(meta["config_hash"]) == 16
    assert rows[-1]["N"] == "1000000" and float(rows[-1]["re"]) == pytest.approx(0.000212, abs=1e-15)


def test_zoo_verify_example(capsys):
    code, out, _ = run_cli(capsys, "run", "zoo-verify", "paper_example")
    assert code == 0
    _, rows = cli.read_output(out)
    assert all(r["ok"] == "true" for r in rows)


def test_entropy_full_tent(capsys):
    code, out, _ = run_cli(capsys, "run", "entropy", "full_tent", "lap", "n=20")
    assert code == 0
    meta, _ = cli.read_output(out)
    assert abs(float(meta["estimate"]) - math.log(2)) < 1e-9


def test_same_seed_same_body(capsys):
    argv = ("scrambled", "--map", "full_tent", "--n", "2", "--samples", "50", "--N", "2000", "--seed", "7")
    _, a, _ = run_cli(capsys, *argv)
    _, b, _ = run_cli(capsys, *argv)
    assert body(a) == body(b) and body(a).count("\n") > 1


def test_json_output(capsys):
    code, out, _ = run_cli(capsys, "solenoid", "--map", "doubling_solenoid:depth=4", "--depth", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["extra"]["certificate"]["divisibility_ok"] is True
    assert [r["period"] for r in doc["rows"]] == [2, 4, 8, 16]


def test_zoo_emit_round_trip(tmp_path, capsys):
    path = tmp_path / "m.json"
    assert run_cli(capsys, "zoo", "emit", "doubling_solenoid:depth=3", "--out", str(path))[0] == 0
    assert "config_hash" in json.loads(path.read_text())["meta"]
    m, ref = load_map(str(path)), zoo.make_doubling_solenoid(3)
    assert all(m.evaluate(Fraction(k, 81)) == ref.evaluate(Fraction(k, 81)) for k in range(82))
    code, out, _ = run_cli(capsys, "cycles", "--map", str(path), "--kmax", "8")
    assert code == 0
    assert {r["period"] for r in cli.read_output(out)[1]} == {"1", "2", "4", "8"}


def test_config_file_and_output_dir(tmp_path, monkeypatch, capsys):
    cfg = {"op": "mobius", "params": {"N": 10000}, "seed": 3, "format": "csv"}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path / "out"))
    assert run_cli(capsys, "run", str(p))[0] == 0
    files = list((tmp_path / "out").iterdir())
    assert len(files) == 1
    meta, rows = cli.read_output(files[0].read_text())
    assert meta["seed"] == "3" and rows[-1]["N"] == "10000"


def test_schema_violation_is_usage_error(capsys):
    assert cli.run({"op": "mobius", "bogus": 1}) == 1
    assert cli.run({"op": "nope"}) == 1
    assert "invalid config" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert run_cli(capsys, "entropy", "--map", "nope")[0] == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1
    assert run_cli(capsys, "zoo", "emit")[0] == 1


def test_check_failure_exit_code(capsys):
    # the full tent has no solenoid, so the certificate check fails
    assert run_cli(capsys, "solenoid", "--map", "full_tent", "--depth", "2")[0] == 2


def test_diamcheck_passes(capsys):
    code, out, _ = run_cli(capsys, "diamcheck", "--map", "doubling_solenoid:depth=5", "--period", "32")
    assert code == 0 and cli.read_output(out)[1][0]["pass"] == "true"


def test_every_subcommand_has_a_parser():
    ap = cli.build_parser()
    sub = next(a for a in ap._actions if a.dest == "command")
    assert set(sub.choices) >= set(cli._ARGS) | {"zoo", "suite", "run"}


def test_smoke_suite_is_fast(capsys):
    t0 = time.perf_counter()
    code, out, _ = run_cli(capsys, "suite", "smoke")
    assert code == 0 and time.perf_counter() - t0 < 60
    assert all(r["passed"] == "true" for r in cli.read_output(out)[1])


def test_acceptance_subset(capsys):
    code, out, _ = run_cli(capsys, "suite", "acceptance", "--only", "A1,A4,A12")
    assert code == 0
    assert [r["criterion"] for r in cli.read_output(out)[1]] == ["A1", "A4", "A12"]


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "graphdyn.cli", "mobius", "--N", "1000"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[-1] == "1000,0.002,0.0,0.002"
