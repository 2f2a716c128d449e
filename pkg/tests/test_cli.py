from __future__ import annotations

import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from pushopt.cli import (EXIT_DATA, EXIT_OK, EXIT_USAGE, UsageError, main, parse_split, read_program,
                         resolve_split, run_bench)
from pushopt.evolve import EvolutionConfig, load_log
from pushopt.fixtures import fixture_text
from pushopt.interpreter.program import parse_program, print_program


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- profiles ------------------------------------------------------------------

@pytest.mark.parametrize("split", ["50x20", "25x40", "5x200", "1x1000", "50×20", "25*40"])
def test_published_splits_accepted(split):
    p, m = resolve_split(split, 1000)
    assert p * m == 1000


def test_mismatched_split_rejected():
    with pytest.raises(UsageError, match="91"):
        resolve_split("7x13", 1000)
    with pytest.raises(UsageError):
        parse_split("fifty by twenty")
    with pytest.raises(UsageError):
        resolve_split(None, 1010)
    assert resolve_split(None, 1000) == (50, 20) and resolve_split(None, None) == (50, 20)


# -- evolve --------------------------------------------------------------------

EVOLVE = ["evolve", "-l", "f1", "-d", "2", "--budget", "100", "--split", "5x20", "--seed", "7",
          "--gp-popsize", "10", "--generations", "3", "--repeats", "2", "--reeval-repeats", "3"]


def test_evolve_writes_readable_artifacts(capsys, tmp_path):
    code, out, _ = run(capsys, *EVOLVE, "-o", str(tmp_path))
    assert code == EXIT_OK and "best-of-run" in out and "gen   0" in out
    best = parse_program((tmp_path / "best.push").read_text())
    config = EvolutionConfig.from_dict(json.loads((tmp_path / "config.json").read_text()))
    assert (config.landscape, config.dim, config.popsize, config.moves, config.seed) == ("f1", 2, 5, 20, 7)
    log = load_log(tmp_path / "generations.jsonl")
    assert len(log) == 3 and {"generation", "best_fitness", "mean_fitness", "best_genome"} <= set(log[0])
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert parse_program(summary["best_genome"]) == best
    assert json.loads((tmp_path / "reevaluation.json").read_text())["config"]["repeats"] == 3


def test_evolve_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"landscape": "f9", "dim": 2, "split": "5x20", "gp_popsize": 8,
                               "generations": 2, "repeats": 2, "reeval_repeats": 2, "seed": 3}))
    code, _, _ = run(capsys, "evolve", "--config", str(cfg), "--generations", "1", "-q",
                     "-o", str(tmp_path / "out"))
    assert code == EXIT_OK
    saved = json.loads((tmp_path / "out" / "config.json").read_text())
    assert saved["landscape"] == "f9" and saved["generations"] == 1 and saved["gp_popsize"] == 8


def test_evolve_uses_output_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("PUSHOPT_OUTPUT_DIR", str(tmp_path))
    assert run(capsys, *EVOLVE, "-q")[0] == EXIT_OK
    assert list(tmp_path.glob("evolve-f1-2d-5x20-seed7/best.push"))


@pytest.mark.parametrize("argv, needle", [
    (["evolve", "-l", "f2"], "f1, f9, f12, f13, f14"),
    (["evolve", "--budget", "1000", "--split", "7x13"], "91"),
    (["evolve", "--crossover-rate", "0.9"], "rates"),
    (["evolve", "--config", "/no/such/file.json"], "cannot read"),
    (["eval", "fixture:f1", "-l", "f7"], "valid names"),
    (["eval", "prog.push"], "--landscape is required"),
])
def test_usage_errors_exit_1(capsys, argv, needle):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE and needle in err


def test_argparse_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        main(["eval", "fixture:f1", "--dim", "ten"])
    assert e.value.code == EXIT_USAGE


# -- program loading -----------------------------------------------------------

def test_data_errors_exit_2(capsys, tmp_path):
    empty = tmp_path / "empty.push"
    empty.write_text("  \n")
    bad = tmp_path / "bad.push"
    bad.write_text("(integer.+ (vector.dup")
    unknown = tmp_path / "unknown.push"
    unknown.write_text("(integer.+ no.such.op)")
    for path, needle in ((empty, "empty"), (bad, "cannot parse"), (unknown, "no.such.op"),
                         (tmp_path / "missing.push", "cannot read")):
        code, _, err = run(capsys, "show", str(path))
        assert code == EXIT_DATA and needle in err
    assert run(capsys, "show", "fixture:f99")[0] == EXIT_DATA


def test_parse_errors_report_the_position(tmp_path):
    p = tmp_path / "p.push"
    p.write_text("(integer.+ bogus.op float.sin)")
    with pytest.raises(Exception) as e:
        read_program(str(p))
    assert "bogus.op" in str(e.value) and "11" in str(e.value)


# -- show ----------------------------------------------------------------------

def test_show_f12_counts_tokens(capsys):
    code, out, _ = run(capsys, "show", "fixture:f12", "--json")
    data = json.loads(out)
    tokens = [t for t in fixture_text("f12").replace("(", " ").replace(")", " ").split()]
    assert code == EXIT_OK and data["atoms"] == len(tokens)
    assert sum(data["histogram"].values()) == data["atoms"]
    assert data["program"] == print_program(parse_program(fixture_text("f12")))


def test_show_text(capsys, tmp_path):
    p = tmp_path / "p.push"
    p.write_text("(1 2 integer.+ (true 0.5))")
    code, out, _ = run(capsys, "show", str(p))
    assert code == EXIT_OK
    assert "atoms: 5" in out and "block depth: 1" in out and "<integer literal>" in out


# -- eval ----------------------------------------------------------------------

def test_eval_is_deterministic(capsys, tmp_path):
    a = run(capsys, "eval", "fixture:f9", "-d", "2", "--json", "--seed", "4")[1]
    b = run(capsys, "eval", "fixture:f9", "-d", "2", "--json", "--seed", "4")[1]
    data = json.loads(a)
    assert a == b and len(data["pbests"]) == 25 and data["transforms"] is False
    assert data["profile"]["popsize"] * data["profile"]["moves"] == 1000


def test_eval_origin_program_scores_zero(capsys, tmp_path):
    p = tmp_path / "zero.push"
    p.write_text("(vector.dup vector.-)")
    code, out, _ = run(capsys, "eval", str(p), "-l", "f1", "-d", "3", "-o", str(tmp_path))
    assert code == EXIT_OK and "mean error over 25 runs: 0" in out
    assert json.loads((tmp_path / "eval-report.json").read_text())["mean"] == 0.0


def test_eval_cross_problem(capsys):
    code, out, _ = run(capsys, "eval", "fixture:f13", "-l", "f14", "-d", "2", "--repeats", "3")
    assert code == EXIT_OK and out.startswith("f14 D=2")


def test_eval_f13_reaches_the_optimum_region(capsys):
    code, out, _ = run(capsys, "eval", "fixture:f13", "-d", "2", "--json")
    pbests = np.array(json.loads(out)["pbests"])
    assert code == EXIT_OK and np.mean(pbests < 0.5) > 0.5


# -- trace ---------------------------------------------------------------------

def test_trace_csv_and_summary(capsys, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "trace", "fixture:f9", "-d", "2", "--split", "1x1000", "--output", str(path))
    assert code == EXIT_OK
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["repeat", "move", "member", "value", "improved", "in_bounds", "x0", "x1"]
    assert len(rows) - 1 == 1001
    summary = json.loads(path.with_suffix(".summary.json").read_text())
    values = [float(r[3]) for r in rows[1:] if r[5] == "1"]
    assert summary["best_value"] == min(values) and summary["rows"] == 1001
    assert summary["best_value"] == summary["mean_error"]


def test_trace_to_stdout(capsys):
    code, out, _ = run(capsys, "trace", "fixture:f1", "-d", "2", "--split", "2x5", "--output", "-")
    assert code == EXIT_OK and len(out.splitlines()) == 1 + 2 * 6


# -- bench ---------------------------------------------------------------------

def test_bench_reports_steps(capsys):
    code, out, _ = run(capsys, "bench", "--programs", "3", "--repeats", "1", "--json")
    data = json.loads(out)
    assert code == EXIT_OK and data["steps"] > 0 and data["steps_per_second"] > 0
    assert run_bench(repeats=1, programs=2)["programs"] == 7


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "pushopt.cli", "show", "fixture:f1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("(")
