import json

import pytest

from identforge.cli import main
from identforge.groebner import read_export
from identforge.model import bundled_model_path
from identforge.pipeline import EXIT_BUDGET, EXIT_FAILURE, EXIT_OK, EXIT_USAGE

EXAMPLE1 = str(bundled_model_path("example1"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_prints_report(capsys):
    code, out, err = run(capsys, "run", EXAMPLE1, "--seed", "1")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["model"] == "example1"
    assert "transcendence degree 2" in err
    assert sorted(report["classes"].values()).count("substituted") == 2


def test_default_mode_has_no_substitution(capsys):
    code, out, _ = run(capsys, "run", EXAMPLE1, "--mode", "default")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["substitution"] is None
    assert rep["classes"]["p6"] == "non-identifiable"


def test_runs_are_deterministic(capsys, tmp_path):
    outs = []
    for d in ("a", "b"):
        code, out, _ = run(capsys, "run", EXAMPLE1, "--seed", "7", "--out", str(tmp_path / d))
        assert code == EXIT_OK
        outs.append(out)
    assert outs[0] == outs[1]
    for name in ("system.psys", "substitution.json", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_missing_file(capsys):
    code, _, err = run(capsys, "run", "no/such/model.ode")
    assert code == EXIT_FAILURE and "no such model file" in err


def test_parse_error_reported_with_position(capsys, tmp_path):
    bad = tmp_path / "bad.ode"
    bad.write_text("x1' = -a*x1 +\ny = x1\n")
    code, _, err = run(capsys, "run", str(bad))
    assert code == EXIT_FAILURE and "bad.ode" in err


@pytest.mark.parametrize("fmt", ["maple", "magma", "generic"])
def test_export(capsys, fmt):
    code, out, _ = run(capsys, "run", EXAMPLE1, "--export", fmt)
    assert code == EXIT_OK
    back = read_export(out, fmt)
    assert len(back.variables) == 30 and back.prime == 11863279


def test_report_entropy(capsys):
    code, out, _ = run(capsys, "run", EXAMPLE1, "--report-entropy", "--export", "generic")
    assert code == EXIT_OK
    assert "candidate,member,entropy" in out


def test_bench_flag(capsys):
    code, out, _ = run(capsys, "run", EXAMPLE1, "--bench")
    assert code == EXIT_OK
    assert "gb_seconds=" in out and "peak=" in out


def test_usage_errors(capsys):
    assert run(capsys, "run", EXAMPLE1, "--mode", "zerodim-weights")[0] == EXIT_USAGE
    assert run(capsys, "run", EXAMPLE1, "--prime", "100")[0] == EXIT_USAGE
    assert run(capsys, "run", EXAMPLE1, "--prob", "2")[0] == EXIT_USAGE
    assert run(capsys, "bench", "--modes", "fast")[0] == EXIT_USAGE
    assert run(capsys)[0] == EXIT_USAGE


def test_weights_mode(capsys, tmp_path):
    w = tmp_path / "w.txt"
    w.write_text("# heavier parameters\np1 2\np4 3\n")
    code, out, _ = run(capsys, "run", EXAMPLE1, "--mode", "zerodim-weights", "--weights", str(w))
    assert code == EXIT_OK
    assert json.loads(out)["classes"]


def test_budget_exit_code(capsys, monkeypatch):
    monkeypatch.setenv("IDENTFORGE_BUDGET_SECS", "0")
    code, _, err = run(capsys, "run", EXAMPLE1)
    assert code == EXIT_BUDGET and "budget" in err


def test_bench_table_and_csv(capsys, tmp_path):
    csv_path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "bench", EXAMPLE1, "--csv", str(csv_path), "--no-memory")
    assert code == EXIT_OK
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("model,polys,vars,trdeg,time_default_s,time_zerodim_s")
    cells = lines[1].split(",")
    assert cells[:4] == ["example1", "31", "32", "2"]
    assert "speedup_zerodim" in out


def test_bench_empty_model_list():
    from identforge.bench import bench_table

    text, csv_text, rows = bench_table([], ["default"])
    assert rows == [] and csv_text.count("\n") == 1
    assert text.splitlines()[0].startswith("model")


def test_bench_failed_cell_is_na(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", str(tmp_path / "missing.ode"), "--no-memory")
    assert code == EXIT_OK
    assert out.splitlines()[2].split()[1] == "N/A"
