import csv
import io
import json
import math
import re

import pytest

from regretlab import cli, games
from regretlab.report import CSV_COLUMNS, Row, emit_report, format_csv, format_table, write_plot_data


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- commands ---------------------------------------------------------------------------


def test_demo_quadratic(capsys):
    code, out, _ = run_cli(capsys, "demo", "quadratic", "--T", "8", "--format", "csv")
    assert code == 0
    rows = {r["quantity"]: r for r in csv_rows(out)}
    assert float(rows["sum-c"]["value"]) == pytest.approx(games.c_sequence(8).total, abs=1e-15)
    assert float(rows["abs-difference"]["value"]) <= 1e-9
    assert rows["abs-difference"]["holds"] == "true"


def test_value_experts(capsys):
    code, out, _ = run_cli(capsys, "value", "--builtin", "experts-simple", "--N", "2", "--T", "1", "--format", "csv")
    assert code == 0
    (row,) = csv_rows(out)
    assert float(row["value"]) == pytest.approx(0.5, abs=1e-9)
    assert list(row) == list(CSV_COLUMNS)


def test_bounds_quadratic_assert(capsys):
    code, out, err = run_cli(capsys, "bounds", "--builtin", "quadratic", "--T", "4", "--assert")
    assert code == 0, err
    assert "log-T-bound" in out and "rademacher-bound" in out


def test_bounds_without_embedding(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--builtin", "experts-simple", "--N", "2", "--T", "2", "--assert")
    assert code == 0
    assert "rademacher-bound" in out
    # a piecewise-linear Phi has no curvature, so no log T bound is attempted
    assert "log-T-bound" not in out


def test_hierarchy_has_four_rows(capsys):
    code, out, _ = run_cli(capsys, "hierarchy", "--builtin", "experts-simple", "--N", "2", "--T", "2", "--format", "csv", "--assert")
    assert code == 0
    rows = csv_rows(out)
    assert len(rows) == 4
    vals = [float(r["value"]) for r in rows]
    assert all(a <= b + 1e-6 for a, b in zip(vals, vals[1:]))


def test_regret_and_decompose(capsys):
    code, out, _ = run_cli(capsys, "regret", "--builtin", "quadratic", "--T", "2", "--format", "csv")
    assert code == 0
    rows = {r["quantity"]: float(r["value"]) for r in csv_rows(out)}
    assert rows["p-regret[shrinkage,exact]"] == pytest.approx(1.25, abs=1e-12)
    code, out, _ = run_cli(capsys, "decompose", "--builtin", "quadratic", "--T", "2", "--format", "csv", "--assert")
    assert code == 0
    rows = {r["quantity"]: float(r["value"]) for r in csv_rows(out)}
    assert rows["-delta0-delta1+delta2"] == pytest.approx(0.625, abs=1e-12)


def test_regret_falls_back_to_mc(capsys):
    code, out, _ = run_cli(
        capsys, "regret", "--builtin", "experts-simple", "--N", "3", "--T", "12", "--budget", "1000", "--samples", "5000", "--format", "csv"
    )
    assert code == 0
    (row,) = csv_rows(out)
    assert "mc" in row["quantity"] and float(row["stderr"]) > 0


def test_other_demos(capsys):
    for name in ("c-sequence", "experts", "ball", "disjoint-interval"):
        code, out, err = run_cli(capsys, "demo", name, "--T", "8", "--samples", "2000", "--format", "csv")
        assert code == 0, (name, err)
        assert csv_rows(out)


def test_table_numbers_appear_in_csv(capsys, tmp_path):
    out_csv = tmp_path / "r.csv"
    code, table, _ = run_cli(capsys, "demo", "c-sequence", "--format", "table", "--out", str(out_csv))
    assert code == 0
    rows = csv_rows(out_csv.read_text())
    csv_vals = [float(r[k]) for r in rows for k in ("T", "value", "stderr", "bound", "seed") if r[k]]
    shown = [float(tok) for line in table.splitlines()[1:] for tok in re.findall(r"(?<![\w.])-?\d+(?:\.\d+)?(?:e[-+]?\d+)?(?![\w.])", line)]
    assert shown
    for v in shown:
        assert any(math.isclose(v, c, rel_tol=1e-11, abs_tol=1e-300) for c in csv_vals), v
    for r in rows:
        assert float(r["value"]) == float(format(float(r["value"]), ".17g"))
        assert len(r["value"].replace("-", "").replace(".", "").lstrip("0")) >= 12


# -- determinism -------------------------------------------------------------------------


def test_csv_identical_across_worker_counts(monkeypatch, tmp_path, capsys):
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("REGRETLAB_THREADS", threads)
        path = tmp_path / f"out{threads}.csv"
        code, _, _ = run_cli(capsys, "demo", "experts", "--N", "4", "--T", "64", "--samples", "20000", "--seed", "9", "--format", "csv", "--out", str(path))
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    code, _, _ = run_cli(capsys, "demo", "experts", "--N", "4", "--T", "64", "--samples", "20000", "--seed", "9", "--format", "csv", "--out", str(tmp_path / "again.csv"))
    assert (tmp_path / "again.csv").read_bytes() == outputs[0]


# -- exit codes ------------------------------------------------------------------------------


def test_exit_codes(capsys, tmp_path):
    code, _, err = run_cli(capsys, "value")
    assert code == 2 and err.startswith("regretlab: error=invalid-config reason=")
    assert len(err.strip().splitlines()) == 1
    code, _, _ = run_cli(capsys, "value", "--builtin", "quadratic", "--T", "0")
    assert code == 2
    code, _, _ = run_cli(capsys, "frobnicate")
    assert code == 2
    code, _, err = run_cli(capsys, "value", "--builtin", "experts-simple", "--N", "6", "--T", "12", "--budget", "100")
    assert code == 3 and "error=resource-limit" in err
    code, _, err = run_cli(capsys, "value", "--builtin", "quadratic", "--T", "2", "--out", str(tmp_path / "missing" / "x.csv"))
    assert code == 5 and "error=io" in err
    code, _, _ = run_cli(capsys, "value", "--game", str(tmp_path / "nope.json"))
    assert code == 5


def test_assert_failure_exits_four(capsys, monkeypatch):
    monkeypatch.setattr(cli, "_hierarchy", lambda game, cfg: ([Row(game.name, cfg.T, "iid", 1.0)], False))
    code, _, err = run_cli(capsys, "hierarchy", "--builtin", "experts-simple", "--T", "1", "--assert")
    assert code == 4 and "error=bound-failed" in err
    code, _, _ = run_cli(capsys, "hierarchy", "--builtin", "experts-simple", "--T", "1")
    assert code == 0


def test_empty_results(capsys, monkeypatch, tmp_path, caplog):
    monkeypatch.setattr(cli, "_value", lambda game, cfg: ([], True))
    out = tmp_path / "empty.csv"
    code, stdout, _ = run_cli(capsys, "value", "--builtin", "quadratic", "--out", str(out), "--format", "csv")
    assert code == 0
    assert not out.exists() and stdout == ""
    assert "no results" in caplog.text


# -- game files --------------------------------------------------------------------------------


def test_game_file_json_and_yaml(capsys, tmp_path):
    doc = {"name": "two", "outcomes": ["a", "b"], "actions": ["x", "y"], "loss": [[1, 0], [0, 1]]}
    (tmp_path / "g.json").write_text(json.dumps(doc))
    (tmp_path / "g.yaml").write_text(
        "name: two\noutcomes: [a, b]\nactions: [x, y]\nloss:\n  - [1, 0]\n  - [0, 1]\n"
    )
    for fname in ("g.json", "g.yaml"):
        code, out, _ = run_cli(capsys, "value", "--game", str(tmp_path / fname), "--T", "1", "--format", "csv")
        assert code == 0
        (row,) = csv_rows(out)
        assert row["game"] == "two" and float(row["value"]) == pytest.approx(0.5, abs=1e-9)


def test_game_file_with_coordinates_and_builtin_reference(tmp_path):
    (tmp_path / "c.yaml").write_text(
        "outcomes: [-1, 1]\nactions: [-1, 0, 1]\nloss:\n  - [0, 1, 4]\n  - [4, 1, 0]\n"
    )
    g = cli.load_game_file(str(tmp_path / "c.yaml"))
    assert g.action_coords.shape == (3, 1) and g.name == "c"
    (tmp_path / "b.json").write_text(json.dumps({"builtin": "experts-simple", "params": {"N": 3}}))
    assert cli.load_game_file(str(tmp_path / "b.json")).n_outcomes == 3


@pytest.mark.parametrize(
    "text",
    ["[1, 2]", "outcomes: [a]\n", "outcomes: [a, b]\nactions: [x]\nloss: [[1, 2]]\n", "{{{"],
)
def test_bad_game_files(capsys, tmp_path, text):
    p = tmp_path / "bad.yaml"
    p.write_text(text)
    code, _, err = run_cli(capsys, "value", "--game", str(p))
    assert code == 2 and "error=invalid-config" in err


# -- report helpers -------------------------------------------------------------------------------


def test_report_formats():
    rows = [Row("g", 3, "q", 1 / 3, 0.0, 0.5, True, 1), Row("g", None, "r", float("inf"))]
    text = format_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert text.splitlines()[1] == "g,3,q,0.33333333333333331,0,0.5,true,1"
    assert text.splitlines()[2] == "g,,r,inf,,,,"
    assert "0.333333333333" in format_table(rows)
    buf = io.StringIO()
    assert emit_report(rows, "both", stream=buf)
    assert "quantity" in buf.getvalue() and "0.33333333333333331" in buf.getvalue()


def test_plot_data(tmp_path, capsys):
    write_plot_data(tmp_path / "s.dat", "my series", [(1, 2.5), (2, 3.0)])
    lines = (tmp_path / "s.dat").read_text().splitlines()
    assert lines == ["# my series", "1 2.5", "2 3"]
    code, _, _ = run_cli(capsys, "report", "--builtin", "quadratic", "--grid", "33", "--T", "3", "--plot-dir", str(tmp_path / "plots"))
    assert code == 0
    seq = (tmp_path / "plots" / "c-sequence.dat").read_text().splitlines()
    assert seq[0].startswith("# ") and len(seq) == 6
    for line in seq[1:]:
        x, y = map(float, line.split())
        assert abs(x - y) < 0.5
    mm = (tmp_path / "plots" / "quadratic-minimax.dat").read_text().splitlines()
    assert len(mm) == 4
