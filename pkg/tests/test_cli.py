"""CLI contract tests: schemas, determinism, worker independence, exit codes."""

import csv
import io
import json
import subprocess
import sys

import pytest

CSV_COLUMNS = [
    "circuit_id", "n", "L", "repeat", "seed", "pairs", "bins", "expr", "ent",
    "fp_t1", "fp_t2", "fp_t3", "fp_t4",
    "welch_t1", "welch_t2", "welch_t3", "welch_t4",
    "n_params", "n_2q", "depth", "connectivity",
]


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "pqcbench.cli", *args],
        capture_output=True,
        text=True,
    )


def test_list_shows_full_catalog():
    proc = run_cli("list")
    assert proc.returncode == 0
    lines = proc.stdout.strip().splitlines()
    assert len(lines) == 27  # header + 26 templates
    by_id = {line.split()[0]: line for line in lines[1:]}
    assert "all-to-all" in by_id["c05"]
    assert "ring" in by_id["c10"]


def test_run_grid_row_count():
    proc = run_cli(
        "run", "--circuits", "all", "--n", "4", "--layers", "1..5",
        "--pairs", "30", "--seed", "5",
    )
    assert proc.returncode == 0
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert len(rows) == 95  # 19 circuits x 5 layer counts


def test_csv_schema_and_json_equivalence():
    args = ("run", "--circuits", "c06", "--n", "4", "--layers", "1",
            "--pairs", "200", "--seed", "7")
    proc = run_cli(*args)
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert list(rows[0].keys()) == CSV_COLUMNS
    proc_json = run_cli(*args, "--format", "json")
    records = json.loads(proc_json.stdout)
    assert len(records) == 1
    assert sorted(records[0].keys()) == sorted(CSV_COLUMNS)
    assert records[0]["expr"] == pytest.approx(float(rows[0]["expr"]))


def test_byte_identical_reruns():
    args = ("run", "--circuits", "c06", "--n", "4", "--layers", "1",
            "--pairs", "300", "--seed", "7", "--format", "json")
    first, second = run_cli(*args), run_cli(*args)
    assert first.stdout == second.stdout and first.returncode == 0


def test_worker_count_independence():
    base = ("run", "--circuits", "c03", "--n", "2", "--layers", "1",
            "--pairs", "1200", "--seed", "7")
    serial = run_cli(*base, "--workers", "1")
    parallel = run_cli(*base, "--workers", "4")
    assert serial.stdout == parallel.stdout


def test_repeat_rows_carry_repeat_index():
    proc = run_cli(
        "run", "--circuits", "c01", "--n", "4", "--layers", "1",
        "--pairs", "50", "--repeats", "3",
    )
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert [r["repeat"] for r in rows] == ["0", "1", "2"]
    assert len({r["expr"] for r in rows}) == 3  # independent seeded runs


def test_baseline_reports_std_only_with_repeats():
    proc = run_cli("baseline", "--n", "4", "--pairs", "500", "--repeats", "1")
    row = next(csv.DictReader(io.StringIO(proc.stdout)))
    assert row["bias_std"] == ""
    proc = run_cli("baseline", "--n", "4", "--pairs", "500", "--repeats", "3",
                   "--format", "json")
    record = json.loads(proc.stdout)[0]
    assert record["bias_std"] > 0


def test_tables_layouts():
    proc = run_cli("tables", "crz-crx", "--pairs", "60", "--repeats", "2")
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert [(r["crz_id"], r["crx_id"]) for r in rows] == [
        ("c03", "c04"), ("c05", "c06"), ("c07", "c08"),
        ("c13", "c14"), ("c16", "c17"), ("c18", "c19"),
    ]
    proc = run_cli("tables", "connectivity", "--pairs", "60", "--repeats", "2")
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert [r["configuration"] for r in rows] == [
        "nearest-neighbor", "circuit-block", "all-to-all",
    ]


def test_saturation_row_shape():
    proc = run_cli(
        "saturation", "--circuits", "c01", "--layers", "1..3",
        "--pairs", "100", "--repeats", "2",
    )
    rows = list(csv.DictReader(io.StringIO(proc.stdout)))
    assert [(r["circuit_id"], r["L"], r["n_2q"]) for r in rows] == [
        ("c01", "1", "0"), ("c01", "2", "0"), ("c01", "3", "0"),
    ]
    assert len({r["bias"] for r in rows}) == 1


def test_output_file_writing(tmp_path):
    out = tmp_path / "report.csv"
    proc = run_cli(
        "run", "--circuits", "c01", "--n", "2", "--layers", "1",
        "--pairs", "40", "--out", str(out),
    )
    assert proc.returncode == 0
    assert out.exists() and out.read_text().startswith("circuit_id,")


def test_exit_codes():
    assert run_cli("run", "--circuits", "bogus", "--pairs", "10").returncode == 2
    assert run_cli("run", "--layers", "5..1").returncode == 2
    assert run_cli("run", "--circuits", "c01", "--pairs", "0").returncode == 2
    assert run_cli("tables", "nonsense").returncode == 2  # argparse choices
    bad_path = run_cli(
        "run", "--circuits", "c01", "--n", "2", "--pairs", "20",
        "--out", "/nonexistent-dir/x.csv",
    )
    assert bad_path.returncode == 1


def test_template_dir_override(tmp_path, monkeypatch):
    (tmp_path / "solo.pqct").write_text(
        "id: solo\nconnectivity: none\nqubits: 1\nlayer:\n  H 0\n"
    )
    env_run = subprocess.run(
        [sys.executable, "-m", "pqcbench.cli", "list"],
        capture_output=True,
        text=True,
        env={"PQC_TEMPLATE_DIR": str(tmp_path), "PATH": "/usr/bin:/bin"},
    )
    lines = env_run.stdout.strip().splitlines()
    assert len(lines) == 2 and lines[1].startswith("solo")
