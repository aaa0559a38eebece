import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from teleportkit import cli, tables, teleport

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("UPDATE_GOLDEN") == "1"

GOLDEN_COMMANDS = {
    **{f"table_{t}.{fmt}": ["tables", "--id", t, "--format", fmt]
       for t in tables.TABLE_IDS for fmt in ("csv", "json", "text")},
    "tracing.txt": ["tracing"],
    "tracing.json": ["tracing", "--format", "json"],
    "teleport_ghz_chi.json": ["teleport", "ghz_chi", "--random", "100", "--seed", "7"],
    "teleport_ghz_ghz_projection.txt": ["teleport", "ghz_ghz_projection", "--random", "100",
                                        "--seed", "7", "--format", "text"],
    "correlate_chi.1.csv": ["correlate", "--state", "chi.1", "--particles", "1,2,3",
                            "--nonzero-only"],
    "basis_chi.json": ["basis", "dump", "--family", "chi"],
}


def run_cli(args, capsys, env=None):
    capsys.readouterr()
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def no_out_env(monkeypatch):
    monkeypatch.delenv(cli.OUT_ENV, raising=False)


@pytest.mark.parametrize("name", sorted(GOLDEN_COMMANDS))
def test_matches_golden(name, capsys):
    code, out, _ = run_cli(GOLDEN_COMMANDS[name], capsys)
    assert code == 0
    path = GOLDEN / name
    if UPDATE:
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")


@pytest.mark.parametrize("args", [
    ["tables", "--id", "all", "--format", "json"],
    ["teleport", "eq25_two_qubit", "--random", "20", "--seed", "3"],
    ["circuit", "run", "--file", "FIG2", "--input", "0000", "--shots", "4000", "--seed", "9"],
])
def test_byte_identical_reruns(args, capsys, tmp_path):
    if "FIG2" in args:
        f = tmp_path / "fig2.json"
        f.write_text(json.dumps({"n_qubits": 4, "measure": [1, 2, 3],
                                 "gates": [{"gate": "CNOT", "targets": [1, 3]},
                                           {"gate": "H", "targets": [1]},
                                           {"gate": "H", "targets": [2]}]}))
        args = [str(f) if a == "FIG2" else a for a in args]
    first = run_cli(args, capsys)
    second = run_cli(args, capsys)
    assert first[0] == 0 and first == second


def test_fresh_process_is_byte_identical(tmp_path):
    cmd = [sys.executable, "-m", "teleportkit", "teleport", "ghz_chi", "--random", "100",
           "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b == (GOLDEN / "teleport_ghz_chi.json").read_bytes()


def test_table_ii_has_twelve_rows(capsys):
    _, out, _ = run_cli(["tables", "--id", "II", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert len(lines) == 13 and all(ln.endswith(",true") for ln in lines[1:])


def test_table_ix_rows(capsys):
    _, out, _ = run_cli(["tables", "--id", "IX", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0] == "outcomes,printed_correction,computed_correction,match"
    assert len(lines) == 17


def test_table_i_json_shape(capsys):
    _, out, _ = run_cli(["tables", "--id", "I", "--format", "json"], capsys)
    d = json.loads(out)
    assert len(d["rows"]) == 4 and d["columns"] == ["xx", "yy", "zz"]
    assert d["provenance"]["seed"] is None


def test_all_tables_to_directory(capsys, tmp_path):
    code, _, _ = run_cli(["tables", "--id", "all", "--format", "csv", "--out", str(tmp_path)],
                         capsys)
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(
        f"table_{t}.csv" for t in tables.TABLE_IDS)


def test_env_var_sets_output_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path))
    code, out, _ = run_cli(["tracing"], capsys)
    assert code == 0 and out == ""
    assert (tmp_path / "tracing.text").exists()


def test_table_mismatch_exits_one(capsys, monkeypatch):
    orig = tables.build_table

    def broken(tid):
        rep = orig(tid)
        rep.rows[0].match = False
        return rep

    monkeypatch.setattr(tables, "build_table", broken)
    code, _, err = run_cli(["tables", "--id", "VI"], capsys)
    assert code == 1 and err


def test_teleport_ghz_projection_reports_nulls(capsys):
    code, out, _ = run_cli(["teleport", "ghz_ghz_projection", "--random", "100"], capsys)
    d = json.loads(out)
    assert code == 0 and d["expect_failure"] and d["null_outcome_count"] == 4


def test_teleport_chi_random(capsys):
    code, out, _ = run_cli(["teleport", "ghz_chi", "--random", "100", "--seed", "1"], capsys)
    d = json.loads(out)
    assert code == 0 and d["success"] and d["min_fidelity"] >= 1 - 1e-10


def test_teleport_single_input(capsys):
    code, out, _ = run_cli(["teleport", "eq21_two_qubit", "--input", "01",
                            "--format", "text"], capsys)
    assert code == 0 and "Unitary transformation" in out


def test_teleport_protocol_file(capsys, tmp_path):
    f = tmp_path / "p.json"
    f.write_text(json.dumps(teleport.protocol_files()["eq25_two_qubit"]))
    code, out, _ = run_cli(["teleport", str(f), "--random", "10"], capsys)
    assert code == 0 and json.loads(out)["success"]


def test_uncorrectable_protocol_exits_one(capsys, tmp_path):
    # chi.1 as carrier with chi projections leaves some branches unrecoverable
    d = dict(teleport.protocol_files()["ghz_chi"])
    d["carrier_family"], d["carrier_member"] = "chi", 1
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(d))
    code, out, _ = run_cli(["teleport", str(f), "--random", "5"], capsys)
    assert code == 1 and not json.loads(out)["success"]


def test_malformed_wiring_names_field(capsys, tmp_path):
    d = dict(teleport.protocol_files()["ghz_chi"])
    d["wiring"] = {"alice_unknown": [1], "alice_carrier": [2, 2], "bob_carrier": [4]}
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(d))
    code, _, err = run_cli(["teleport", str(f)], capsys)
    assert code == 2 and "wiring" in err


@pytest.mark.parametrize("args", [
    ["tables", "--id", "XIII"],
    ["correlate", "--state", "nosuch.1"],
    ["correlate"],
    ["teleport", "ghz_chi", "--input", "00"],
    ["basis", "dump", "--family", "nope"],
    ["basis", "check", "/nonexistent.json"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(args, capsys):
    code, _, _ = run_cli(args, capsys)
    assert code == 2


def test_correlate_eq5_all_zero(capsys):
    code, out, _ = run_cli(["correlate", "--state", "eq5"], capsys)
    rows = out.splitlines()[1:]
    assert code == 0 and len(rows) == 27
    assert all(r.endswith(",false") for r in rows)


def test_correlate_amplitude_file(capsys, tmp_path):
    f = tmp_path / "amps.json"
    f.write_text(json.dumps({"amplitudes": [0.7071067811865476, 0, 0, 0.7071067811865476]}))
    code, out, _ = run_cli(["correlate", "--amplitudes", str(f), "--nonzero-only",
                            "--format", "json"], capsys)
    axes = {r["axes"] for r in json.loads(out)["rows"]}
    assert code == 0 and axes == {"xx", "yy", "zz"}


def test_basis_dump_and_check(capsys, tmp_path):
    f = tmp_path / "eq31.json"
    assert run_cli(["basis", "dump", "--family", "eq31", "--particles", "3,4,5,6",
                    "--out", str(f)], capsys)[0] == 0
    assert json.loads(f.read_text())["particles"] == [3, 4, 5, 6]
    code, out, _ = run_cli(["basis", "check", str(f)], capsys)
    assert code == 0 and "orthonormal=True" in out
    d = json.loads(f.read_text())
    d["members"][1] = d["members"][0]
    f.write_text(json.dumps(d))
    assert run_cli(["basis", "check", str(f)], capsys)[0] == 1


def test_circuit_run_csv(capsys, tmp_path):
    f = tmp_path / "ghz.json"
    f.write_text(json.dumps([{"gate": "H", "targets": [1]}, {"gate": "CNOT", "targets": [1, 2]},
                             {"gate": "CNOT", "targets": [2, 3]}]))
    code, out, _ = run_cli(["circuit", "run", "--file", str(f), "--shots", "1000",
                            "--seed", "4"], capsys)
    rows = [ln.split(",") for ln in out.splitlines()[1:]]
    assert code == 0 and len(rows) == 8
    live = {r[0] for r in rows if int(r[2])}
    assert live == {"000", "111"}
    assert sum(int(r[2]) for r in rows) == 1000


@pytest.mark.parametrize("script", sorted((Path(__file__).parent.parent / "demos").glob("*.py")),
                         ids=lambda p: p.name)
def test_demo_runs(script):
    r = subprocess.run([sys.executable, str(script)], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
