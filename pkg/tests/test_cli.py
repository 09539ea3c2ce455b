import json
import re
import time

import numpy as np

from fraccaputo.cli import main


def run_cli(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


def parse_csv(text):
    lines = text.strip().split("\n")
    assert lines[0].startswith("# config: ")
    config = json.loads(lines[0][len("# config: "):])
    header = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:]]
    return config, header, rows


def test_tail_table_values_and_speed(tmp_path):
    t0 = time.perf_counter()
    code, text = run_cli(tmp_path, "tail-table")
    assert code == 0
    assert time.perf_counter() - t0 < 1.0
    config, header, rows = parse_csv(text)
    assert header == ["t", "p=2^5", "p=2^10", "p=2^15", "p=2^20"]
    assert len(rows) == 6
    table = {r[0]: r[1:] for r in rows}
    assert abs(float(table["2^-7"][1]) - 9.129e-02) < 5e-4 * 9.129e-02
    assert abs(float(table["2^-8"][1]) - 1.006e+01) < 5e-4 * 1.006e+01
    assert table["2^-5"][3] == "0"          # below 1e-15 prints as bare zero
    assert table["2^-5"][2] == "0"


def test_soe_error_curve_ordering(tmp_path):
    code, text = run_cli(tmp_path, "soe-error", "--alpha", "0.1", "--samples", "120")
    assert code == 0
    config, header, rows = parse_csv(text)
    assert header == ["t", "fir_err_alpha", "fidr_err"]
    assert config["n_modes"] == 25
    t = np.array([float(r[0]) for r in rows])
    fir = np.array([float(r[1]) for r in rows])
    fidr = np.array([float(r[2]) for r in rows])
    assert np.all(fir >= 0.0) and np.all(fidr >= 0.0)
    near = np.argmin(np.abs(t - 0.01))
    assert fidr[near] < fir[near]
    # late-time errors of the two kernels stay within one order of magnitude
    assert abs(np.log10(fir[-1] / fidr[-1])) <= 1.0


def test_convergence_sweep_row_count(tmp_path):
    code, text = run_cli(tmp_path, "convergence", "--alpha", "0.5", "--h", "0.05",
                         "--dt", "0.1", "--levels", "3")
    assert code == 0
    config, header, rows = parse_csv(text)
    assert header == ["scheme", "n_modes", "dt", "related_error", "status"]
    # |ladder| x |schemes| x |mode set| = 3 x 3 x 2
    assert len(rows) == 18
    assert all(r[-1] == "ok" for r in rows)
    fidr25 = sorted((float(r[2]), float(r[3])) for r in rows
                    if r[0] == "fidr" and r[1] == "25")
    errs = [e for _, e in fidr25]
    assert errs[0] <= errs[1] <= errs[2]   # error grows with dt


def test_convergence_gl_baseline_decreases(tmp_path):
    code, text = run_cli(tmp_path, "convergence", "--alpha", "0.5", "--h", "0.05",
                         "--dt", "0.1", "--levels", "3")
    _, _, rows = parse_csv(text)
    gl = sorted((float(r[2]), float(r[3])) for r in rows if r[0] == "gl" and r[1] == "9")
    errs = [e for _, e in gl]
    assert errs[0] <= errs[1] <= errs[2]


def test_solve_zero_error_on_exact_free_problem(tmp_path):
    code, text = run_cli(tmp_path, "solve", "--problem", "nonlinear", "--alpha", "0.5",
                         "--dt", "0.1", "--h", "0.1", "--scheme", "fidr")
    assert code == 0
    payload = json.loads(text)
    assert payload["global_error"] is None
    assert payload["n_modes_interior"] == 25


def test_solve_manufactured_report(tmp_path):
    code, text = run_cli(tmp_path, "solve", "--alpha", "0.1", "--dt", "0.1",
                         "--h", "0.02", "--scheme", "fidr", "--modes", "25")
    assert code == 0
    payload = json.loads(text)
    assert payload["related_error"] < 1e-3
    assert payload["wall_time"] >= 0.0


def test_solve_determinism_excluding_wall_time(tmp_path):
    args = ("solve", "--alpha", "0.3", "--dt", "0.1", "--h", "0.05", "--scheme", "fir")
    _, a = run_cli(tmp_path, *args, name="a")
    _, b = run_cli(tmp_path, *args, name="b")
    strip = lambda s: re.sub(r'"wall_time": [^,\n]+', '"wall_time": X', s)
    assert strip(a) == strip(b)


def test_csv_determinism(tmp_path):
    _, a = run_cli(tmp_path, "soe-error", "--samples", "50", name="a")
    _, b = run_cli(tmp_path, "soe-error", "--samples", "50", name="b")
    assert a == b


def test_validation_exit_code(tmp_path):
    code, _ = run_cli(tmp_path, "solve", "--alpha", "1.5")
    assert code == 2
    code, _ = run_cli(tmp_path, "solve", "--modes", "17")
    assert code == 2


def test_property_suite_exit_and_ledger(tmp_path):
    code, text = run_cli(tmp_path, "property-suite", "--seed", "42", "--quick")
    assert code == 0
    ledger = json.loads(text)
    assert ledger["all_pass"] is True
    names = {s["name"] for s in ledger["suites"]}
    assert {"fir_coercivity", "fidr_coercivity", "mesh_sobolev",
            "truncation_l1", "truncation_fidr", "gl_stability"} <= names


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.5, "samples": 40}))
    code, text = run_cli(tmp_path, "soe-error", "--config", str(cfg))
    assert code == 0
    config, _, rows = parse_csv(text)
    assert config["alpha"] == 0.5 and len(rows) == 40
    code, text = run_cli(tmp_path, "soe-error", "--config", str(cfg),
                         "--alpha", "0.2", name="b")
    config, _, _ = parse_csv(text)
    assert config["alpha"] == 0.2


def test_jobs_parallel_sweep_matches_serial(tmp_path):
    args = ("convergence", "--alpha", "0.5", "--h", "0.1", "--dt", "0.1", "--levels", "2")
    _, serial = run_cli(tmp_path, *args, "--jobs", "1", name="a")
    _, parallel = run_cli(tmp_path, *args, "--jobs", "2", name="b")
    assert serial == parallel
