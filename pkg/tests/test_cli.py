import json
import os
import subprocess
import sys

import pytest


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "boxball", *args],
                          capture_output=True, text=True, env=env)


def test_basis_json_schema():
    res = run_cli("basis", "--kappa", "3")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert set(payload) == {"spec", "results", "diagnostics", "version"}
    assert payload["spec"]["kappa"] == 3
    assert payload["results"]["gram_deviation"] < 1e-12
    assert len(payload["results"]["vectors"]) == 4


def test_evolve_golden_three_color_route_both():
    res = run_cli("evolve", "--config", "kappa=3 offset=1 cells=0120313203011230",
                  "--word", "+1+2+3", "--steps", "2", "--route", "both")
    assert res.returncode == 0
    lines = res.stdout.strip().split("\n")
    assert len(lines) == 3
    assert "cells=0120313203011230" in lines[0]
    assert "cells=0001020310233001123" in lines[1]
    assert "cells=00001020310002330001123" in lines[2]


def test_evolve_substeps_show_every_operator():
    res = run_cli("evolve", "--config", "kappa=3 offset=1 cells=0120313203011230",
                  "--word", "+1+2+3", "--steps", "1", "--route", "both",
                  "--print-substeps")
    assert res.returncode == 0
    lines = res.stdout.strip().split("\n")
    assert len(lines) == 4
    assert "cells=00213032130002311" in lines[1]
    assert "cells=000132301320003112" in lines[2]
    assert "cells=0001020310233001123" in lines[3]


def test_evolve_inverse_pair_identity(tmp_path):
    cfg_file = tmp_path / "cfg.txt"
    cfg_file.write_text("kappa=2 offset=1 cells=120010\n")
    res = run_cli("evolve", "--config-file", str(cfg_file), "--word", "+1-1",
                  "--route", "pitman")
    assert res.returncode == 0
    lines = res.stdout.strip().split("\n")
    assert lines[0].split()[2] == lines[-1].split()[2]


def test_evolve_csv_export(tmp_path):
    out = tmp_path / "enc.csv"
    res = run_cli("evolve", "--config", "kappa=2 offset=1 cells=120", "--word", "+1",
                  "--route", "both", "--csv", str(out))
    assert res.returncode == 0
    header = out.read_text().splitlines()[0]
    assert header == "n,a_0,a_1,a_2,A_1,A_2"


def test_invert_subcommand():
    res = run_cli("invert", "--config", "kappa=2 offset=1 cells=021001", "--color", "1")
    assert res.returncode == 0
    assert "cells=120010" in res.stdout


def test_carrier_csv():
    res = run_cli("carrier", "--config", "kappa=2 offset=1 cells=120010", "--color", "1")
    assert res.returncode == 0
    rows = res.stdout.strip().splitlines()
    assert rows[0] == "n,W"
    assert [r.split(",")[1] for r in rows[1:]] == ["1", "1", "0", "0", "1", "0"]


def test_pitman_subcommand(tmp_path):
    src = tmp_path / "path.csv"
    src.write_text("n,value\n-2,2\n-1,1\n0,0\n1,-1\n2,0\n")
    res = run_cli("pitman", "--input", str(src), "--left-slope=-1", "--right-slope=1")
    assert res.returncode == 0
    got = {int(r.split(",")[0]): float(r.split(",")[1])
           for r in res.stdout.strip().splitlines()[1:]}
    assert got[1] == 1.0 and got[-2] == -2.0
    domains = json.loads(res.stderr)
    assert domains["domains"]["R_P1"] == "yes"


def test_classify_report(tmp_path):
    res = run_cli("examples", "--name", "a", "--epochs", "3")
    cfg_file = tmp_path / "a.cfg"
    cfg_file.write_text(res.stdout)
    out = run_cli("classify", "--config-file", str(cfg_file), "--color", "2")
    assert out.returncode == 0
    payload = json.loads(out.stdout)
    assert payload["results"]["reversible"] == "yes"
    assert payload["results"]["good_set"]["ratio_tol"] == 0.1


def test_sample_seed_env_fallback():
    a = run_cli("sample", "--kappa", "1", "--probs", "0.6,0.4", "--window=1,50",
                env_extra={"BBS_SEED": "42"})
    b = run_cli("sample", "--kappa", "1", "--probs", "0.6,0.4", "--window=1,50",
                "--seed", "42")
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_invariance_cli_pass_and_exit_codes(tmp_path):
    out = tmp_path / "report.json"
    counts = tmp_path / "counts.csv"
    res = run_cli("invariance-test", "--kappa", "1", "--probs", "0.6,0.4",
                  "--color", "1", "--sites", "100000", "--word", "2",
                  "--trials", "3", "--seed", "5", "--output", str(out),
                  "--counts-csv", str(counts))
    assert res.returncode == 0
    payload = json.loads(out.read_text())
    assert payload["results"]["passed"] is True
    assert payload["diagnostics"]["rng"] == "philox"
    assert counts.read_text().startswith("trial,pattern_0")


def test_invariance_cli_inadmissible_exits_one():
    res = run_cli("invariance-test", "--kappa", "1", "--probs", "0.4,0.6",
                  "--color", "1", "--sites", "1000", "--word", "2", "--trials", "1")
    assert res.returncode == 1
    assert "inadmissible" in res.stderr


def test_invariance_cli_negative_control_exits_two():
    res = run_cli("invariance-test", "--kappa", "1", "--probs", "0.6,0.4",
                  "--null-probs", "0.4,0.6", "--color", "1", "--sites", "100000",
                  "--word", "2", "--trials", "2", "--seed", "9")
    assert res.returncode == 2


def test_donsker_cli():
    res = run_cli("donsker", "--kappa", "1", "--c", "0.5,-0.5", "--n", "400",
                  "--samples", "1500", "--seed", "1", "--ks-threshold", "0.08")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["results"]["passed"] is True
    assert payload["results"]["drift"] == pytest.approx([1.0])


def test_bm_invariance_cli_small():
    res = run_cli("bm-invariance", "--kappa", "1", "--c", "0.5,-0.5", "--L", "8",
                  "--h", "0.05", "--Lprime", "4", "--seeds", "150",
                  "--threshold", "0.25", "--seed", "3")
    assert res.returncode == 0, res.stderr
    payload = json.loads(res.stdout)
    assert payload["results"]["passed"] is True


def test_unknown_config_is_usage_error():
    res = run_cli("evolve", "--config", "kappa=2 offset=1 cells=19")
    assert res.returncode == 1
