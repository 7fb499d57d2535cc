import csv
import json

import numpy as np
import pytest

from gaborlab import io
from gaborlab.cli import load_config, main
from gaborlab.grid import Grid, PhaseField
from gaborlab.rng import make_rng, random_field
from gaborlab.sequences import LatticeSeq


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    report = json.loads(out) if out.strip() else None
    return code, report, err


def test_moyal_seeded(capsys):
    code, rep, _ = run(capsys, "moyal", "--seed", "7")
    assert code == 0 and rep["status"] == "ok"
    assert rep["abs_error"] <= 1e-8 * (1 + np.hypot(*rep["rhs"]))


def test_same_seed_same_bytes(capsys):
    main(["moyal", "--seed", "3"])
    a = capsys.readouterr().out
    main(["moyal", "--seed", "3"])
    b = capsys.readouterr().out
    main(["moyal", "--seed", "4"])
    c = capsys.readouterr().out
    assert a == b and a != c


def test_tolerance_failure_exit_1(capsys):
    code, rep, _ = run(capsys, "fourier", "--seed", "1", "--tol", "-1")
    assert code == 1 and rep["status"] == "fail" and rep["tolerance"] == -1


def test_verify_conv_auto_target(capsys):
    code, rep, _ = run(capsys, "verify-conv", "--p1", "2", "--q1", "2", "--p2", "2", "--q2", "2",
                       "--auto-target", "--samples", "3", "--L", "8", "--N", "256")
    assert code == 0
    assert rep["p0"] == "inf" and rep["q0"] == "1"
    assert np.isfinite(rep["max_ratio"]) and rep["identity_rel"] <= 1e-6


def test_verify_conv_infeasible_exit_2(capsys):
    code, rep, err = run(capsys, "verify-conv", "--p1", "inf", "--q1", "1", "--p2", "inf", "--q2", "1",
                         "--auto-target", "--samples", "1")
    assert code == 2 and rep is None
    assert "no admissible exponent" in json.loads(err)["error"]


def test_verify_mult_named_condition(capsys, tmp_path):
    code, _, err = run(capsys, "verify-mult", "--p0", "1", "--q0", "1", "--samples", "1")
    assert code == 2
    doc = json.loads(err)
    assert doc["error"] == "conditions not satisfied"
    assert doc["conditions"] == ["1/q0 <= 1/q1 + 1/q2 - max(1, 1/p0, 1/q1, 1/q2)"]


def test_verify_mult_csv(capsys, tmp_path):
    out = tmp_path / "ratios.csv"
    code, rep, _ = run(capsys, "verify-mult", "--samples", "2", "--L", "8", "--N", "256",
                       "--w0", "split(poly:0;bracket:1)", "--w1", "split(poly:0;bracket:1)",
                       "--w2", "split(poly:0;bracket:1)", "--csv", str(out))
    assert code == 0 and rep["p0"] == "1" and rep["q0"] == "inf"
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["sample", "ratio"] and len(rows) == 3
    assert float(rows[1][1]) > 0


def _write_seq(path, a):
    io.write_sequence(path, a)
    return str(path)


def test_seq_verify(capsys, tmp_path):
    rng = make_rng(0)
    a1 = LatticeSeq(rng.normal(size=(3, 3)), (0, 0), (1, 1))
    a2 = LatticeSeq(rng.normal(size=(2, 3)), (-1, 0), (1, 1))
    p1, p2 = _write_seq(tmp_path / "a1.json", a1), _write_seq(tmp_path / "a2.json", a2)
    code, rep, _ = run(capsys, "seq-verify", "--kind", "young", "--a1", p1, "--a2", p2, "--exps", "1/2,1/2,1/2")
    assert code == 0 and rep["ratio"] <= 1 + 1e-12
    code, _, err = run(capsys, "seq-verify", "--kind", "holder", "--a1", p1, "--a2", p2, "--exps", "0.5,2,2")
    assert code == 2 and json.loads(err)["conditions"] == ["1/q0 <= 1/q1 + 1/q2"]
    code, rep, _ = run(capsys, "seq-verify", "--kind", "holder", "--a1", p1, "--a2", p2, "--exps", "1,2,2",
                       "--weights", "bracket:1;bracket:1;1")
    assert code == 0


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small box\nL = 6\nN = 64\nseed = 5\ntol = 1e-9  # inversion\n")
    assert load_config(cfg) == {"L": "6", "N": "64", "seed": "5", "tol": "1e-9"}
    out = tmp_path / "fh.json"
    code, rep, _ = run(capsys, "fourier", "--config", str(cfg), "--out", str(out))
    assert code == 0 and rep["tolerance"] == 1e-9
    fh = io.read_field(out)
    assert fh.grid == Grid(1, 6.0, 64).dual
    # flags override the file
    code, _, _ = run(capsys, "fourier", "--config", str(cfg), "--N", "32", "--out", str(out))
    assert io.read_field(out).grid.N == 32


def test_field_files_through_commands(capsys, tmp_path):
    g = Grid(1, 6.0, 64)
    f = random_field(g, make_rng(2))
    src = tmp_path / "f.json"
    io.write_field(src, f)
    V = tmp_path / "V.json"
    code, rep, _ = run(capsys, "stft", "--in", str(src), "--out", str(V))
    assert code == 0 and isinstance(io.read_field(V), PhaseField)
    P = tmp_path / "P.json"
    code, rep, _ = run(capsys, "project", "--in", str(V), "--out", str(P))
    assert code == 0 and rep["idempotence_rel"] <= 1e-8
    assert np.allclose(io.read_field(P).values, io.read_field(V).values, atol=1e-10)
    code, rep, _ = run(capsys, "wiener-norm", "--in", str(src), "--r", "inf", "--p", "1", "--q", "1")
    assert code == 0 and rep["norm"] > 0
    code, _, err = run(capsys, "project", "--in", str(src))
    assert code == 2 and "expected a phase-space field" in json.loads(err)["error"]


def test_twisted_and_product_commands(capsys, tmp_path):
    code, rep, _ = run(capsys, "twisted-conv", "--seed", "1")
    assert code == 0 and rep["reproducing_rel"] <= 1e-6
    g = Grid(1, 8.0, 96)
    rng = make_rng(3)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_field(a, random_field(g, rng))
    io.write_field(b, random_field(g, rng))
    out = tmp_path / "prod.json"
    code, rep, _ = run(capsys, "gabor-product", "--f1", str(a), "--f2", str(b), "--out", str(out))
    assert code == 0 and io.read_field(out).grid == g
    code, rep, _ = run(capsys, "product-identity", "--cases", "3", "--seed", "2")
    assert code == 0 and rep["max_rel"] <= 1e-5


def test_mod_norm_command(capsys):
    code, rep, _ = run(capsys, "mod-norm", "--seed", "1", "--p", "1", "--q", "inf", "--weight", "bracket:1")
    assert code == 0 and rep["norm"] > 0
    assert rep["window_id"] == "plateau-smoothstep" and rep["truncation"] == "full-lattice"
    code, _, err = run(capsys, "mod-norm", "--N", "128")
    assert code == 2 and "insufficient resolution" in json.loads(err)["error"]
    code, _, err = run(capsys, "mod-norm", "--weight", "gauss:1")
    assert code == 2


def test_nlse_command(capsys, tmp_path):
    traj, res = tmp_path / "traj.json", tmp_path / "res.csv"
    code, rep, _ = run(capsys, "nlse", "--lambda", "1", "--dt", "1e-3", "--T", "0.005",
                       "--out", str(traj), "--residuals", str(res))
    assert code == 0 and rep["mass_drift"] <= 1e-10 and rep["max_residual"] <= 1e-2
    assert rep["association"].startswith("left")
    doc = json.loads(traj.read_text())
    assert doc["format"] == "nlse-traj/1" and len(doc["states"]) == 6
    rows = list(csv.reader(res.open()))
    assert rows[0] == ["t", "residual", "mass", "boundary_mass"] and len(rows) == 5


def test_suite_subset(capsys, tmp_path):
    out = tmp_path / "summary.json"
    code, rep, _ = run(capsys, "suite", "--quick", "--only", "moyal,holder-young", "--seed", "7", "--out", str(out))
    assert code == 0 and rep["status"] == "ok"
    summary = json.loads(out.read_text())
    assert {"check_name", "status", "value", "tolerance"} <= set(summary[0])
    code, _, err = run(capsys, "suite", "--only", "nope")
    assert code == 2 and "unknown checks" in json.loads(err)["error"]


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
