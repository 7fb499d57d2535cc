"""Acceptance criteria at full size and stated tolerances.

Each test prints one ``PASS``/``FAIL`` line with the measured value and the
wall time against the budget.  Run with ``pytest tests/test_acceptance.py -v -s``
to see the lines inline; they are also echoed through the terminal reporter.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from gaborlab import suite

SEED = 7

pytestmark = pytest.mark.slow


def _report(capsys, number: int, title: str, results, budget: float, elapsed: float):
    ok = all(r.status == "ok" for r in results) and elapsed < budget
    detail = ", ".join(f"{r.check_name}={r.value:.3g} (tol {r.tolerance:g})" for r in results)
    line = (f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}; "
            f"{elapsed:.1f}s / {budget:.0f}s")
    with capsys.disabled():
        print("\n" + line)
    return ok


def _run(capsys, number, title, check, budget):
    t0 = time.perf_counter()
    results = check(SEED, quick=False)
    elapsed = time.perf_counter() - t0
    ok = _report(capsys, number, title, results, budget, elapsed)
    for r in results:
        assert np.isfinite(r.value) and r.value <= r.tolerance, r
    assert elapsed < budget
    assert ok
    return results


def test_criterion_01_fourier_convolution(capsys):
    (r,) = _run(capsys, 1, "Fourier convolution", suite.check_fourier_convolution, 10)
    assert r.tolerance == 1e-8


def test_criterion_02_moyal(capsys):
    (r,) = _run(capsys, 2, "Moyal identity", suite.check_moyal, 30)
    assert r.tolerance == 1e-8


def test_criterion_03_inversion_projection(capsys):
    rs = _run(capsys, 3, "STFT inversion and projection", suite.check_inversion_projection, 60)
    assert [r.tolerance for r in rs] == [1e-8] * 3


def test_criterion_04_twisted(capsys):
    rs = _run(capsys, 4, "twisted convolution", suite.check_twisted, 300)
    assert [r.tolerance for r in rs] == [1e-6] * 2


def test_criterion_05_holder_young(capsys):
    (r,) = _run(capsys, 5, "discrete Hoelder/Young", suite.check_holder_young, 60)
    assert r.tolerance == 1 + 1e-12


def test_criterion_06_gabor_reconstruction(capsys):
    rs = _run(capsys, 6, "Gabor reconstruction", suite.check_gabor_reconstruction, 120)
    assert [r.tolerance for r in rs] == [1e-6, 1e-12]


def test_criterion_07_window_independence(capsys):
    (r,) = _run(capsys, 7, "window independence", suite.check_window_independence, 300)
    assert r.tolerance == 10.0


def test_criterion_08_l2_sobolev(capsys):
    rs = _run(capsys, 8, "M22 vs L2 and H^s bands", suite.check_l2_sobolev, 120)
    assert [r.tolerance for r in rs] == [1.5, 2.0, 2.0]


def test_criterion_09_theorems(capsys):
    rs = _run(capsys, 9, "multiplication/convolution theorems", suite.check_theorems, 600)
    assert [r.tolerance for r in rs] == [0.25, 1e-6]


def test_criterion_10_gabor_product(capsys):
    rs = _run(capsys, 10, "Gabor product", suite.check_gabor_product, 600)
    assert [r.tolerance for r in rs] == [1e-5, 1e-12]


def test_criterion_11_nlse(capsys):
    rs = _run(capsys, 11, "NLSE", suite.check_nlse, 900)
    assert [r.tolerance for r in rs] == [1e-10, 1e-6, 1e-2, 1.0]


def test_criterion_12_determinism(capsys, tmp_path):
    t0 = time.perf_counter()
    blobs = []
    for k in range(2):
        out = tmp_path / f"summary{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "gaborlab.cli", "suite", "--quick", "--seed", str(SEED), "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0, proc.stderr.decode()
        blobs.append((proc.stdout, out.read_bytes()))
    elapsed = time.perf_counter() - t0
    same = blobs[0] == blobs[1]
    result = suite.CheckResult.of("byte_mismatch", 0.0 if same else 1.0, 0.0)
    _report(capsys, 12, "suite determinism", [result], 1200, elapsed)
    assert same
