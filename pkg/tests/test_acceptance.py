"""Acceptance criteria 1-10, one PASS/FAIL line each.

Runs under pytest (lines are printed past output capture) or directly:
``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import pytest

from squeezecat import analytics as an
from squeezecat import fock
from squeezecat import pipeline as pl
from squeezecat.cli import main as cli_main
from squeezecat.optimize import amplification_comparison, success_beta_zero
from squeezecat.verification import crossing, oracle_errors, oracle_grid, richardson_slope, run_checks

SQRT6 = math.sqrt(6.0)
_reporter = None


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    if _reporter is not None:
        with _reporter.disabled():
            print(line)
    else:
        print(line)
    assert ok, line


@pytest.fixture(autouse=True)
def _line_out(capsys):
    global _reporter
    _reporter = capsys
    yield
    _reporter = None


def timed(f):
    t0 = time.perf_counter()
    out = f()
    return out, time.perf_counter() - t0


def test_criterion_1_f3_at_sqrt6():
    f, dt = timed(lambda: an.f3(SQRT6, an.r3_opt(SQRT6), an.beta_opt_sq(SQRT6)))
    ok = abs(f - 0.976) <= 0.001 and dt < 1.0
    report(1, ok, f"F3(sqrt6) = {f:.6f} (target 0.976 +- 0.001), {dt:.3f} s")


def test_criterion_2_thresholds():
    def run():
        a1 = crossing(lambda a: an.f1(a, an.r1_opt(a)), 1.0, 3.0)
        a3 = crossing(lambda a: an.f3(a, an.r3_opt(a), an.beta_opt_sq(a)), 2.0, 5.0)
        return a1, a3

    (a1, a3), dt = timed(run)
    ok = abs(a1 - 1.90) <= 0.02 and abs(a3 - 3.30) <= 0.03 and dt < 1.0
    report(2, ok, f"F1 crosses 0.9 at {a1:.4f} (1.90 +- 0.02), F3 at {a3:.4f} (3.30 +- 0.03), {dt:.3f} s")


def test_criterion_3_beta_zero_optimum():
    (r, f), dt = timed(lambda: an.f3_beta_zero_opt(SQRT6))
    ok = abs(r - 0.62) <= 0.01 and abs(f - 0.90) <= 0.005 and dt < 1.0
    report(3, ok, f"r = {r:.5f} (0.62 +- 0.01), F = {f:.5f} (0.90 +- 0.005), {dt:.3f} s")


def test_criterion_4_lossy_overlap():
    def run():
        closed = an.lossy_cat_overlap(SQRT6, 0.01)
        cat = fock.cat_state(SQRT6, fock.Parity.ODD, 60)
        numeric = fock.fidelity_mixed(pl.loss_channel(cat, 0.01), cat)
        return closed, numeric

    (closed, numeric), dt = timed(run)
    ok = abs(closed - 0.94) <= 0.005 and abs(numeric - 0.94) <= 0.005 and abs(closed - numeric) <= 1e-8 and dt < 5
    report(4, ok, f"closed {closed:.6f}, trace-out {numeric:.6f}, gap {abs(closed - numeric):.1e}, {dt:.3f} s")


def test_criterion_5_success_probability():
    (res0, dt0) = timed(lambda: success_beta_zero(SQRT6))
    P0 = res0[2]

    def chain():
        p = an.beta_chain(SQRT6)
        return an.success_probability(p)

    P1, dt1 = timed(chain)
    ok0 = 1.3e-2 <= P0 <= 1.9e-2 and dt0 < 30
    ok1 = 4.5e-4 <= P1 <= 8e-4 and dt1 < 30
    report(
        5,
        ok0 and ok1,
        f"beta=0 P = {P0:.4e} in [1.3e-2, 1.9e-2]: {ok0} ({dt0:.2f} s); "
        f"beta chain P = {P1:.4e} in [4.5e-4, 8e-4]: {ok1} ({dt1:.2f} s)",
    )


def test_criterion_6_comparison_numbers():
    def run():
        small = amplification_comparison(math.sqrt(1.5))
        return small["probability"], an.f1(math.sqrt(3.0), an.r1_opt(math.sqrt(3.0)))

    (P, F), dt = timed(run)
    ok = abs(P - 0.13) <= 0.01 and abs(F - 0.93) <= 0.005 and dt < 10
    report(6, ok, f"P(sqrt(3/2)) = {P:.5f} (0.13 +- 0.01), F1(sqrt3) = {F:.5f} (0.93 +- 0.005), {dt:.2f} s")


def test_criterion_7_oracle_equivalence():
    worst, dt = timed(lambda: oracle_errors(oracle_grid(50)))
    ok = max(worst["f1"], worst["f3"], worst["f3_realistic"]) <= 1e-8 and worst["probability_rel"] <= 1e-8 and dt < 300
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(7, ok, f"50 points, worst gaps {detail}, {dt:.1f} s")


def test_criterion_8_richardson_slope():
    (slope, residuals), dt = timed(lambda: richardson_slope(beta=1.0, r=0.4))
    ok = abs(slope - 2.0) <= 0.1 and dt < 30
    report(8, ok, f"slope {slope:.4f} (2.0 +- 0.1), residuals {', '.join(f'{x:.2e}' for x in residuals)}, {dt:.2f} s")


def test_criterion_9_property_suite():
    names = [
        "invariant.unitarity",
        "invariant.number_blocks",
        "invariant.parity",
        "invariant.kraus_completeness",
        "invariant.cutoff_doubling",
    ]
    rep, dt = timed(lambda: run_checks(names=names))
    failed = [c["name"] for c in rep["checks"] if not c["passed"]]
    ran = len(rep["checks"])
    ok = ran == len(names) and not failed and dt < 120
    report(9, ok, f"{ran - len(failed)}/{len(names)} properties hold{' (failed: ' + ', '.join(failed) + ')' if failed else ''}, {dt:.2f} s")


def test_criterion_10_determinism(tmp_path):
    def run():
        blobs = []
        for k in range(2):
            out = tmp_path / f"run{k}"
            assert cli_main(["fig1", "--out", str(out)]) == 0
            blobs.append([(out / name).read_bytes() for name in ("fig1_fidelity.csv", "fig1_squeezing.csv")])
        return blobs

    (first, second), dt = timed(run)
    ok = first == second
    report(10, ok, f"two default-grid fig1 runs byte-identical: {ok} ({len(first[0])} + {len(first[1])} bytes), {dt:.1f} s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
