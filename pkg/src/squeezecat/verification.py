"""Self-checks run by ``squeezecat verify``.

Each check returns ``(passed, detail)``; a raised package error counts as a
failure and is reported with its type.  ``cutoff`` forces every numerical
check onto one Fock cutoff instead of the automatic policy.
"""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.optimize import brentq

from . import analytics as an
from . import fock
from . import pipeline as pl
from .errors import SqueezeCatError
from .optimize import Scheme, SweepSpec, amplification_comparison, success_beta_zero, sweep

SQRT6 = math.sqrt(6.0)


def oracle_grid(n_points: int = 50, seed: int = 20070801):
    """Deterministic (alpha, r, beta, T1, T2) samples inside the valid region."""
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n_points):
        alpha = rng.uniform(0.5, 3.5)
        r = rng.uniform(0.1, 0.85)
        beta = complex(rng.uniform(-1.5, 1.5), rng.uniform(-0.5, 0.5))
        T1 = rng.uniform(0.7, 0.98)
        T2 = rng.uniform(0.85, 0.99)
        pts.append((alpha, r, beta, T1, T2))
    return pts


def _n(cutoff, r=0.0, alpha=0.0):
    return cutoff if cutoff is not None else fock.default_cutoff(r, alpha)


def three_photon_state(r: float, beta_sq: complex, n_max: int) -> fock.PureState:
    s1 = fock.annihilate(fock.squeezed_vacuum(r, n_max))
    s3 = fock.annihilate(fock.annihilate(s1))
    return fock.PureState(s3.amplitudes - complex(beta_sq) * s1.amplitudes)


def oracle_errors(points, cutoff=None) -> dict:
    """Largest closed-form vs simulation gaps over a parameter grid."""
    worst = {"f1": 0.0, "f3": 0.0, "f3_realistic": 0.0, "probability_rel": 0.0}
    for alpha, r, beta, T1, T2 in points:
        n = _n(cutoff, r, alpha)
        cat = fock.cat_state(alpha, fock.Parity.ODD, n)
        sq = fock.squeezed_vacuum(r, n)
        num1 = fock.fidelity(fock.annihilate(sq), cat)
        worst["f1"] = max(worst["f1"], abs(num1 - an.f1(alpha, r)))
        num3 = fock.fidelity(three_photon_state(r, beta * beta, n), cat)
        worst["f3"] = max(worst["f3"], abs(num3 - an.f3(alpha, r, beta * beta)))
        p = an.RealisticParams.tied(r, T1, T2, beta)
        res = pl.run_circuit(pl.three_tap_circuit(p, n_max=n))
        worst["f3_realistic"] = max(
            worst["f3_realistic"], abs(fock.fidelity(res.output, cat) - an.f3_realistic(alpha, p))
        )
        cf = an.success_probability(p)
        worst["probability_rel"] = max(worst["probability_rel"], abs(res.probability - cf) / cf)
    return worst


def richardson_slope(beta: complex = 1.0, r: float = 0.4, cutoff=None):
    """Log-log slope of the first-order residual of the single-tap map."""
    n = _n(cutoff, r)
    sq = fock.squeezed_vacuum(r, n)
    a = fock.annihilation_matrix(n)
    v = (a + beta * np.eye(n + 1)) @ sq.amplitudes
    target = np.outer(v, v.conj())
    Rs = np.array([1e-3, 1e-4, 1e-5])
    res = []
    for R in Rs:
        out, _ = pl.kraus_subtract(sq, R, beta)
        res.append(np.linalg.norm(out.matrix - R * target))
    slope = np.polyfit(np.log(Rs), np.log(res), 1)[0]
    return float(slope), [float(x) for x in res]


def _check_f3_sqrt6(cutoff):
    f = an.f3(SQRT6, an.r3_opt(SQRT6), an.beta_opt_sq(SQRT6))
    return abs(f - 0.976) <= 0.001, {"F3": f}


def crossing(fid, lo, hi, level=0.9):
    return brentq(lambda a: fid(a) - level, lo, hi, xtol=1e-12)


def _check_f1_threshold(cutoff):
    a = crossing(lambda a: an.f1(a, an.r1_opt(a)), 1.0, 3.0)
    return abs(a - 1.90) <= 0.02, {"alpha_cross": a}


def _check_f3_threshold(cutoff):
    a = crossing(lambda a: an.f3(a, an.r3_opt(a), an.beta_opt_sq(a)), 2.0, 5.0)
    return abs(a - 3.30) <= 0.03, {"alpha_cross": a, "F3_at_3.3": an.f3(3.3, an.r3_opt(3.3), an.beta_opt_sq(3.3))}


def _check_f3_beta0(cutoff):
    r, f = an.f3_beta_zero_opt(SQRT6)
    return abs(r - 0.62) <= 0.01 and abs(f - 0.90) <= 0.005, {"r": r, "F": f}


def _check_lossy(cutoff):
    closed = an.lossy_cat_overlap(SQRT6, 0.01)
    cat = fock.cat_state(SQRT6, fock.Parity.ODD, _n(cutoff, 0.0, SQRT6))
    numeric = fock.fidelity_mixed(pl.loss_channel(cat, 0.01), cat)
    ok = abs(closed - 0.94) <= 0.005 and abs(closed - numeric) <= 1e-8
    return ok, {"closed_form": closed, "numeric": numeric}


def _check_p_beta0(cutoff):
    params, fid, P, _ = success_beta_zero(SQRT6)
    return 1.3e-2 <= P <= 1.9e-2, {"P": P, **params}


def _check_p_chain(cutoff):
    p = an.beta_chain(SQRT6)
    P = an.success_probability(p)
    res = pl.run_circuit(pl.three_tap_circuit(p, n_max=_n(cutoff, p.r, SQRT6)))
    agree = abs(res.probability - P) / P
    return 4.5e-4 <= P <= 8e-4 and agree < 1e-8, {"P": P, "pipeline_P": res.probability, "rel_gap": agree}


def _check_amplification(cutoff):
    small = amplification_comparison(math.sqrt(1.5))
    f_sqrt3 = an.f1(math.sqrt(3.0), an.r1_opt(math.sqrt(3.0)))
    ok = (
        abs(small["probability"] - 0.13) <= 0.01
        and abs(f_sqrt3 - 0.93) <= 0.005
        and 3e-4 / 1.5 <= small["probability_fourfold"] <= 3e-4 * 1.5
    )
    return ok, {"P": small["probability"], "P4": small["probability_fourfold"], "F_sqrt3": f_sqrt3}


def _check_oracle(cutoff):
    worst = oracle_errors(oracle_grid(12), cutoff)
    ok = max(worst["f1"], worst["f3"], worst["f3_realistic"]) < 1e-8 and worst["probability_rel"] < 1e-8
    return ok, worst


def _check_unitarity(cutoff):
    n = _n(cutoff, 0.5, 2.0)
    sq = fock.squeezed_vacuum(0.5, n)
    d = fock.displace(fock.PureState.vacuum(n), 0.8 - 0.3j)
    bs = fock.beam_splitter(sq, fock.coherent_state(0.7j, n), 0.37)
    errs = [abs(d.norm_sq - 1.0), abs(bs.norm_sq - 1.0)]
    return max(errs) < 1e-10, {"displace": errs[0], "beam_splitter": errs[1]}


def _check_blocks(cutoff):
    n = _n(cutoff)
    a = fock.PureState(np.r_[0, 0, 0.6, 0.8, np.zeros(n - 3)])
    b = fock.PureState.fock(1, n)
    out = fock.beam_splitter(a, b, 0.3).amplitudes
    total = np.add.outer(np.arange(out.shape[0]), np.arange(out.shape[1]))
    leak = float(np.abs(out[(total != 3) & (total != 4)]).max())
    return leak < 1e-14, {"max_outside": leak}


def _check_parity(cutoff):
    sub = fock.annihilate(fock.squeezed_vacuum(0.6, _n(cutoff, 0.6)))
    return not sub.amplitudes[0::2].any(), {"max_even": float(np.abs(sub.amplitudes[0::2]).max())}


def _check_completeness(cutoff):
    n = _n(cutoff, 0.5)
    sq = fock.squeezed_vacuum(0.5, n)
    joint = fock.beam_splitter(sq, fock.PureState.vacuum(1), 0.8)
    _, p_click = fock.condition_on_detection(joint, fock.DetectorModel.APD, 0.3j)
    p_none = fock.project_trigger(joint, 0, 0.3j).norm_sq
    probs = pl.outcome_probabilities(sq, 0.2, 0.3 / math.sqrt(0.2))
    gap = abs(p_click + p_none - 1.0)
    gap_explicit = abs(probs.sum() - 1.0)
    return max(gap, gap_explicit) < 1e-10, {"click_plus_none": gap, "explicit_sum": gap_explicit}


def _check_cutoff_doubling(cutoff):
    a, r = 3.0, 0.8
    n = _n(cutoff, r, a)
    p = an.RealisticParams.tied(r, 0.9, 0.95, 0.8)
    vals = []
    for m in (n, 2 * n):
        res = pl.run_circuit(pl.three_tap_circuit(p, n_max=m))
        vals.append((fock.fidelity(res.output, fock.cat_state(a, fock.Parity.ODD, m)), res.probability))
    drift = max(abs(vals[0][0] - vals[1][0]), abs(vals[0][1] - vals[1][1]))
    return drift < 1e-9, {"drift": drift}


def _check_richardson(cutoff):
    slope, res = richardson_slope(cutoff=cutoff)
    return abs(slope - 2.0) <= 0.1, {"slope": slope, "residuals": res}


def _check_dominance(cutoff):
    grid = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0]
    cols = {s: sweep(SweepSpec(grid, s)).column("fidelity") for s in (
        Scheme.ONE_PHOTON, Scheme.THREE_PHOTON, Scheme.THREE_PHOTON_BETA_ZERO,
        Scheme.EVEN_ZERO, Scheme.EVEN_TWO)}
    slack = 1e-9
    ok = bool(
        np.all(cols[Scheme.THREE_PHOTON] >= cols[Scheme.THREE_PHOTON_BETA_ZERO] - slack)
        and np.all(cols[Scheme.THREE_PHOTON_BETA_ZERO] >= cols[Scheme.ONE_PHOTON] - slack)
        and np.all(cols[Scheme.EVEN_TWO] >= cols[Scheme.EVEN_ZERO] - slack)
    )
    return ok, {s.value: [float(v) for v in c] for s, c in cols.items()}


CHECKS = [
    ("regression.f3_at_sqrt6", _check_f3_sqrt6),
    ("regression.f1_threshold", _check_f1_threshold),
    ("regression.f3_threshold", _check_f3_threshold),
    ("regression.f3_beta_zero_at_sqrt6", _check_f3_beta0),
    ("regression.lossy_overlap", _check_lossy),
    ("regression.success_beta_zero", _check_p_beta0),
    ("regression.success_beta_chain", _check_p_chain),
    ("regression.amplification_comparison", _check_amplification),
    ("oracle.closed_form_vs_circuit", _check_oracle),
    ("invariant.unitarity", _check_unitarity),
    ("invariant.number_blocks", _check_blocks),
    ("invariant.parity", _check_parity),
    ("invariant.kraus_completeness", _check_completeness),
    ("invariant.cutoff_doubling", _check_cutoff_doubling),
    ("invariant.first_order_limit", _check_richardson),
    ("invariant.dominance", _check_dominance),
]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def run_checks(cutoff: int | None = None, names=None) -> dict:
    results = []
    for name, check in CHECKS:
        if names and name not in names:
            continue
        start = time.perf_counter()
        try:
            passed, detail = check(cutoff)
        except SqueezeCatError as exc:
            passed, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
        results.append({
            "name": name,
            "passed": bool(passed),
            "seconds": round(time.perf_counter() - start, 3),
            "detail": _jsonable(detail),
        })
    return {"all_passed": all(r["passed"] for r in results), "checks": results}
