"""Command-line front end: figure data as CSV, scenario reports as JSON.

Exit codes: 0 success, 1 verification failure, 2 sweep degradation,
3 numerical precondition failure (including invalid configuration).
Errors print one line to stderr: ``error[<code>] <Kind>: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import analytics as an
from . import fock
from . import pipeline as pl
from .errors import SqueezeCatError
from .optimize import (
    Scheme,
    SweepSpec,
    default_alpha_grid,
    success_beta_zero,
    sweep,
    tolerance_curves,
)
from .verification import run_checks

EXIT_OK, EXIT_VERIFY, EXIT_SWEEP, EXIT_NUMERIC = 0, 1, 2, 3
FAILURE_BUDGET = 0.05


class ConfigError(SqueezeCatError):
    code = EXIT_NUMERIC


class _Parser(argparse.ArgumentParser):
    # usage errors follow the same one-line contract as every other failure
    def error(self, message):
        self.exit(EXIT_NUMERIC, f"error[{EXIT_NUMERIC}] UsageError: {message}\n")


def fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return f"{float(value):.12g}"


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_json(path: Path | None, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# --------------------------------------------------------------------------
# scenario configuration

SIM_SCHEMES = ("beta_chain", "beta_zero", "single")


@dataclass
class ScenarioConfig:
    scheme: str = "beta_chain"
    alpha: float = math.sqrt(6.0)
    r: float | None = None
    beta: complex | None = None
    T1: float | None = None
    T2: float | None = None
    T3: float | None = None
    cutoff: int | None = None
    detector: str = "nr1"
    out: str | None = None
    format: str = "json"

    def validate(self) -> "ScenarioConfig":
        if self.scheme not in SIM_SCHEMES:
            raise ConfigError(f"scheme must be one of {SIM_SCHEMES}, got {self.scheme!r}")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.r is not None and not 0.0 <= self.r < 1.0:
            raise ConfigError("r must lie in [0, 1)")
        for name in ("T1", "T2", "T3"):
            val = getattr(self, name)
            if val is not None and not 0.0 < val < 1.0:
                raise ConfigError(f"{name} must lie in (0, 1)")
        if self.cutoff is not None and self.cutoff < 1:
            raise ConfigError("cutoff must be at least 1")
        if self.detector not in ("nr1", "apd"):
            raise ConfigError("detector must be nr1 or apd")
        if self.format not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        return self


_PARSERS = {
    "scheme": str, "alpha": float, "r": float, "beta": complex, "T1": float, "T2": float,
    "T3": float, "cutoff": int, "detector": str, "out": str, "format": str,
}


def load_config(path: Path) -> ScenarioConfig:
    """Read flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](val.replace(" ", ""))
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return ScenarioConfig(**values).validate()


def _scenario_params(cfg: ScenarioConfig):
    alpha = cfg.alpha
    if cfg.scheme == "single":
        T1 = cfg.T1 if cfg.T1 is not None else 1.0 - 1e-4
        r = cfg.r if cfg.r is not None else min(an.r1_opt(alpha) / T1, 0.999)
        return {"r": r, "T1": T1}
    if cfg.scheme == "beta_chain":
        p = an.beta_chain(alpha)
    else:
        params, _, _, _ = success_beta_zero(alpha)
        p = an.RealisticParams(params["r"], params["T1"], params["T2"], params["T3"])
    p = an.RealisticParams(
        cfg.r if cfg.r is not None else p.r,
        cfg.T1 if cfg.T1 is not None else p.T1,
        cfg.T2 if cfg.T2 is not None else p.T2,
        cfg.T3 if cfg.T3 is not None else p.T3,
        cfg.beta if cfg.beta is not None else p.beta,
    )
    return p


def simulate(cfg: ScenarioConfig) -> dict:
    cfg.validate()
    detector = fock.DetectorModel(cfg.detector)
    alpha = cfg.alpha
    params = _scenario_params(cfg)
    if isinstance(params, dict):
        r, T1 = params["r"], params["T1"]
        spec = pl.CircuitSpec(r, (pl.CircuitStage(T1, 0.0, detector),), cfg.cutoff)
        cf_fid = an.f1(alpha, r * T1)
        cf_prob = an.success_probability_single(r, T1)
        shown = dict(params)
    else:
        spec = pl.three_tap_circuit(params, detector, cfg.cutoff)
        try:
            cf_fid = an.f3_realistic(alpha, params)
            cf_prob = an.success_probability(params)
        except SqueezeCatError:
            cf_fid = cf_prob = None
        shown = {"r": params.r, "x": params.x, "T1": params.T1, "T2": params.T2, "T3": params.T3,
                 "beta": [params.beta.real, params.beta.imag]}
    res = pl.run_circuit(spec)
    target = fock.cat_state(alpha, fock.Parity.ODD, res.n_max)
    if isinstance(res.output, fock.PureState):
        fid = fock.fidelity(res.output, target)
    else:
        fid = fock.fidelity_mixed(res.output, target)
    report = {
        "scheme": cfg.scheme,
        "alpha": alpha,
        "detector": cfg.detector,
        "params": shown,
        "fidelity_vs_target_cat": fid,
        "probability": res.probability,
        "per_stage_probabilities": res.per_stage_probabilities,
        "cutoff_used": res.n_max,
        "closed_form_fidelity": cf_fid,
        "closed_form_probability": cf_prob,
        "discrepancies": None,
    }
    if cf_fid is not None:
        report["discrepancies"] = {
            "fidelity_abs": abs(fid - cf_fid),
            "probability_rel": abs(res.probability - cf_prob) / cf_prob,
        }
        if detector is fock.DetectorModel.APD:
            # closed forms describe exactly-one-photon triggers
            report["apd_fidelity_delta"] = cf_fid - fid
    return report


# --------------------------------------------------------------------------
# commands


def _grid(args) -> list:
    if args.alpha:
        return sorted(args.alpha)
    return default_alpha_grid(args.alpha_min, args.alpha_max, args.alpha_step)


def _degraded(reports, n) -> bool:
    return any(len(rep.failures) > FAILURE_BUDGET * n for rep in reports)


def cmd_fig1(args) -> int:
    grid = _grid(args)
    out = Path(args.out)
    schemes = [Scheme.EVEN_ZERO, Scheme.ONE_PHOTON, Scheme.EVEN_TWO,
               Scheme.THREE_PHOTON, Scheme.THREE_PHOTON_BETA_ZERO]
    reps = {s: sweep(SweepSpec(grid, s), max_workers=args.workers) for s in schemes}
    fid = [reps[s].column("fidelity") for s in schemes]
    write_csv(out / "fig1_fidelity.csv", ["alpha", "F0", "F1", "F2", "F3", "F3_beta0"],
              zip(grid, *fid))
    rs = [reps[s].column("r") for s in (Scheme.ONE_PHOTON, Scheme.THREE_PHOTON, Scheme.THREE_PHOTON_BETA_ZERO)]
    write_csv(out / "fig1_squeezing.csv", ["alpha", "r1", "r3", "r3_beta0"], zip(grid, *rs))
    return EXIT_SWEEP if _degraded(reps.values(), len(grid)) else EXIT_OK


def cmd_fig2(args) -> int:
    out = Path(args.out)
    alphas = args.alpha or [1.0, 2.0, 3.0, 4.0, 5.0]
    curves = tolerance_curves(alphas, args.points)
    markers = []
    for c in curves:
        tag = f"{c.alpha:g}"
        write_csv(out / f"fig2a_r_alpha{tag}.csv", ["r", "F3"], zip(c.r_grid, c.f_vs_r))
        write_csv(out / f"fig2b_beta_alpha{tag}.csv", ["beta", "F3"], zip(c.beta_grid, c.f_vs_beta))
        markers.append((c.alpha, c.r_opt, c.beta_opt, c.f_max, c.r_zero, c.beta_zero))
    write_csv(out / "fig2_markers.csv", ["alpha", "r3", "beta_opt", "F3_max", "r_zero", "beta_zero"], markers)
    return EXIT_OK


def cmd_fig4(args) -> int:
    grid = _grid(args)
    rep = sweep(SweepSpec(grid, Scheme.SUCCESS_BETA_ZERO), max_workers=args.workers)
    rows = zip(grid, rep.column("probability"), rep.column("x"), rep.column("T1"),
               rep.column("T2"), rep.column("T3"), rep.column("r"))
    write_csv(Path(args.out) / "fig4_success.csv", ["alpha", "P", "x", "T1", "T2", "T3", "r"], rows)
    return EXIT_SWEEP if _degraded([rep], len(grid)) else EXIT_OK


def cmd_simulate(args) -> int:
    if args.config:
        cfg = load_config(Path(args.config))
    else:
        cfg = ScenarioConfig()
    overrides = {f.name: getattr(args, f.name, None) for f in fields(ScenarioConfig)}
    for key, val in overrides.items():
        if val is not None:
            setattr(cfg, key, val)
    cfg.validate()
    report = simulate(cfg)
    path = Path(cfg.out) if cfg.out else None
    if cfg.format == "json":
        write_json(path, report)
    else:
        flat = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
        if path is None:
            w = csv.writer(sys.stdout, lineterminator="\n")
            w.writerow(["key", "value"])
            for k in sorted(flat):
                w.writerow([k, flat[k] if isinstance(flat[k], str) else fmt(flat[k])])
        else:
            write_csv(path, ["key", "value"], [])
            with open(path, "a", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh, lineterminator="\n")
                for k in sorted(flat):
                    w.writerow([k, flat[k] if isinstance(flat[k], str) else fmt(flat[k])])
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_checks(cutoff=args.cutoff)
    write_json(Path(args.out) if args.out else None, report)
    for check in report["checks"]:
        if not check["passed"]:
            print(f"FAIL {check['name']}", file=sys.stderr)
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="squeezecat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_opts(p):
        p.add_argument("--alpha", type=float, nargs="+", help="explicit alpha values")
        p.add_argument("--alpha-min", type=float, default=0.2)
        p.add_argument("--alpha-max", type=float, default=5.0)
        p.add_argument("--alpha-step", type=float, default=0.05)
        p.add_argument("--workers", type=int, default=None, help="process pool size for sweeps")
        p.add_argument("--out", default=".", help="output directory")

    p1 = sub.add_parser("fig1", help="maximal cat fidelities and optimal squeezing vs alpha")
    grid_opts(p1)
    p1.set_defaults(func=cmd_fig1)

    p2 = sub.add_parser("fig2", help="F3 tolerance curves in r and beta")
    p2.add_argument("--alpha", type=float, nargs="+")
    p2.add_argument("--points", type=int, default=401)
    p2.add_argument("--out", default=".")
    p2.set_defaults(func=cmd_fig2)

    p4 = sub.add_parser("fig4", help="optimised beta = 0 heralding probability vs alpha")
    grid_opts(p4)
    p4.set_defaults(func=cmd_fig4)

    ps = sub.add_parser("simulate", help="run one heralding circuit and compare with the closed forms")
    ps.add_argument("--config", help="flat key = value scenario file")
    ps.add_argument("--scheme", choices=SIM_SCHEMES)
    ps.add_argument("--alpha", type=float)
    ps.add_argument("--r", type=float)
    ps.add_argument("--beta", type=complex)
    ps.add_argument("--T1", type=float)
    ps.add_argument("--T2", type=float)
    ps.add_argument("--T3", type=float)
    ps.add_argument("--cutoff", type=int)
    ps.add_argument("--detector", choices=("nr1", "apd"))
    ps.add_argument("--out")
    ps.add_argument("--format", choices=("json", "csv"))
    ps.set_defaults(func=cmd_simulate)

    pv = sub.add_parser("verify", help="run the self-verification checks")
    pv.add_argument("--cutoff", type=int, help="force every numerical check onto this cutoff")
    pv.add_argument("--out", help="report path (default: stdout)")
    pv.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SqueezeCatError as exc:
        print(f"error[{exc.code}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.code
    except (OSError, ValueError) as exc:
        print(f"error[{EXIT_NUMERIC}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
