"""Deterministic maximisers and the parameter sweeps behind the fidelity and
success-probability curves."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize

from . import analytics as an
from .errors import NoConvergence, SqueezeCatError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
GRID_POINTS = 64
MAX_ITER_1D = 200
MAX_EVAL_ND = 2000
GRAD_TOL = 1e-6


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    tolerance: float = 1e-10

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


def _safe(f):
    def g(x):
        try:
            val = f(x)
        except (SqueezeCatError, ZeroDivisionError, OverflowError, ValueError):
            return -np.inf
        return val if np.isfinite(val) else -np.inf

    return g


def maximize_1d(f, bracket: Bracket) -> tuple[float, float]:
    """Maximise a scalar function on a bracket.

    A 64-point scan selects the basin, golden-section search narrows it, and
    a root of the central-difference derivative polishes the argmax (golden
    section alone stalls at ~sqrt(eps) because f is flat at the top).
    """
    g = _safe(f)
    grid = np.linspace(bracket.lo, bracket.hi, GRID_POINTS)
    vals = np.array([g(x) for x in grid])
    if not np.isfinite(vals).any():
        raise NoConvergence("objective is undefined on the whole bracket")
    i = int(np.argmax(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, GRID_POINTS - 1)]

    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = g(c), g(d)
    for _ in range(MAX_ITER_1D):
        if b - a < bracket.tolerance:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = g(d)
    else:
        raise NoConvergence(f"golden section did not reach width {bracket.tolerance}")
    x = 0.5 * (a + b)

    span = bracket.hi - bracket.lo
    h = 1e-6 * span
    delta = max(1e-4 * span, 4 * h)

    def slope(y):
        return (g(y + h) - g(y - h)) / (2 * h)

    lo, hi = max(x - delta, bracket.lo + h), min(x + delta, bracket.hi - h)
    if lo < hi:
        s_lo, s_hi = slope(lo), slope(hi)
        if np.isfinite(s_lo) and np.isfinite(s_hi) and s_lo > 0 > s_hi:
            y = brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            if g(y) >= g(x) - 1e-15 * max(1.0, abs(g(x))):
                x = y
    return float(x), float(f(x))


def numeric_gradient(f, x, scales=None, rel_step: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    scales = np.ones_like(x) if scales is None else np.asarray(scales, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        h = rel_step * scales[i]
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (f(x + e) - f(x - e)) / (2 * h)
    return grad


def maximize_nd(f, start, scales) -> tuple[np.ndarray, float]:
    """Local simplex maximiser in up to four dimensions.

    Works in coordinates scaled by ``scales`` and restarts from the current
    best point until the central-difference gradient norm drops below 1e-6 or
    the evaluation budget is spent.
    """
    start = np.asarray(start, dtype=float)
    scales = np.asarray(scales, dtype=float)
    if start.size > 4:
        raise ValueError("maximize_nd supports at most four parameters")
    g = _safe(f)

    def neg(u):
        return -g(start + u * scales)

    u = np.zeros_like(start)
    used = 0
    step = 1.0
    while used < MAX_EVAL_ND:
        simplex = np.vstack([u] + [u + step * e for e in np.eye(u.size)])
        res = minimize(
            neg,
            u,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": 1e-11,
                "fatol": 1e-16,
                "maxfev": MAX_EVAL_ND - used,
            },
        )
        used += res.nfev
        u = res.x
        x = start + u * scales
        grad = numeric_gradient(g, x, scales)
        if np.all(np.isfinite(grad)) and np.linalg.norm(grad) < GRAD_TOL:
            return x, float(f(x))
        step *= 0.01
    raise NoConvergence(f"simplex search exhausted {MAX_EVAL_ND} evaluations")


# --------------------------------------------------------------------------
# sweeps


class Scheme(enum.Enum):
    ONE_PHOTON = "one_photon"
    THREE_PHOTON = "three_photon"
    THREE_PHOTON_BETA_ZERO = "three_photon_beta_zero"
    EVEN_ZERO = "even_zero"
    EVEN_TWO = "even_two"
    SUCCESS_BETA_ZERO = "success_beta_zero"
    SUCCESS_BETA = "success_beta"


def default_alpha_grid(lo: float = 0.2, hi: float = 5.0, step: float = 0.05) -> list[float]:
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 10) for i in range(n + 1)]


@dataclass(frozen=True)
class SweepSpec:
    alpha_grid: tuple
    scheme: Scheme
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = tuple(float(a) for a in self.alpha_grid)
        if not grid or any(a <= 0 for a in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("alpha_grid must be positive and strictly increasing")
        object.__setattr__(self, "alpha_grid", grid)
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass
class ReportRow:
    alpha: float
    params: dict
    fidelity: float = math.nan
    probability: float = math.nan
    converged: bool = True
    iterations: int = 0
    error: str = ""


@dataclass
class OptimizationReport:
    scheme: Scheme
    rows: list

    def column(self, name: str) -> np.ndarray:
        if name in ("alpha", "fidelity", "probability", "iterations"):
            return np.array([getattr(row, name) for row in self.rows], dtype=float)
        return np.array([row.params.get(name, math.nan) for row in self.rows], dtype=float)

    @property
    def failures(self) -> list:
        return [row for row in self.rows if not row.converged]


class _Counter:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, *args):
        self.calls += 1
        return self.f(*args)


def success_beta_zero(alpha: float):
    """Maximise the three-tap heralding probability at beta = 0 and x = r3^{beta=0}."""
    x, fid = an.f3_beta_zero_opt(alpha)

    def prob(T):
        T1, T2, T3 = T
        if not (0 < T1 < 1 and 0 < T2 < 1 and 0 < T3 < 1):
            return -np.inf
        r = x / (T1 * T2 * T3)
        if r >= 1.0:
            return -np.inf
        return an.success_probability(an.RealisticParams(r, T1, T2, T3))

    counted = _Counter(prob)
    # coarse scan over the feasible cube for a start point
    lo = x ** (1.0 / 3.0)
    axis = np.linspace(lo + 0.3 * (1 - lo), 0.995, 12)
    best = max(
        ((prob((a, b, c)), a, b, c) for a in axis for b in axis for c in axis),
        key=lambda t: t[0],
    )
    T, P = maximize_nd(counted, np.array(best[1:]), np.full(3, 0.01))
    T1, T2, T3 = (float(t) for t in T)
    params = {"x": x, "r": x / (T1 * T2 * T3), "T1": T1, "T2": T2, "T3": T3, "beta": 0.0}
    return params, fid, P, counted.calls


def _row(scheme: Scheme, alpha: float) -> ReportRow:
    try:
        if scheme is Scheme.ONE_PHOTON:
            r = an.r1_opt(alpha)
            return ReportRow(alpha, {"r": r}, an.f1(alpha, r))
        if scheme is Scheme.THREE_PHOTON:
            r = an.r3_opt(alpha)
            b2 = an.beta_opt_sq(alpha).real
            return ReportRow(alpha, {"r": r, "beta_sq": b2}, an.f3(alpha, r, b2))
        if scheme is Scheme.THREE_PHOTON_BETA_ZERO:
            r, fid = an.f3_beta_zero_opt(alpha)
            return ReportRow(alpha, {"r": r}, fid)
        if scheme in (Scheme.EVEN_ZERO, Scheme.EVEN_TWO):
            k = an.EvenScheme.ZERO if scheme is Scheme.EVEN_ZERO else an.EvenScheme.TWO
            params, fid = an.f_even_numeric(alpha, k)
            converged = params["r"] < 0.995 - 1e-6
            return ReportRow(alpha, params, fid, converged=converged,
                             error="" if converged else "optimum on the r bound")
        if scheme is Scheme.SUCCESS_BETA_ZERO:
            params, fid, P, calls = success_beta_zero(alpha)
            return ReportRow(alpha, params, fid, P, iterations=calls)
        if scheme is Scheme.SUCCESS_BETA:
            p = an.beta_chain(alpha)
            params = {"x": p.x, "r": p.r, "T1": p.T1, "T2": p.T2, "T3": p.T3,
                      "beta": p.beta.real, "beta_imag": p.beta.imag}
            return ReportRow(alpha, params, an.f3_realistic(alpha, p), an.success_probability(p))
    except SqueezeCatError as exc:
        return ReportRow(alpha, {}, converged=False, error=f"{type(exc).__name__}: {exc}")
    raise ValueError(f"unknown scheme {scheme}")


def _row_args(args):
    return _row(*args)


def sweep(spec: SweepSpec, max_workers: int | None = None) -> OptimizationReport:
    """One report row per alpha; failures are recorded in the row, never raised."""
    jobs = [(spec.scheme, a) for a in spec.alpha_grid]
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(_row_args, jobs))
    else:
        rows = [_row_args(j) for j in jobs]
    return OptimizationReport(spec.scheme, rows)


# --------------------------------------------------------------------------
# tolerance curves and the amplification comparison


@dataclass
class ToleranceCurve:
    alpha: float
    r_opt: float
    beta_opt: float
    f_max: float
    r_grid: np.ndarray
    f_vs_r: np.ndarray
    beta_grid: np.ndarray
    f_vs_beta: np.ndarray

    @property
    def beta_zero(self) -> float:
        """Real beta at which 3r + r^2 alpha^2 - beta^2 = 0 for r = r_opt."""
        r, a = self.r_opt, self.alpha
        return math.sqrt(3 * r + r * r * a * a)

    @property
    def r_zero(self) -> float:
        """Positive r at which 3r + r^2 alpha^2 = beta_opt^2."""
        a2 = self.alpha**2
        b2 = self.beta_opt**2
        return (math.sqrt(9 + 4 * a2 * b2) - 3) / (2 * a2)


def tolerance_curves(alpha_list=(1, 2, 3, 4, 5), n_points: int = 401) -> list:
    """F3 along r at beta = beta_opt, and along real beta in [0, 2 beta_opt] at r = r3."""
    curves = []
    for alpha in alpha_list:
        alpha = float(alpha)
        r3 = an.r3_opt(alpha)
        b2 = an.beta_opt_sq(alpha).real
        beta = math.sqrt(b2)
        r_grid = np.linspace(0.0, 0.999, n_points)
        beta_grid = np.linspace(0.0, 2.0 * beta, n_points)
        f_r = np.array([an.f3(alpha, r, b2) for r in r_grid])
        f_b = np.array([an.f3(alpha, r3, b * b) for b in beta_grid])
        curves.append(ToleranceCurve(alpha, r3, beta, an.f3(alpha, r3, b2),
                                     r_grid, f_r, beta_grid, f_b))
    return curves


def amplification_comparison(alpha_small: float) -> dict:
    """Single-tap heralding of a small cat: optimal T1 at x = r1_opt and its probability."""
    x = an.r1_opt(alpha_small)
    T1, P = maximize_1d(lambda T: an.success_probability_single(x / T, T),
                        Bracket(x * (1 + 1e-9), 1.0 - 1e-12, 1e-12))
    return {
        "alpha": float(alpha_small),
        "x": x,
        "T1": T1,
        "T1_closed_form": an.t1_opt(x),
        "r": x / T1,
        "fidelity": an.f1(alpha_small, x),
        "probability": P,
        "probability_fourfold": P**4,
    }
