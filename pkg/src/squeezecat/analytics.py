"""Closed-form cat fidelities, optimal settings and heralding probabilities.

Everything here is a plain function of scalars.  The three-tap formulas
assume the squeezed-vacuum input and, for nonzero displacement, the tie
``R3 = R2 / sqrt(T2)`` that removes the residual exponential in ``a``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import ConstraintViolated, DomainError, InvalidRegime, NoSolution

SQRT10 = math.sqrt(10.0)
TIE_TOL = 1e-12
T2_RATIO = 1e-3


class Branch(enum.Enum):
    """Sign in front of sqrt(10): PLUS is the global optimum, MINUS the second local maximum."""

    PLUS = 1
    MINUS = -1


def _check_r(r: float) -> None:
    if not 0.0 <= r < 1.0:
        raise DomainError(f"squeezing parameter must lie in [0, 1), got {r}")


def _check_alpha(alpha: complex) -> float:
    a = abs(alpha)
    if a == 0.0:
        raise DomainError("alpha = 0 is degenerate for the optimal-parameter formulas")
    return a


def _cat_envelope(alpha: complex, r: float) -> float:
    """(1-r^2)^{3/2} |alpha|^2 e^{r Re(alpha^2)} / sinh(|alpha|^2), overflow-safe."""
    alpha = complex(alpha)
    a2 = abs(alpha) ** 2
    # |a|^2 / sinh(|a|^2) = 2 |a|^2 e^{-|a|^2} / (1 - e^{-2|a|^2})
    log_ratio = math.log(2.0 * a2) - a2 - math.log(-math.expm1(-2.0 * a2))
    return (1.0 - r * r) ** 1.5 * math.exp(log_ratio + r * (alpha * alpha).real)


def f1(alpha: complex, r: float) -> float:
    """Odd-cat fidelity of the single-photon-subtracted squeezed vacuum."""
    _check_r(r)
    _check_alpha(alpha)
    return _cat_envelope(alpha, r)


def r1_opt(alpha: complex) -> float:
    a2 = _check_alpha(alpha) ** 2
    # (sqrt(9 + 4a^4) - 3) / (2a^2), rationalised to avoid cancellation at small a
    return 2.0 * a2 / (math.sqrt(9.0 + 4.0 * a2 * a2) + 3.0)


def f3(alpha: complex, r: float, beta_sq: complex) -> float:
    """Odd-cat fidelity after applying (a^2 - beta^2) a to the squeezed vacuum."""
    _check_r(r)
    _check_alpha(alpha)
    alpha = complex(alpha)
    b2 = complex(beta_sq)
    s = 1.0 - r * r
    num = (3 * r + r * r * alpha.conjugate() ** 2 - b2) * (3 * r + r * r * alpha**2 - b2.conjugate())
    den = (
        abs(b2) ** 2
        - 3.0 * 2.0 * b2.real * r / s
        + 9.0 * r * r / s
        + 15.0 * r**4 / (s * s)
    )
    if den == 0.0:
        # only at r = 0, beta = 0 where the state a^3|0> vanishes
        raise DomainError("f3 is undefined for r = 0 and beta = 0")
    return num.real / den * _cat_envelope(alpha, r)


def _c(branch: Branch) -> float:
    return 5.0 + Branch(branch).value * SQRT10


def r3_opt(alpha: complex, branch: Branch = Branch.PLUS) -> float:
    a2 = _check_alpha(alpha) ** 2
    c = _c(branch)
    return 2.0 * a2 / (math.sqrt(c * c + 4.0 * a2 * a2) + c)


def beta_opt_sq(alpha: complex, branch: Branch = Branch.PLUS) -> complex:
    a2 = _check_alpha(alpha) ** 2
    return complex(3.0 * a2 / (7.0 + 2.0 * Branch(branch).value * SQRT10))


def f3_beta_zero_opt(alpha: complex) -> tuple[float, float]:
    """Best squeezing and fidelity for (a^3)|sq> against the odd cat of ``alpha``."""
    from .optimize import Bracket, maximize_1d

    a = _check_alpha(alpha)
    r, fr = maximize_1d(lambda r: f3(a, r, 0.0), Bracket(1e-9, 0.999, 1e-12))
    return r, fr


def lossy_cat_overlap(alpha: complex, R: float) -> float:
    """Overlap of an odd cat with itself after a beam splitter of reflectivity R."""
    if not 0.0 <= R < 1.0:
        raise DomainError(f"reflectivity must lie in [0, 1), got {R}")
    a2 = abs(alpha) ** 2
    if a2 == 0.0:
        raise DomainError("alpha = 0 has no odd cat")
    t = math.sqrt(1.0 - R)
    # cosh(R a2) sinh^2(t a2) / sinh^2(a2) in log form to survive large a2
    log_val = (
        math.log(0.5 * (1.0 + math.exp(-2.0 * R * a2))) + R * a2
        + 2.0 * (t * a2 + math.log(-math.expm1(-2.0 * t * a2)))
        - 2.0 * (a2 + math.log(-math.expm1(-2.0 * a2)))
    )
    return math.exp(log_val)


@dataclass(frozen=True)
class RealisticParams:
    """Squeezing, the three tap transmissivities and the displacement amplitude."""

    r: float
    T1: float
    T2: float
    T3: float
    beta: complex = 0.0

    def __post_init__(self):
        _check_r(self.r)
        for name in ("T1", "T2", "T3"):
            val = getattr(self, name)
            if not 0.0 < val <= 1.0:
                raise DomainError(f"{name} must lie in (0, 1], got {val}")
        object.__setattr__(self, "beta", complex(self.beta))

    @property
    def x(self) -> float:
        return self.r * self.T1 * self.T2 * self.T3

    @property
    def R1(self) -> float:
        return 1.0 - self.T1

    @property
    def R2(self) -> float:
        return 1.0 - self.T2

    @property
    def R3(self) -> float:
        return 1.0 - self.T3

    @property
    def effective_beta_sq(self) -> complex:
        """t2 t3^2 beta^2, the amplitude that plays the role of beta^2 in f3."""
        return math.sqrt(self.T2) * self.T3 * self.beta**2

    def tie_residual(self) -> float:
        return abs(self.R3 - self.R2 / math.sqrt(self.T2))

    @classmethod
    def tied(cls, r: float, T1: float, T2: float, beta: complex = 0.0) -> "RealisticParams":
        """Build parameters with T3 fixed by R3 = R2 / sqrt(T2)."""
        T3 = 1.0 - (1.0 - T2) / math.sqrt(T2)
        if not 0.0 < T3 <= 1.0:
            raise InvalidRegime(f"T2={T2} leaves no valid T3 under the reflectivity tie")
        return cls(r, T1, T2, T3, beta)


def _require_tie(p: RealisticParams) -> None:
    if p.beta != 0 and p.tie_residual() > TIE_TOL:
        raise ConstraintViolated(
            f"R3 = R2/sqrt(T2) violated by {p.tie_residual():.3e}; "
            "the closed forms only hold on the tied family when beta != 0"
        )


def _realistic_terms(p: RealisticParams):
    x = p.x
    if not x < 1.0:
        raise InvalidRegime(f"x = r T1 T2 T3 = {x} must be below 1")
    s = 1.0 - x * x
    B = p.effective_beta_sq
    t2 = math.sqrt(p.T2)
    extra = (t2 - 1.0) ** 2 * p.T3 * abs(p.beta) ** 2
    return x, s, B, extra


def f3_realistic(alpha: complex, p: RealisticParams) -> float:
    """Odd-cat fidelity of the three-tap circuit with exactly-one-photon triggers."""
    _check_alpha(alpha)
    _require_tie(p)
    x, s, B, extra = _realistic_terms(p)
    alpha = complex(alpha)
    num = (3 * x + x * x * alpha.conjugate() ** 2 - B) * (3 * x + x * x * alpha**2 - B.conjugate())
    den = (
        abs(B) ** 2
        - 2.0 * B.real * 3.0 * x / s
        + extra * (1.0 + 2.0 * x * x) / s
        + 9.0 * x * x / s
        + 15.0 * x**4 / (s * s)
    )
    return num.real / den * _cat_envelope(alpha, x)


def success_probability(p: RealisticParams) -> float:
    """Joint probability that all three triggers see exactly one photon.

    The Gaussian weight from the two displaced triggers is
    ``exp(-(R2 + R3)|beta|^2)``: each trigger is a coherent amplitude
    ``i sqrt(R) beta`` projected on one photon.
    """
    _require_tie(p)
    x, s, B, extra = _realistic_terms(p)
    r = p.r
    pref = (p.R1 * p.R2 * p.R3) / (p.T1 * p.T2**2 * p.T3**3)
    gauss = math.exp(-(p.R2 + p.R3) * abs(p.beta) ** 2)
    bracket = (
        abs(B) ** 2 * x * x / s
        + extra * x * x * (1.0 + 2.0 * x * x) / (s * s)
        - 2.0 * B.real * 3.0 * x**3 / (s * s)
        + 3.0 * x**4 * (3.0 + 2.0 * x * x) / s**3
    )
    return pref * gauss * math.sqrt((1.0 - r * r) / s) * bracket


def success_probability_single(r: float, T1: float) -> float:
    """Probability that a single tap of transmissivity T1 sees exactly one photon."""
    _check_r(r)
    if not 0.0 < T1 <= 1.0:
        raise DomainError(f"T1 must lie in (0, 1], got {T1}")
    x = r * T1
    s = 1.0 - x * x
    return (1.0 - T1) / T1 * math.sqrt((1.0 - r * r) / s) * x * x / s


def t1_opt(x: float, T2: float = 1.0, T3: float = 1.0) -> float:
    """T1 maximising the success probability at fixed x, T2 and T3."""
    if not 0.0 < x < 1.0:
        raise InvalidRegime(f"x must lie in (0, 1), got {x}")
    q = (T2 * T3) ** 2
    # (sqrt(x^4 + 8 q x^2) - x^2) / (2q), rationalised
    T1 = 4.0 * x * x / (math.sqrt(x**4 + 8.0 * q * x * x) + x * x)
    if not 0.0 < T1 < 1.0 or x / (T1 * T2 * T3) >= 1.0:
        raise InvalidRegime(f"optimal T1={T1} gives r={x / (T1 * T2 * T3)} outside [0, 1)")
    return T1


def _t2_terms(x: float, B: complex):
    s = 1.0 - x * x
    rest = abs(B) ** 2 - 2.0 * B.real * 3.0 * x / s + 9.0 * x * x / s + 15.0 * x**4 / (s * s)
    scale = abs(B) * (1.0 + 2.0 * x * x) / s
    return rest, scale


def t2_extra_ratio(x: float, T2: float, beta_target_sq: complex) -> float:
    """Extra denominator term over the sum of the others, on the tied family."""
    rest, scale = _t2_terms(x, complex(beta_target_sq))
    t2 = math.sqrt(T2)
    return (t2 - 1.0) ** 2 / t2 * scale / rest


def choose_t2(alpha: complex, x: float, beta_target_sq: complex) -> tuple[float, float, complex]:
    """Pick T2 so the extra denominator term is 1e-3 of the rest; tie T3; rescale beta.

    Returns ``(T2, T3, beta)`` with ``sqrt(T2) T3 beta^2 = beta_target_sq``.
    """
    _check_alpha(alpha)
    if not 0.0 < x < 1.0:
        raise InvalidRegime(f"x must lie in (0, 1), got {x}")
    B = complex(beta_target_sq)
    if B == 0:
        raise NoSolution("with beta = 0 the extra term vanishes for every T2")
    rest, scale = _t2_terms(x, B)
    target = T2_RATIO * rest

    def excess(t2):
        return (t2 - 1.0) ** 2 / t2 * scale - target

    # excess -> +inf as t2 -> 0 and equals -target < 0 at t2 = 1
    lo = 1e-12
    if excess(lo) <= 0.0:
        raise NoSolution("1e-3 ratio cannot be reached for T2 in (0, 1)")
    t2 = bisect(excess, lo, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    T2 = t2 * t2
    T3 = 1.0 - (1.0 - T2) / t2
    if not 0.0 < T3 < 1.0:
        raise NoSolution(f"T2={T2} leaves no valid T3 under the reflectivity tie")
    beta = np.sqrt(B / (t2 * T3))
    return T2, T3, complex(beta)


def beta_chain(alpha: complex, branch: Branch = Branch.PLUS) -> RealisticParams:
    """Full parameter selection for the displaced three-tap circuit.

    x and t2 t3^2 beta^2 are set to the ideal optimum, T2 by the 1e-3 rule,
    T3 by the reflectivity tie, and T1 to maximise the success probability.
    With all three rules active no free parameter remains.
    """
    a = _check_alpha(alpha)
    x = r3_opt(a, branch)
    T2, T3, beta = choose_t2(a, x, beta_opt_sq(a, branch))
    T1 = t1_opt(x, T2, T3)
    return RealisticParams(x / (T1 * T2 * T3), T1, T2, T3, beta)


class EvenScheme(enum.Enum):
    ZERO = 0
    TWO = 2


def f_even_numeric(alpha: complex, k: EvenScheme = EvenScheme.ZERO):
    """Maximal even-cat fidelity of sq (k=0) or (a^2 - beta^2)|sq> (k=2), numerically.

    Returns ``(params, fidelity)`` where params holds ``r`` and, for k=2,
    ``beta_sq`` (real; alpha is taken real and positive).
    """
    from .fock import Parity, _squeezed_log_weights, cat_state, default_cutoff
    from .optimize import Bracket, maximize_1d, maximize_nd

    a = _check_alpha(alpha)
    k = EvenScheme(k)
    r_max = 0.995
    # the target has no weight above the cat cutoff, so overlaps are exact
    # there; norms use the Gaussian moments <n> = r^2/(1-r^2), <a^2> = r/(1-r^2)
    n_max = default_cutoff(0.0, a)
    target = cat_state(a, Parity.EVEN, n_max).amplitudes
    n_pairs = n_max // 2 + 1
    t_even = target[0::2]

    def sq_coeffs(r, pairs):
        if r == 0.0:
            c = np.zeros(pairs)
            c[0] = 1.0
            return c
        return (1.0 - r * r) ** 0.25 * np.exp(0.5 * _squeezed_log_weights(r, pairs))

    if k is EvenScheme.ZERO:
        def objective(r):
            return abs(np.dot(t_even.conj(), sq_coeffs(r, n_pairs))) ** 2

        r, fr = maximize_1d(objective, Bracket(0.0, r_max, 1e-12))
        return {"r": r}, fr

    m = np.arange(1, n_pairs + 1)
    # a^2 |2m> = sqrt(2m (2m-1)) |2m-2>
    lower = np.sqrt(2.0 * m * (2.0 * m - 1.0))

    def objective2(v):
        r, b2 = v
        if not 0.0 <= r < r_max:
            return -np.inf
        c = sq_coeffs(r, n_pairs + 1)
        w = lower * c[1:] - b2 * c[:-1]
        nbar = r * r / (1.0 - r * r)
        pair = r / (1.0 - r * r)
        nn = 2.0 * nbar * nbar + pair * pair - 2.0 * b2 * pair + b2 * b2
        if nn < 1e-300:
            return -np.inf
        return abs(np.dot(t_even.conj(), w)) ** 2 / nn

    # coarse scan picks the basin, simplex polishes
    best = None
    for r0 in np.linspace(0.02, r_max - 0.02, 24):
        for b0 in np.linspace(-1.0, 1.5, 26) * a * a:
            val = objective2((r0, b0))
            if best is None or val > best[0]:
                best = (val, r0, b0)
    x, fx = maximize_nd(objective2, np.array(best[1:]), np.array([0.05, 0.1 * a * a + 0.05]))
    return {"r": float(x[0]), "beta_sq": float(x[1])}, fx
