"""Truncated single-mode Fock space: states, bosonic operators and overlaps.

A state on the truncated basis ``|0>, ..., |n_max>`` is a complex amplitude
vector of length ``n_max + 1``.  Conditional (post-selected) states are kept
unnormalised; their squared norm is the branch probability.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal, expm
from scipy.special import gammaln

from .errors import DomainError, TailTooLarge, ZeroNorm

SQUEEZE_TAIL_BUDGET = 1e-12
CAT_TAIL_BUDGET = 1e-12
DISPLACE_LEAK_BUDGET = 1e-10
CUTOFF_TAIL_TARGET = 1e-14
ZERO_NORM = 1e-30


class Parity(enum.Enum):
    ODD = "odd"
    EVEN = "even"


class DetectorModel(enum.Enum):
    """Trigger detector: exactly-one-photon projector, or on/off click detector."""

    NR1 = "nr1"
    APD = "apd"


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _check_cutoff(n_max) -> int:
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")
    return int(n_max)


@dataclass(frozen=True)
class PureState:
    """Amplitudes over ``|0>..|n_max>``; ``norm_sq`` is cached on construction."""

    amplitudes: np.ndarray
    norm_sq: float = field(init=False, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        _check_cutoff(amps.size - 1)
        object.__setattr__(self, "amplitudes", _readonly(amps))
        object.__setattr__(self, "norm_sq", float(np.vdot(amps, amps).real))

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @classmethod
    def fock(cls, n: int, n_max: int) -> "PureState":
        amps = np.zeros(_check_cutoff(n_max) + 1, dtype=complex)
        amps[n] = 1.0
        return cls(amps)

    @classmethod
    def vacuum(cls, n_max: int = 1) -> "PureState":
        return cls.fock(0, n_max)

    def padded(self, n_max: int) -> "PureState":
        """Zero-pad to a larger cutoff (no-op when already that size)."""
        if n_max < self.n_max:
            raise ValueError("padded() cannot shrink a state; use truncated()")
        if n_max == self.n_max:
            return self
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[: self.n_max + 1] = self.amplitudes
        return PureState(amps)

    def truncated(self, n_max: int, budget: float = 0.0) -> "PureState":
        """Drop levels above ``n_max``; refuse if they carry more than ``budget``."""
        dropped = self.amplitudes[n_max + 1 :]
        lost = float(np.vdot(dropped, dropped).real)
        if lost > budget:
            raise TailTooLarge(f"truncation to n_max={n_max} discards {lost:.3e}")
        return PureState(self.amplitudes[: n_max + 1])

    def normalized(self) -> "PureState":
        if self.norm_sq < ZERO_NORM:
            raise ZeroNorm("cannot normalise a null state")
        return PureState(self.amplitudes / math.sqrt(self.norm_sq))

    def to_density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    trace: float = field(init=False, repr=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        _check_cutoff(mat.shape[0] - 1)
        object.__setattr__(self, "matrix", _readonly(mat))
        object.__setattr__(self, "trace", float(np.trace(mat).real))

    @property
    def n_max(self) -> int:
        return self.matrix.shape[0] - 1

    def padded(self, n_max: int) -> "DensityOperator":
        if n_max < self.n_max:
            raise ValueError("padded() cannot shrink an operator")
        if n_max == self.n_max:
            return self
        mat = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        mat[: self.n_max + 1, : self.n_max + 1] = self.matrix
        return DensityOperator(mat)

    def normalized(self) -> "DensityOperator":
        if self.trace < ZERO_NORM:
            raise ZeroNorm("cannot normalise a null operator")
        return DensityOperator(self.matrix / self.trace)


@dataclass(frozen=True)
class TwoModeState:
    """Joint amplitudes indexed ``[n_a, n_b]``."""

    amplitudes: np.ndarray
    norm_sq: float = field(init=False, repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2:
            raise ValueError("two-mode amplitudes must be a matrix")
        object.__setattr__(self, "amplitudes", _readonly(amps))
        object.__setattr__(self, "norm_sq", float(np.vdot(amps, amps).real))

    @property
    def n_max_a(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def n_max_b(self) -> int:
        return self.amplitudes.shape[1] - 1

    def reduced_a(self) -> DensityOperator:
        """Partial trace over mode b."""
        m = self.amplitudes
        return DensityOperator(m @ m.conj().T)


# --------------------------------------------------------------------------
# cutoff policy


def _squeezed_log_weights(r: float, n_pairs: int) -> np.ndarray:
    """log |c_{2n}|^2 for n = 0..n_pairs-1, without the (1-r^2)^{1/2} prefactor."""
    n = np.arange(n_pairs)
    return gammaln(2 * n + 1) - 2 * n * math.log(2.0) - 2 * gammaln(n + 1) + 2 * n * math.log(r)


def squeezed_vacuum_tail(r: float, n_max: int) -> float:
    """Probability carried by Fock levels above ``n_max`` in the squeezed vacuum."""
    if r == 0.0:
        return 0.0
    first = n_max // 2 + 1
    # terms fall faster than r^(2n); stop once the remainder is far below any budget
    last = first + int(math.ceil(80.0 / -math.log(r * r))) + 1
    logw = _squeezed_log_weights(r, last)[first:]
    return float(math.sqrt(1.0 - r * r) * np.exp(logw).sum())


def squeezed_cutoff(r: float, target: float = CUTOFF_TAIL_TARGET, moment: int = 3) -> int:
    """Smallest even n_max whose squeezed-vacuum tail is below ``target``.

    The tail is measured relative to the n^moment-weighted distribution, so
    the bound still holds after ``moment`` photons have been subtracted.
    """
    if r == 0.0:
        return 0
    n_pairs = int(math.ceil(80.0 / -math.log(r * r))) + 2
    n = 2.0 * np.arange(n_pairs)
    w = np.exp(_squeezed_log_weights(r, n_pairs)) * np.maximum(n, 1.0) ** moment
    w /= w.sum()
    # tails[m] = weight in pairs m+1, m+2, ... i.e. above n_max = 2m
    tails = np.cumsum(w[::-1])[::-1][1:]
    m = int(np.argmax(tails < target))
    return max(2 * m, 2)


def default_cutoff(r: float = 0.0, alpha: complex = 0.0) -> int:
    """Cutoff large enough for squeezed vacuum of ``r`` and cats of ``alpha``."""
    a = abs(alpha)
    n_cat = math.ceil(a * a + 8 * a + 20)
    return max(40, squeezed_cutoff(r), n_cat)


def displacement_padding(beta: complex) -> int:
    b = abs(beta)
    return math.ceil(4 * b * b + 8 * b + 10)


# --------------------------------------------------------------------------
# state constructors


def squeezed_vacuum(r: float, n_max: int | None = None) -> PureState:
    """Single-mode squeezed vacuum with real squeezing parameter ``0 <= r < 1``."""
    if not 0.0 <= r < 1.0:
        raise DomainError(f"squeezing parameter must lie in [0, 1), got {r}")
    if n_max is None:
        n_max = default_cutoff(r)
    n_max = _check_cutoff(n_max)
    amps = np.zeros(n_max + 1, dtype=complex)
    if r == 0.0:
        amps[0] = 1.0
        return PureState(amps)
    tail = squeezed_vacuum_tail(r, n_max)
    if tail >= SQUEEZE_TAIL_BUDGET:
        raise TailTooLarge(
            f"squeezed vacuum r={r} loses {tail:.3e} above n_max={n_max}; raise the cutoff"
        )
    n_pairs = n_max // 2 + 1
    logw = _squeezed_log_weights(r, n_pairs)
    amps[0::2] = (1.0 - r * r) ** 0.25 * np.exp(0.5 * logw)
    return PureState(amps / np.linalg.norm(amps))


def coherent_amplitudes(alpha: complex, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    a = abs(alpha)
    if a == 0.0:
        out = np.zeros(n_max + 1, dtype=complex)
        out[0] = 1.0
        return out
    mag = np.exp(n * math.log(a) - 0.5 * gammaln(n + 1) - 0.5 * a * a)
    return mag * np.exp(1j * n * np.angle(alpha))


def coherent_state(alpha: complex, n_max: int | None = None) -> PureState:
    if n_max is None:
        n_max = default_cutoff(alpha=alpha)
    amps = coherent_amplitudes(alpha, _check_cutoff(n_max))
    lost = 1.0 - float(np.vdot(amps, amps).real)
    if lost >= CAT_TAIL_BUDGET:
        raise TailTooLarge(f"coherent state |{alpha}> loses {lost:.3e} above n_max={n_max}")
    return PureState(amps).normalized()


def cat_state(alpha: complex, parity: Parity = Parity.ODD, n_max: int | None = None) -> PureState:
    """Normalised ``|alpha> +- |-alpha>``; odd parity takes the minus sign."""
    parity = Parity(parity)
    a2 = abs(alpha) ** 2
    if parity is Parity.ODD and a2 == 0.0:
        raise DomainError("the odd cat state is undefined at alpha = 0")
    if n_max is None:
        n_max = default_cutoff(alpha=alpha)
    n_max = _check_cutoff(n_max)
    coh = coherent_amplitudes(alpha, n_max)
    amps = np.zeros(n_max + 1, dtype=complex)
    start = 1 if parity is Parity.ODD else 0
    amps[start::2] = 2.0 * coh[start::2]
    # 2(1 - e^{-2|a|^2}) via expm1 so tiny odd cats keep full precision
    norm2 = -2.0 * math.expm1(-2.0 * a2) if parity is Parity.ODD else 2.0 + 2.0 * math.exp(-2.0 * a2)
    amps /= math.sqrt(norm2)
    lost = 1.0 - float(np.vdot(amps, amps).real)
    if lost >= CAT_TAIL_BUDGET:
        raise TailTooLarge(f"cat state alpha={alpha} loses {lost:.3e} above n_max={n_max}")
    return PureState(amps).normalized()


# --------------------------------------------------------------------------
# operators


def annihilation_matrix(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def annihilate(state: PureState) -> PureState:
    """Apply ``a`` without renormalising; the result's norm_sq is <n> of the input."""
    out = np.zeros_like(state.amplitudes)
    out[:-1] = np.sqrt(np.arange(1, state.n_max + 1)) * state.amplitudes[1:]
    return PureState(out)


@functools.lru_cache(maxsize=256)
def _displacement_full(beta: complex, size: int) -> np.ndarray:
    a = annihilation_matrix(size - 1)
    gen = beta * a.T - np.conj(beta) * a
    return _readonly(expm(gen))


def displacement_matrix(beta: complex, n_max: int, pad: int | None = None) -> np.ndarray:
    """Matrix elements <m|D(beta)|n> for m, n <= n_max.

    Computed as the exponential of the generator on a padded basis, so the
    returned block matches the untruncated operator, not the exponential of
    the truncated generator.
    """
    beta = complex(beta)
    if beta == 0:
        return np.eye(n_max + 1, dtype=complex)
    if pad is None:
        pad = displacement_padding(beta)
    return _displacement_full(beta, n_max + 1 + pad)[: n_max + 1, : n_max + 1]


def displace(state: PureState, beta: complex) -> PureState:
    beta = complex(beta)
    if beta == 0:
        return state
    n = state.n_max
    size = n + 1 + displacement_padding(beta)
    out = _displacement_full(beta, size)[:, : n + 1] @ state.amplitudes
    leak = float(np.vdot(out[n + 1 :], out[n + 1 :]).real)
    if leak >= DISPLACE_LEAK_BUDGET * max(state.norm_sq, ZERO_NORM):
        raise TailTooLarge(
            f"displacement by {beta} pushes {leak:.3e} above n_max={n}; raise the cutoff"
        )
    return PureState(out[: n + 1])


@functools.lru_cache(maxsize=4096)
def _number_block(total: int):
    """Eigen-decomposition of (a^dag b + a b^dag) on the block n_a + n_b = total.

    The block basis is ordered by n_a = 0..total.  The generator is real
    symmetric tridiagonal, so U = V exp(i theta Lambda) V^T.
    """
    if total == 0:
        return np.zeros(1), np.ones((1, 1))
    k = np.arange(total)
    off = np.sqrt((k + 1.0) * (total - k))
    w, v = eigh_tridiagonal(np.zeros(total + 1), off)
    return _readonly(w), _readonly(v)


def beam_splitter_angle(transmissivity: float) -> float:
    if not 0.0 < transmissivity <= 1.0:
        raise DomainError(f"transmissivity must lie in (0, 1], got {transmissivity}")
    return math.atan(math.sqrt((1.0 - transmissivity) / transmissivity))


def beam_splitter(state_a: PureState, state_b: PureState, transmissivity: float) -> TwoModeState:
    """Mix two modes with ``exp(i theta (a^dag b + a b^dag))``, ``cos(theta) = sqrt(T)``.

    The output is not truncated: both axes run to ``n_max_a + n_max_b`` so the
    result is exact on every occupied photon-number block.
    """
    theta = beam_splitter_angle(transmissivity)
    na, nb = state_a.n_max, state_b.n_max
    joint = np.outer(state_a.amplitudes, state_b.amplitudes)
    ntot = na + nb
    out = np.zeros((ntot + 1, ntot + 1), dtype=complex)
    for total in range(ntot + 1):
        ks = np.arange(max(0, total - nb), min(total, na) + 1)
        v = joint[ks, total - ks]
        if not v.any():
            continue
        w, vecs = _number_block(total)
        block = vecs @ (np.exp(1j * theta * w) * (vecs[ks].T @ v))
        kk = np.arange(total + 1)
        out[kk, total - kk] = block
    return TwoModeState(out)


def project_trigger(joint: TwoModeState, count: int, displace_trigger: complex = 0.0) -> PureState:
    """Unnormalised ``<count|_b D_b(gamma) |joint>`` as a state of mode a."""
    row = displacement_matrix(displace_trigger, max(joint.n_max_b, count))[count, : joint.n_max_b + 1]
    return PureState(joint.amplitudes @ row)


def condition_on_detection(
    joint: TwoModeState,
    detector: DetectorModel,
    displace_trigger: complex = 0.0,
):
    """Condition mode a on a detection event in mode b after displacing b.

    Returns ``(state, probability)``.  For ``NR1`` the state is the
    unnormalised pure projection onto one trigger photon.  For ``APD`` it is
    the unnormalised density operator summed over every nonzero count, formed
    as (partial trace) - (no-click branch) since the displacement is unitary.
    """
    detector = DetectorModel(detector)
    if detector is DetectorModel.NR1:
        psi = project_trigger(joint, 1, displace_trigger)
        return psi, psi.norm_sq
    psi0 = project_trigger(joint, 0, displace_trigger).amplitudes
    m = joint.amplitudes
    rho = DensityOperator(m @ m.conj().T - np.outer(psi0, psi0.conj()))
    return rho, max(rho.trace, 0.0)


# --------------------------------------------------------------------------
# overlaps


def _common(u: np.ndarray, v: np.ndarray):
    n = max(u.shape[0], v.shape[0])
    if u.shape[0] < n:
        u = np.concatenate([u, np.zeros(n - u.shape[0], dtype=complex)])
    if v.shape[0] < n:
        v = np.concatenate([v, np.zeros(n - v.shape[0], dtype=complex)])
    return u, v


def fidelity(a: PureState, b: PureState) -> float:
    """Normalised squared overlap ``|<a|b>|^2 / (|a|^2 |b|^2)``."""
    if a.norm_sq < ZERO_NORM or b.norm_sq < ZERO_NORM:
        raise ZeroNorm("fidelity of a null state")
    u, v = _common(a.amplitudes, b.amplitudes)
    return abs(np.vdot(u, v)) ** 2 / (a.norm_sq * b.norm_sq)


def fidelity_mixed(rho: DensityOperator, b: PureState) -> float:
    """``<b|rho|b> / (tr(rho) |b|^2)``."""
    if rho.trace < ZERO_NORM or b.norm_sq < ZERO_NORM:
        raise ZeroNorm("fidelity of a null state")
    n = max(rho.n_max, b.n_max)
    mat = rho.padded(n).matrix
    v = b.padded(n).amplitudes
    return float(np.vdot(v, mat @ v).real) / (rho.trace * b.norm_sq)
