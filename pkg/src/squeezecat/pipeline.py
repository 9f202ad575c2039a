"""Numerical simulation of the heralded cat-breeding circuit.

Each stage taps the signal on a beam splitter, displaces the tapped mode and
conditions on the trigger detector.  Signal states stay unnormalised so the
running squared norm (or trace) is the joint heralding probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .analytics import RealisticParams
from .errors import ZeroProbability
from .fock import (
    DensityOperator,
    DetectorModel,
    PureState,
    annihilation_matrix,
    beam_splitter,
    coherent_state,
    condition_on_detection,
    default_cutoff,
    displacement_matrix,
    displacement_padding,
    squeezed_vacuum,
)

ZERO_PROBABILITY = 1e-300
EIG_FLOOR = 1e-18


@dataclass(frozen=True)
class CircuitStage:
    transmissivity: float
    trigger_displacement: complex = 0.0
    detector: DetectorModel = DetectorModel.NR1

    def __post_init__(self):
        if not 0.0 < self.transmissivity < 1.0:
            raise ValueError(f"stage transmissivity must lie in (0, 1), got {self.transmissivity}")
        object.__setattr__(self, "trigger_displacement", complex(self.trigger_displacement))
        object.__setattr__(self, "detector", DetectorModel(self.detector))


@dataclass(frozen=True)
class CircuitSpec:
    r: float
    stages: tuple
    n_max: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.r < 1.0:
            raise ValueError(f"squeezing must lie in [0, 1), got {self.r}")
        stages = tuple(self.stages)
        if not 1 <= len(stages) <= 3:
            raise ValueError("a circuit has between one and three stages")
        object.__setattr__(self, "stages", stages)

    @property
    def cutoff(self) -> int:
        return self.n_max if self.n_max is not None else default_cutoff(self.r)


@dataclass
class RunResult:
    output: PureState | DensityOperator
    probability: float
    per_stage_probabilities: list = field(default_factory=list)
    n_max: int = 0

    def normalized_output(self):
        return self.output.normalized()


def three_tap_stages(T1, T2, T3, beta=0.0, detector=DetectorModel.NR1) -> tuple:
    """Bare tap, then taps displaced by +i sqrt(R2) beta and -i sqrt(R3) beta."""
    beta = complex(beta)
    return (
        CircuitStage(T1, 0.0, detector),
        CircuitStage(T2, 1j * math.sqrt(1.0 - T2) * beta, detector),
        CircuitStage(T3, -1j * math.sqrt(1.0 - T3) * beta, detector),
    )


def three_tap_circuit(p: RealisticParams, detector=DetectorModel.NR1, n_max=None) -> CircuitSpec:
    return CircuitSpec(p.r, three_tap_stages(p.T1, p.T2, p.T3, p.beta, detector), n_max)


# --------------------------------------------------------------------------
# single-stage maps


def _tap_pure(psi: PureState, stage: CircuitStage):
    n = psi.n_max
    joint = beam_splitter(psi, PureState.vacuum(1), stage.transmissivity)
    out, prob = condition_on_detection(joint, stage.detector, stage.trigger_displacement)
    # the vacuum ancilla adds no photons, so levels above n are exactly empty
    if isinstance(out, PureState):
        return out.truncated(n), prob
    return DensityOperator(out.matrix[: n + 1, : n + 1]), prob


def _components(rho: DensityOperator):
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > EIG_FLOOR * max(w.max(), 0.0)
    return [PureState(math.sqrt(wi) * v[:, i]) for i, wi in zip(np.flatnonzero(keep), w[keep])]


def _tap_mixed(rho: DensityOperator, stage: CircuitStage):
    n = rho.n_max
    acc = np.zeros((n + 1, n + 1), dtype=complex)
    for comp in _components(rho):
        out, _ = _tap_pure(comp, stage)
        mat = out.to_density().matrix if isinstance(out, PureState) else out.matrix
        acc += mat
    out = DensityOperator(acc)
    return out, max(out.trace, 0.0)


def apply_stage(state, stage: CircuitStage):
    """Apply one tap to a pure or mixed signal; returns ``(new_state, weight)``."""
    if isinstance(state, PureState):
        return _tap_pure(state, stage)
    return _tap_mixed(state, stage)


def kraus_subtract(rho, R: float, beta: complex = 0.0, detector=DetectorModel.NR1):
    """Photon subtraction through a tap of reflectivity ``R`` displaced by ``i sqrt(R) beta``.

    To first order in R the unnormalised output is ``R (a + beta) rho (a^dag + beta^*)``.
    """
    if not 0.0 < R < 1.0:
        raise ValueError(f"reflectivity must lie in (0, 1), got {R}")
    if isinstance(rho, PureState):
        rho = rho.to_density()
    stage = CircuitStage(1.0 - R, 1j * math.sqrt(R) * complex(beta), detector)
    return _tap_mixed(rho, stage)


def outcome_probabilities(state, R: float, beta: complex = 0.0, max_count: int | None = None):
    """Probabilities of 0, 1, ..., max_count trigger photons by explicit projection."""
    if isinstance(state, DensityOperator):
        comps = _components(state)
    else:
        comps = [state]
    n = comps[0].n_max
    max_count = n + 1 if max_count is None else max_count
    gamma = 1j * math.sqrt(R) * complex(beta)
    probs = np.zeros(max_count + 1)
    for comp in comps:
        joint = beam_splitter(comp, PureState.vacuum(1), 1.0 - R)
        size = max(joint.n_max_b, max_count) + displacement_padding(gamma)
        dm = displacement_matrix(gamma, size)[: max_count + 1, : joint.n_max_b + 1]
        amps = joint.amplitudes @ dm.T
        probs += np.sum(np.abs(amps) ** 2, axis=0)
    return probs


def loss_channel(state, R: float) -> DensityOperator:
    """Mix with vacuum at reflectivity R and trace out the reflected mode."""
    comps = _components(state) if isinstance(state, DensityOperator) else [state]
    n = comps[0].n_max
    acc = np.zeros((n + 1, n + 1), dtype=complex)
    for comp in comps:
        joint = beam_splitter(comp, PureState.vacuum(1), 1.0 - R)
        acc += joint.reduced_a().matrix[: n + 1, : n + 1]
    return DensityOperator(acc)


# --------------------------------------------------------------------------
# full circuit


def run_circuit(spec: CircuitSpec) -> RunResult:
    """Herald on every stage in order, starting from the squeezed vacuum.

    The signal stays a vector until the first click-detector stage, after
    which it is carried as a density operator.
    """
    n = spec.cutoff
    state = squeezed_vacuum(spec.r, n)
    weight = state.norm_sq
    per_stage = []
    for stage in spec.stages:
        state, new_weight = apply_stage(state, stage)
        if new_weight < ZERO_PROBABILITY:
            raise ZeroProbability(f"stage {len(per_stage) + 1} heralds with probability {new_weight:.3e}")
        per_stage.append(new_weight / weight)
        weight = new_weight
    return RunResult(state, weight, per_stage, n)


def run_circuit_apd(spec: CircuitSpec) -> RunResult:
    if not any(stage.detector is DetectorModel.APD for stage in spec.stages):
        raise ValueError("run_circuit_apd expects click-detector stages")
    return run_circuit(spec)


def closed_form_output(p: RealisticParams, n_max: int | None = None) -> PureState:
    """The three-tap conditional state written as one operator acting on |sq(r)>.

    With r_i = sqrt(R_i), t_i = sqrt(T_i), and Gaussian weight
    exp(-(R2 + R3)|beta|^2 / 2) from the displaced triggers,

        -i r1 r2 r3 / (t1 t2^2 t3^3) exp((R3 - R2/t2) beta^* a / t3)
            (a^2 - t2 t3^2 beta^2 + (t2 - 1) t3 beta a) a (t1 t2 t3)^{n}.
    """
    n = default_cutoff(p.r) if n_max is None else n_max
    sq = squeezed_vacuum(p.r, n).amplitudes
    t1, t2, t3 = math.sqrt(p.T1), math.sqrt(p.T2), math.sqrt(p.T3)
    r1, r2, r3 = math.sqrt(p.R1), math.sqrt(p.R2), math.sqrt(p.R3)
    beta = p.beta
    a = annihilation_matrix(n)
    v = (t1 * t2 * t3) ** np.arange(n + 1) * sq
    v = a @ v
    v = a @ (a @ v) - t2 * t3**2 * beta**2 * v + (t2 - 1.0) * t3 * beta * (a @ v)
    c = (p.R3 - p.R2 / t2) * np.conj(beta) / t3
    if c != 0:
        v = expm(c * a) @ v
    pref = -1j * r1 * r2 * r3 / (t1 * t2**2 * t3**3) * math.exp(-0.5 * (p.R2 + p.R3) * abs(beta) ** 2)
    return PureState(pref * v)


# --------------------------------------------------------------------------
# weak coherent mixing as a displacement


def mix_with_coherent(state: PureState, phi: complex, tau: float, n_max_b: int | None = None) -> DensityOperator:
    """Direct two-mode simulation: mix with |phi> at transmissivity tau, trace the ancilla."""
    coh = coherent_state(phi, n_max_b)
    joint = beam_splitter(state, coh, tau)
    return joint.reduced_a()


def mix_with_coherent_factorized(state: PureState, phi: complex, tau: float, pad: int = 0) -> DensityOperator:
    """Same channel as ``mix_with_coherent`` without a large ancilla basis.

    The beam splitter maps a coherent ancilla |phi> to a displacement
    D(i sqrt(1 - tau) phi) of the signal after the pure-loss channel, so only
    the signal basis (padded for the displacement) is needed.
    """
    gamma = 1j * math.sqrt(1.0 - tau) * complex(phi)
    n = state.n_max + pad + displacement_padding(gamma)
    lossy = loss_channel(state.padded(n), 1.0 - tau).matrix if tau < 1.0 else state.padded(n).to_density().matrix
    dm = displacement_matrix(gamma, n)
    return DensityOperator(dm @ lossy @ dm.conj().T)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    n = max(rho.n_max, sigma.n_max)
    diff = rho.padded(n).matrix / rho.trace - sigma.padded(n).matrix / sigma.trace
    return 0.5 * float(np.abs(np.linalg.eigvalsh(diff)).sum())


def displacement_limit_check(phi: complex, tau: float, r: float = 0.5, n_max: int | None = None) -> float:
    """Trace distance between coherent mixing of |sq(r)> and the ideal displacement.

    Side one mixes with |phi> on a tau beam splitter and traces the ancilla;
    side two displaces by i sqrt(1 - tau) phi.  Vanishes as tau -> 1 with
    sqrt(1 - tau) phi held fixed.
    """
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    sq = squeezed_vacuum(r, n_max)
    gamma = 1j * math.sqrt(1.0 - tau) * complex(phi)
    mixed = mix_with_coherent_factorized(sq, phi, tau)
    n = mixed.n_max
    ideal = displacement_matrix(gamma, n) @ sq.padded(n).amplitudes
    return trace_distance(mixed, PureState(ideal).to_density())

