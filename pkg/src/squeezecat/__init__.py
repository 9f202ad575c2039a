"""Schrödinger-cat breeding by photon subtraction from squeezed vacuum.

Closed-form fidelities and heralding probabilities in ``analytics``, a
truncated Fock-space simulator in ``fock`` and ``pipeline``, parameter
sweeps in ``optimize``.
"""

from .analytics import (
    Branch,
    RealisticParams,
    beta_chain,
    beta_opt_sq,
    f1,
    f3,
    f3_beta_zero_opt,
    f3_realistic,
    lossy_cat_overlap,
    r1_opt,
    r3_opt,
    success_probability,
    success_probability_single,
    t1_opt,
)
from .errors import (
    ConstraintViolated,
    DomainError,
    InvalidRegime,
    NoConvergence,
    NoSolution,
    SqueezeCatError,
    TailTooLarge,
    ZeroNorm,
    ZeroProbability,
)
from .fock import (
    DensityOperator,
    DetectorModel,
    Parity,
    PureState,
    TwoModeState,
    beam_splitter,
    cat_state,
    coherent_state,
    condition_on_detection,
    displace,
    fidelity,
    fidelity_mixed,
    squeezed_vacuum,
)
from .pipeline import CircuitSpec, CircuitStage, RunResult, closed_form_output, run_circuit, three_tap_circuit

__version__ = "0.1.0"
