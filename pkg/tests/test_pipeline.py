import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from squeezecat import analytics as an
from squeezecat import fock
from squeezecat import pipeline as pl
from squeezecat.analytics import RealisticParams
from squeezecat.errors import ZeroProbability
from squeezecat.fock import DetectorModel, PureState
from squeezecat.verification import richardson_slope

SQRT6 = math.sqrt(6.0)


def test_stage_validation():
    with pytest.raises(ValueError):
        pl.CircuitStage(1.0)
    with pytest.raises(ValueError):
        pl.CircuitSpec(0.5, ())
    with pytest.raises(ValueError):
        pl.CircuitSpec(1.0, (pl.CircuitStage(0.9),))
    assert pl.CircuitStage(0.9, detector="apd").detector is DetectorModel.APD


def test_three_tap_displacements():
    stages = pl.three_tap_stages(0.9, 0.8, 0.7, 1.5)
    assert stages[0].trigger_displacement == 0
    assert stages[1].trigger_displacement == pytest.approx(1j * math.sqrt(0.2) * 1.5)
    assert stages[2].trigger_displacement == pytest.approx(-1j * math.sqrt(0.3) * 1.5)


def test_single_stage_matches_f1_at_reduced_squeezing():
    alpha, R = SQRT6, 1e-4
    r = an.r1_opt(alpha) / (1 - R)
    res = pl.run_circuit(pl.CircuitSpec(r, (pl.CircuitStage(1 - R),)))
    fid = fock.fidelity(res.output, fock.cat_state(alpha, n_max=res.n_max))
    assert fid == pytest.approx(an.f1(alpha, r * (1 - R)), abs=1e-9)
    assert res.probability == pytest.approx(an.success_probability_single(r, 1 - R), rel=1e-9)


def test_single_stage_click_probability_small_r():
    r, R = 0.4, 1e-6
    res = pl.run_circuit(pl.CircuitSpec(r, (pl.CircuitStage(1 - R, detector=DetectorModel.APD),)))
    assert res.probability == pytest.approx(R * r * r / (1 - r * r), rel=1e-5)


def test_beta_chain_matches_closed_forms():
    p = an.beta_chain(SQRT6)
    res = pl.run_circuit(pl.three_tap_circuit(p))
    cat = fock.cat_state(SQRT6, n_max=res.n_max)
    assert fock.fidelity(res.output, cat) == pytest.approx(an.f3_realistic(SQRT6, p), abs=1e-10)
    assert res.probability == pytest.approx(an.success_probability(p), rel=1e-10)
    assert math.prod(res.per_stage_probabilities) == pytest.approx(res.probability, rel=1e-12)


@pytest.mark.parametrize("beta", [0.0, 0.7, 1.2 - 0.4j])
def test_closed_form_operator_matches_circuit(beta):
    # no tie imposed: the operator form holds for any transmissivities
    p = RealisticParams(0.55, 0.85, 0.9, 0.8, beta)
    n = fock.default_cutoff(p.r)
    res = pl.run_circuit(pl.three_tap_circuit(p, n_max=n))
    closed = pl.closed_form_output(p, n)
    assert np.allclose(res.output.amplitudes, closed.amplitudes, atol=1e-14)


def test_apd_fidelity_is_lower():
    p = RealisticParams.tied(0.6, 0.95, 0.97, 0.8)
    nr1 = pl.run_circuit(pl.three_tap_circuit(p))
    apd = pl.run_circuit_apd(pl.three_tap_circuit(p, DetectorModel.APD))
    cat = fock.cat_state(1.8, n_max=nr1.n_max)
    f_nr1 = fock.fidelity(nr1.output, cat)
    f_apd = fock.fidelity_mixed(apd.output, cat)
    assert f_apd < f_nr1
    assert apd.probability > nr1.probability


def test_apd_tends_to_nr1_for_weak_taps():
    R = 1e-4
    spec = lambda det: pl.CircuitSpec(0.5, (pl.CircuitStage(1 - R, 0.0, det),) * 3)
    nr1 = pl.run_circuit(spec(DetectorModel.NR1))
    apd = pl.run_circuit(spec(DetectorModel.APD))
    cat = fock.cat_state(1.5, n_max=nr1.n_max)
    assert fock.fidelity_mixed(apd.output, cat) == pytest.approx(fock.fidelity(nr1.output, cat), abs=1e-3)


def test_run_circuit_apd_rejects_nr1():
    with pytest.raises(ValueError):
        pl.run_circuit_apd(pl.CircuitSpec(0.5, (pl.CircuitStage(0.9),)))


def test_zero_probability_is_reported():
    with pytest.raises(ZeroProbability):
        pl.run_circuit(pl.CircuitSpec(0.0, (pl.CircuitStage(0.9),)))


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.05, 0.7), R=st.floats(0.01, 0.5), beta=st.complex_numbers(max_magnitude=1.5))
def test_outcome_probabilities_are_complete(r, R, beta):
    sq = fock.squeezed_vacuum(r)
    probs = pl.outcome_probabilities(sq, R, beta)
    assert probs.sum() == pytest.approx(1.0, abs=1e-10)
    _, p_click = pl.kraus_subtract(sq, R, beta, DetectorModel.APD)
    assert probs[0] + p_click == pytest.approx(1.0, abs=1e-10)
    _, p_one = pl.kraus_subtract(sq, R, beta)
    assert p_one == pytest.approx(probs[1], abs=1e-12)


def test_first_order_kraus_limit():
    slope, residuals = richardson_slope(beta=1.0, r=0.4)
    assert slope == pytest.approx(2.0, abs=0.1)
    assert residuals[0] > residuals[1] > residuals[2]


def test_loss_channel_matches_lossy_overlap():
    cat = fock.cat_state(SQRT6)
    rho = pl.loss_channel(cat, 0.01)
    assert rho.trace == pytest.approx(1.0, abs=1e-13)
    assert fock.fidelity_mixed(rho, cat) == pytest.approx(an.lossy_cat_overlap(SQRT6, 0.01), abs=1e-10)


def test_coherent_mixing_factorisation():
    sq = fock.squeezed_vacuum(0.3, 20)
    direct = pl.mix_with_coherent(sq, 1.1 + 0.2j, 0.8, 40)
    fact = pl.mix_with_coherent_factorized(sq, 1.1 + 0.2j, 0.8)
    assert pl.trace_distance(direct, fact) < 1e-10


def test_displacement_limit():
    # hold sqrt(1 - tau) phi fixed while tau -> 1
    gamma = 0.5
    dists = [pl.displacement_limit_check(gamma / math.sqrt(1 - tau), tau) for tau in (0.9, 0.99, 0.999)]
    assert dists[0] > dists[1] > dists[2]
    assert dists[2] < 1e-3
    assert pl.displacement_limit_check(0.0, 1.0) < 1e-12


def test_mixed_state_stage_preserves_hermiticity():
    rho = pl.loss_channel(fock.squeezed_vacuum(0.5), 0.1)
    out, w = pl.apply_stage(rho, pl.CircuitStage(0.9, 0.2j))
    assert np.allclose(out.matrix, out.matrix.conj().T, atol=1e-15)
    assert out.trace == pytest.approx(w)
    assert np.linalg.eigvalsh(out.matrix).min() > -1e-14


def test_cutoff_doubling_is_stable():
    p = an.beta_chain(1.5)
    n = fock.default_cutoff(p.r)
    a = pl.run_circuit(pl.three_tap_circuit(p, n_max=n))
    b = pl.run_circuit(pl.three_tap_circuit(p, n_max=2 * n))
    cat = fock.cat_state(1.5, n_max=2 * n)
    assert abs(fock.fidelity(a.output, cat) - fock.fidelity(b.output, cat)) < 1e-9
    assert b.probability == pytest.approx(a.probability, rel=1e-9)
