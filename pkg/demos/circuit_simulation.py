"""
Simulating the heralding circuit
================================

The closed forms assume ideal number-resolving triggers.  Here the same
three-tap circuit is run in a truncated Fock space: each tap is a beam
splitter onto vacuum, the second and third trigger arms are displaced,
and the signal is kept only when every trigger sees one photon.
"""

import math

from squeezecat import analytics as an
from squeezecat import fock
from squeezecat import pipeline as pl
from squeezecat.fock import DetectorModel

alpha = math.sqrt(6.0)
p = an.beta_chain(alpha)
print(f"r = {p.r:.4f}  T = ({p.T1:.4f}, {p.T2:.4f}, {p.T3:.4f})  beta = {p.beta.real:.4f}")

res = pl.run_circuit(pl.three_tap_circuit(p))
cat = fock.cat_state(alpha, n_max=res.n_max)
print("cutoff", res.n_max)
print("simulated fidelity  ", fock.fidelity(res.output, cat))
print("closed-form fidelity", an.f3_realistic(alpha, p))
print("simulated P  ", res.probability)
print("closed-form P", an.success_probability(p))
print("per stage", [f"{q:.4f}" for q in res.per_stage_probabilities])

# The whole chain collapses to one operator acting on the squeezed vacuum.
closed = pl.closed_form_output(p, res.n_max)
print("operator form vs circuit, max |diff| =", abs(closed.amplitudes - res.output.amplitudes).max())

# Click detectors cannot tell one photon from several.  With these fairly
# strong taps the admixture is large.
apd = pl.run_circuit_apd(pl.three_tap_circuit(p, DetectorModel.APD))
print("click-detector fidelity", fock.fidelity_mixed(apd.output, cat))

# Weak taps make multi-photon events rare and the two detectors agree.
weak = pl.CircuitSpec(0.5, (pl.CircuitStage(0.999, 0.0, DetectorModel.APD),))
ideal = pl.CircuitSpec(0.5, (pl.CircuitStage(0.999),))
cat1 = fock.cat_state(1.2, n_max=120)
print("weak tap, click vs resolving:",
      fock.fidelity_mixed(pl.run_circuit(weak).output, cat1),
      fock.fidelity(pl.run_circuit(ideal).output, cat1))
