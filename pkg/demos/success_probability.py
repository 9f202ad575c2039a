"""
How often does the circuit herald?
==================================

The transmissivities trade fidelity for rate.  Without displacement the
effective squeezing x = r T1 T2 T3 fixes the fidelity, so the remaining
freedom goes into the heralding probability.
"""

import math

import numpy as np

from squeezecat import analytics as an
from squeezecat.optimize import amplification_comparison, success_beta_zero

alpha = math.sqrt(6.0)
params, fid, P, calls = success_beta_zero(alpha)
print(f"beta = 0 at alpha = sqrt 6: P = {P:.3e}, F = {fid:.4f}, {calls} objective calls")
print("  " + ", ".join(f"{k}={v:.4f}" for k, v in params.items()))

chain = an.beta_chain(alpha)
print(f"with displacement: P = {an.success_probability(chain):.3e}, F = {an.f3_realistic(alpha, chain):.4f}")

# For fixed x, T2 and T3 the best first tap has a closed form.
x = 0.5
for T2 in (1.0, 0.95, 0.9):
    print(f"T2 = T3 = {T2}: T1_opt = {an.t1_opt(x, T2, T2):.4f}")

# Breeding four small cats instead of making one big one directly.
small = amplification_comparison(math.sqrt(1.5))
print(f"single photon, alpha = sqrt(3/2): P = {small['probability']:.3f}, four in a row: {small['probability_fourfold']:.2e}")

alphas = np.linspace(0.5, 5.0, 10)
for a in alphas:
    _, f, p, _ = success_beta_zero(a)
    print(f"alpha {a:4.2f}  P {p:.3e}  F {f:.4f}")
