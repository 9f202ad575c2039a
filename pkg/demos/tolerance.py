"""
Tolerance to squeezing and displacement errors
==============================================

The three-photon fidelity vanishes where 3r + r^2 alpha^2 = beta^2, so a
displacement that is too large is worse than none.  The curves show how
wide the useful window is around the optimum.
"""

import numpy as np

from squeezecat.optimize import tolerance_curves

curves = tolerance_curves((1, 2, 3, 4, 5))
for c in curves:
    half = c.r_grid[c.f_vs_r > 0.5 * c.f_max]
    print(f"alpha {c.alpha:.0f}: F_max {c.f_max:.4f} at r {c.r_opt:.3f}, beta {c.beta_opt:.3f}; "
          f"F > F_max/2 for r in [{half.min():.3f}, {half.max():.3f}]; node at beta {c.beta_zero:.3f}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, (ax_r, ax_b) = plt.subplots(1, 2, figsize=(9, 3.5))
for c in curves:
    ax_r.plot(c.r_grid, c.f_vs_r, label=rf"$\alpha={c.alpha:g}$")
    ax_r.plot(c.r_opt, c.f_max, "k.")
    ax_b.plot(c.beta_grid, c.f_vs_beta)
    ax_b.plot(c.beta_opt, c.f_max, "k.")
ax_r.set_xlabel("$r$")
ax_b.set_xlabel(r"$\beta$")
ax_r.set_ylabel("$F_3$")
ax_r.legend()
fig.tight_layout()
fig.savefig("tolerance.png", dpi=120)
