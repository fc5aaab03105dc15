"""
Two nested one-sided couples: closure differs from Bonferroni
=============================================================

A normal mean ``theta`` with ``h_i: theta >= theta_i`` against
``k_i: theta < theta_i`` and ``theta1 < theta2``. Because ``h2`` implies ``h1``,
the closure tests ``k1`` and ``h2`` at the full level ``alpha`` while
Bonferroni splits it in half everywhere.
"""

import triadic as td

alpha, n, theta1, theta2 = 0.05, 1, 0.0, 10.0

###############################################################################
# Critical values on the standardised scale ``sqrt(n)(xbar - theta_i)``.
rep = td.counterexample_vs_bonferroni(None, n, theta1, theta2, alpha)
for name in ("h1", "k1", "h2", "k2"):
    print(f"{name}: closure {rep.closure_critical[name]:.4f}  "
          f"bonferroni {rep.bonferroni_critical[name]:.4f}")

###############################################################################
# Where the two procedures disagree.
for iv in rep.analytic:
    print(f"index {iv.index} ({iv.test}): {iv}")
for ob in rep.observed:
    print(f"grid sweep, index {ob['index']}: xbar in ({ob['xbar_lo']:.5f}, {ob['xbar_hi']:.5f})"
          f" closure={ob['closure']} bonferroni={ob['bonferroni']}")

###############################################################################
# A point inside the band: the closure already calls ``theta >= theta1``.
print(td.counterexample_procedure(1.8, n, theta1, theta2, alpha).labels())

###############################################################################
# Both procedures keep the familywise error below alpha.
for theta in (theta1 - 1, theta1, 5.0, theta2, theta2 + 1):
    model = td.NestedNormalModel(theta, n, theta1, theta2)
    cl = td.monte_carlo_risk(model, td.ProcedureSpec("counterexample"), replicates=50_000, seed=1)
    bf = td.monte_carlo_risk(model, td.ProcedureSpec("bauer_bonferroni"), replicates=50_000, seed=1)
    print(f"theta={theta:5.1f}: FWER closure={cl.fwer:.4f} bonferroni={bf.fwer:.4f}  "
          f"E|G| closure={cl.expected_g:.3f} bonferroni={bf.expected_g:.3f}")
