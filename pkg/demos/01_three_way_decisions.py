"""
Three-way decisions from p-values
=================================

Each couple pairs a hypothesis ``h_i`` with its alternative ``k_i``. Testing
both at the per-claim level ``alpha(M)`` sorts every index into one of three
groups:

* D1 -- ``h_i`` is significantly true (``k_i`` rejected),
* D2 -- ``h_i`` is significantly false (``h_i`` rejected),
* D3 -- neither is rejected: the index sits in the uncertainty zone ``G``.
"""

import numpy as np

import triadic as td

###############################################################################
# A family of complementary p-values (``p_k = 1 - p_h``).
p_h = [0.0004, 0.003, 0.02, 0.4, 0.6, 0.985, 0.9993]
family = td.HypothesisFamily.from_p_h(p_h)
print("M =", family.m, " complementary:", family.complementary)

###############################################################################
# Bonferroni calibration: ``alpha(M) = alpha / M``.
th = td.calibrate("bonferroni", 0.05, family.m)
d = td.single_step(family, th)
sets = td.partition_from_decisions(d)
print("thresholds:", th)
print("decisions: ", d.labels())
print("U-bar =", sorted(sets.u_bar), " L =", sorted(sets.l), " G =", sorted(sets.g))

###############################################################################
# With independent p-values the exact level ``1 - (1 - alpha)**(1/M)`` is a
# little larger, so the uncertainty zone can only shrink.
th_ind = td.calibrate("independent", 0.05, family.m)
g_ind = td.partition_from_decisions(td.single_step(family, th_ind)).g
print("independent thresholds:", th_ind, " G =", sorted(g_ind))

###############################################################################
# The Bonferroni procedure written directly as rejection sets gives the same
# partition.
print("bauer_bonferroni == single_step:", td.bauer_bonferroni(family, 0.05) == sets)

###############################################################################
# Non-complementary pairs are refused unless explicitly allowed; then
# hypotheses and alternatives are tested separately.
odd = td.HypothesisFamily((td.PValuePair(0.001, 0.8), td.PValuePair(0.5, 0.2)))
try:
    td.single_step(odd, th)
except td.ComplementarityViolation as exc:
    print("refused:", exc.rows)
print("override:", td.single_step(odd, th, override=True).labels())

###############################################################################
# The sizes of the three groups as the level varies.
for alpha in (0.01, 0.05, 0.1, 0.2):
    s = td.bauer_bonferroni(family, alpha)
    print(f"alpha={alpha:<5} |U-bar|={len(s.u_bar)} |L|={len(s.l)} |G|={len(s.g)}")
