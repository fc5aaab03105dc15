"""
The closure method collapses to a single-step rule
==================================================

When every true/false pattern of the couples is possible, the non-empty
intersections are all ``H(J1, J2)`` with disjoint ``J1, J2``: ``3**M - 1`` of
them. Testing each by a union-intersection test and closing gives exactly
the single-step rule at ``alpha(M)``.
"""

import numpy as np

import triadic as td

###############################################################################
# Enumerate the intersections for two freely combining couples.
fam2 = td.HypothesisFamily.from_p_h([0.001, 0.7])
print([h.label() for h in td.enumerate_intersections(fam2)])

###############################################################################
# Which local tests does ``h1`` depend on?
rule = td.LocalTestRule.bonferroni(0.05)
for h in td.enumerate_intersections(fam2, containing=(1, "h")):
    print(f"{h.label():6s} level={rule.level(h.size):.4f} reject={td.local_test(h, fam2, rule)}")
print("closed test:", td.closed_test(fam2, rule).labels())

###############################################################################
# Random check against the single-step rule.
for m in range(1, 6):
    rep = td.verify_theorem_equivalence(td.HypothesisFamily.from_p_h([0.5] * m), rule,
                                        trials=5000, seed=m)
    print(f"M={m}: {len(td.enumerate_intersections(td.HypothesisFamily.from_p_h([0.5] * m)))} "
          f"intersections, mismatches={rep.mismatches}")

###############################################################################
# The ordered-threshold family ``h_i: theta >= theta_i`` is not freely
# combining (``h2`` and ``k1`` cannot both hold), so the check refuses it.
nested = td.HypothesisFamily.from_p_h([0.5, 0.5], td.ordered_threshold_oracle((0.0, 1.0)))
print("free combination:", td.is_free_combination(nested))
print("intersections:", [h.label() for h in td.enumerate_intersections(nested)])
try:
    td.verify_theorem_equivalence(nested, rule, trials=10)
except td.NotFreeCombination as exc:
    print("refused:", exc)
