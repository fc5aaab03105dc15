"""
Three-way threshold correlation graph
=====================================

One couple per pair of variables: ``h: rho <= rho0`` against ``k: rho > rho0``,
tested with the Fisher z-transform. D2 marks a significant edge, D1 a
significant non-edge, D3 an undecided pair.
"""

import numpy as np

import triadic as td

rng = np.random.default_rng(0)
n_obs, p = 300, 6
latent = rng.standard_normal(n_obs)
x = rng.standard_normal((n_obs, p))
x[:, 0] += 1.5 * latent
x[:, 1] += 1.5 * latent
x[:, 2] += 0.4 * latent

res = td.correlation_edge_test(x, rho0=0.3)
th = td.calibrate("bonferroni", 0.05, res.family.m)
d = td.single_step(res.family, th)
names = {1: "significant non-edge", 2: "significant edge", 3: "uncertain"}
for (i, j), r, dec in zip(res.edges, res.correlations, d):
    print(f"v{i}-v{j}: r={r:+.3f}  {names[int(dec)]}")
print("|G| =", len(td.partition_from_decisions(d).g))
