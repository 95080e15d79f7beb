"""
Shapley vs single-node influence on three nodes
===============================================

u reaches v and w with probability 1/2 each, and both of them reach u with
probability p.  For p between 1/2 and 2/3 the two centralities disagree on
who matters most.
"""

import numpy as np

from infcen import exact, synth
from infcen.estimators import EstimatorParams, run

p = 0.55
g = synth.fig1(p)
names = g.labels

# exact values by enumerating all live-edge graphs
psi = exact.exact_shapley(g)
sni = [exact.exact_sni(g, v) for v in range(g.n)]
for name, a, b in zip(names, psi, sni):
    print(f"{name}: shapley={a:.5f}  sni={b:.5f}")

# the same thing from RR-set sampling
est = run(g, EstimatorParams(epsilon=0.02, k=1, seed=1)).estimates
est_sni = run(g, EstimatorParams(epsilon=0.02, k=1, seed=1, mode="sni")).estimates
print("sampled shapley", np.round(est, 4), "sum", est.sum())
print("sampled sni    ", np.round(est_sni, 4))
