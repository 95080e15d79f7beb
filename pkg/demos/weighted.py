"""
Weighted influence
==================

Nodes carry weights and the spread counts weight instead of heads.  Root
nodes of RR sets are drawn in proportion to weight.
"""

import numpy as np

from infcen import exact, synth
from infcen.estimators import EstimatorParams, NodeWeights, run

g = synth.random_graph(6, 10, [0.2, 0.5, 1.0], np.random.default_rng(3))
w = np.array([1.0, 4.0, 0.5, 2.0, 0.0, 1.5])

want = exact.weighted_exact_shapley(g, w)
got = run(g, EstimatorParams(epsilon=0.05, k=1, seed=2, weights=NodeWeights(w))).estimates
for v in range(g.n):
    print(f"node {v}: weight {w[v]:.1f}  exact {want[v]:.4f}  estimate {got[v]:.4f}")
print("sums:", want.sum(), got.sum(), "w(V) =", w.sum())

# weighted bargaining on a critical set: target gets |R| w(v) / (|R| + 1)
inst = exact.critical_set_instance(4, [0, 1, 2], [0, 1, 2, 3])
wv = np.array([1.0, 1.0, 1.0, 5.0])
print("critical target:", exact.weighted_exact_shapley(inst, wv)[3], "expected", 3 * 5.0 / 4)
