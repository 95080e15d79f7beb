"""
Seed selection baseline
=======================

Greedy max-cover over stored RR sets, next to the top Shapley and SNI nodes.
"""

import numpy as np

from infcen import synth
from infcen.diffusion import estimate_spread_mc
from infcen.estimators import EstimatorParams, run
from infcen.im import rr_greedy

g = synth.random_wc_graph(3000, 15000, np.random.default_rng(4))
k = 10

greedy = rr_greedy(g, k, 50_000, seed=1)
shap = run(g, EstimatorParams(epsilon=0.3, k=k, seed=1)).ranking()[:k]
sni = run(g, EstimatorParams(epsilon=0.3, k=k, seed=1, mode="sni")).ranking()[:k]

for name, seeds in (("greedy", greedy.seeds), ("shapley", shap), ("sni", sni)):
    est = estimate_spread_mc(g, list(map(int, seeds)), 5000, seed=3)
    print(f"{name:8s} spread {est.mean:8.2f} +- {est.stderr:.2f}")
print("greedy coverage trace:", np.round(greedy.coverage_trace, 3).tolist())
