"""
Axiom fixtures on explicit influence tables
===========================================

Critical-set instances, sink projection and Bayesian mixtures, checked with
the exact oracles.
"""

import numpy as np

from infcen import exact

# R = {0, 1} must both be seeded to switch on node 2
inst = exact.critical_set_instance(3, [0, 1], [0, 1, 2])
print("shapley on I_{R,v}:", exact.exact_shapley(inst))   # 7/6, 7/6, 2/3
print("sni on I_{R,v}:", [exact.exact_sni(inst, v) for v in range(3)])

# nodes outside R are sinks, nodes outside U are isolated
wide = exact.critical_set_instance(5, [0, 1], [0, 1, 2, 3])
print("sinks:", [v for v in range(5) if exact.is_sink(wide, v)])
print("isolated:", [v for v in range(5) if exact.is_isolated(wide, v)])

# dropping an isolated node leaves a smaller critical-set instance
proj = exact.sink_projection(wide, 4)
print("projection matches:", exact.instances_close(proj, exact.critical_set_instance(4, [0, 1], [0, 1, 2, 3])))

# centrality of a mixture is the mixture of centralities
a = exact.critical_set_instance(3, [0], [0, 1, 2])
b = exact.null_instance(3)
lam = [0.3, 0.7]
mix = exact.bayesian_mixture([a, b], lam)
print("mixture:", exact.exact_shapley(mix))
print("combination:", lam[0] * exact.exact_shapley(a) + lam[1] * exact.exact_shapley(b))
print("null instance as json:", exact.null_instance(2).to_json())
