"""Brute-force oracles and explicit influence instances for small node sets.

Node subsets are bitmasks (bit ``v`` set means node ``v`` is in the set),
which caps everything here at 16 nodes.  Graph-backed quantities enumerate
all ``2**m`` live-edge graphs; the enumeration is vectorised over chunks of
edge masks.

An :class:`ExplicitInstance` stores the full activation distribution
``P(S, T)``: the probability that seed set ``S`` ends up activating exactly
``T``.  It can describe any influence model, not only independent cascade,
which is what the axiom fixtures (critical-set instances, sink projections,
mixtures) need.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

MAX_NODES = 16
MAX_EDGES = 24
MAX_PERM_NODES = 9
ROW_TOL = 1e-12
_CHUNK = 1 << 16


def mask_of(nodes):
    m = 0
    for v in nodes:
        m |= 1 << int(v)
    return m


def members(mask):
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return out


def _popcounts(n):
    table = np.zeros(1 << n, dtype=np.int64)
    for v in range(n):
        table[1 << v : 1 << (v + 1)] = table[: 1 << v] + 1
    return table


def mask_weights(n, weights=None):
    """``out[T]`` = total weight of subset ``T`` (cardinality when unweighted)."""
    if weights is None:
        return _popcounts(n).astype(np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (n,):
        raise ValueError("need one weight per node")
    table = np.zeros(1 << n)
    for v in range(n):
        table[1 << v : 1 << (v + 1)] = table[: 1 << v] + w[v]
    return table


# --------------------------------------------------------------------------
# explicit instances


@dataclass
class ExplicitInstance:
    """Activation table ``rows[S][T] = P(S, T)`` on nodes ``0..n-1``."""

    n: int
    rows: dict
    weights: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if not 0 <= self.n <= MAX_NODES:
            raise ValueError(f"explicit instances support at most {MAX_NODES} nodes")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=np.float64)
            if self.weights.shape != (self.n,) or np.any(self.weights < 0):
                raise ValueError("weights must be one non-negative value per node")
        self.validate()

    def validate(self, tol=ROW_TOL):
        full = (1 << self.n) - 1
        if set(self.rows) != set(range(full + 1)):
            raise ValueError("instance needs one row per subset")
        for S, dist in self.rows.items():
            total = 0.0
            for T, p in dist.items():
                if p < -tol:
                    raise ValueError(f"negative probability in row {S}")
                if p > tol and T & S != S:
                    raise ValueError(f"row {S} puts mass on {T}, which does not contain it")
                if T & ~full:
                    raise ValueError(f"row {S} references nodes outside the instance")
                total += p
            if abs(total - 1.0) > tol:
                raise ValueError(f"row {S} sums to {total}, not 1")
        if abs(self.rows[0].get(0, 0.0) - 1.0) > tol:
            raise ValueError("the empty seed set must activate nothing")

    def prob(self, S, T):
        return self.rows[S].get(T, 0.0)

    def spread(self, S, weights=None):
        w = self.weights if weights is None else weights
        table = mask_weights(self.n, w)
        return float(sum(p * table[T] for T, p in self.rows[S].items()))

    def to_json(self):
        doc = {
            "n": self.n,
            "rows": [
                {"S": S, "dist": {str(T): p for T, p in sorted(self.rows[S].items()) if p != 0.0}}
                for S in sorted(self.rows)
            ],
        }
        if self.weights is not None:
            doc["weights"] = self.weights.tolist()
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        rows = {int(r["S"]): {int(T): float(p) for T, p in r["dist"].items()} for r in doc["rows"]}
        return cls(int(doc["n"]), rows, doc.get("weights"))


def instances_close(a, b, tol=1e-12):
    if a.n != b.n:
        return False
    for S in range(1 << a.n):
        ra, rb = a.rows[S], b.rows[S]
        for T in set(ra) | set(rb):
            if abs(ra.get(T, 0.0) - rb.get(T, 0.0)) > tol:
                return False
    return True


def null_instance(n):
    """Every seed set activates only itself."""
    return ExplicitInstance(n, {S: {S: 1.0} for S in range(1 << n)})


def critical_set_instance(n, R, U):
    """Seed sets containing all of ``R`` activate ``U`` as well; others only themselves."""
    r, u = mask_of(R), mask_of(U)
    if r == 0 or r & ~u or u >> n:
        raise ValueError("need a non-empty R contained in U, inside 0..n-1")
    rows = {S: {(S | u) if S & r == r else S: 1.0} for S in range(1 << n)}
    return ExplicitInstance(n, rows)


def is_sink(inst, v, tol=1e-12):
    """``v`` influences nobody but itself."""
    bit = 1 << v
    for S in range(1 << inst.n):
        if S & bit:
            continue
        row, with_v = inst.rows[S], inst.rows[S | bit]
        for T in set(row) | {t & ~bit for t in row} | {t & ~bit for t in with_v}:
            if T & bit:
                continue
            lhs = with_v.get(T | bit, 0.0)
            rhs = row.get(T, 0.0) + row.get(T | bit, 0.0)
            if abs(lhs - rhs) > tol:
                return False
    return True


def is_isolated(inst, v, tol=1e-12):
    """``v`` neither influences nor can be influenced by anyone."""
    bit = 1 << v
    for S in range(1 << inst.n):
        if S & bit:
            continue
        row, with_v = inst.rows[S], inst.rows[S | bit]
        for T in {t & ~bit for t in row} | {t & ~bit for t in with_v}:
            if abs(with_v.get(T | bit, 0.0) - row.get(T, 0.0)) > tol:
                return False
    return True


def _drop_bit(mask, v):
    low = mask & ((1 << v) - 1)
    return low | ((mask >> (v + 1)) << v)


def sink_projection(inst, v):
    """Remove sink ``v``; nodes above ``v`` shift down by one id."""
    if not is_sink(inst, v):
        raise ValueError(f"node {v} is not a sink")
    bit = 1 << v
    rows = {}
    for S in range(1 << inst.n):
        if S & bit:
            continue
        dist = {}
        for T, p in inst.rows[S].items():
            key = _drop_bit(T & ~bit, v)
            dist[key] = dist.get(key, 0.0) + p
        rows[_drop_bit(S, v)] = dist
    weights = None if inst.weights is None else np.delete(inst.weights, v)
    return ExplicitInstance(inst.n - 1, rows, weights)


def bayesian_mixture(instances, lam):
    lam = np.asarray(lam, dtype=np.float64)
    if len(instances) != lam.shape[0] or not instances:
        raise ValueError("need one mixing weight per instance")
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-12:
        raise ValueError("mixing weights must be non-negative and sum to 1")
    n = instances[0].n
    if any(i.n != n for i in instances):
        raise ValueError("all instances must share the node set")
    rows = {}
    for S in range(1 << n):
        dist = {}
        for inst, l in zip(instances, lam):
            for T, p in inst.rows[S].items():
                dist[T] = dist.get(T, 0.0) + l * p
        rows[S] = dist
    return ExplicitInstance(n, rows, instances[0].weights)


# --------------------------------------------------------------------------
# live-edge enumeration


def _check_small(g):
    if g.n > MAX_NODES:
        raise ValueError(f"exact oracles support at most {MAX_NODES} nodes (got {g.n})")
    if g.m > MAX_EDGES:
        raise ValueError(f"exact oracles support at most {MAX_EDGES} edges (got {g.m})")


def live_edge_probs(g):
    """Pr(L) for every edge mask L (bit ``i`` = edge ``i`` in ``g.src`` order)."""
    _check_small(g)
    probs = np.ones(1)
    for p in g.prob:
        probs = np.concatenate((probs * (1.0 - p), probs * p))
    return probs


def enumerate_live_edge_graphs(g):
    """Yield ``(edges, probability)`` for all ``2**m`` live-edge graphs.

    ``edges`` is the tuple of live edges as ``(u, v)`` pairs.
    """
    probs = live_edge_probs(g)
    pairs = list(zip(g.src.tolist(), g.dst.tolist()))
    for L, p in enumerate(probs):
        yield tuple(e for i, e in enumerate(pairs) if L >> i & 1), float(p)


def _reach_chunks(g, chunk=_CHUNK):
    """Yield ``(probs, reach)`` over chunks of live-edge graphs.

    ``reach[u]`` is an int64 array (one entry per graph in the chunk) holding
    the bitmask of nodes reachable from ``u``, ``u`` included.
    """
    probs = live_edge_probs(g)
    n, m = g.n, g.m
    src, dst = g.src.tolist(), g.dst.tolist()
    for start in range(0, probs.shape[0], chunk):
        L = np.arange(start, min(start + chunk, probs.shape[0]), dtype=np.int64)
        reach = [np.full(L.shape[0], 1 << u, dtype=np.int64) for u in range(n)]
        for i in range(m):
            reach[src[i]] |= ((L >> i) & 1) << dst[i]
        # Warshall closure on bitmasks
        for k in range(n):
            bk = reach[k]
            for u in range(n):
                if u != k:
                    has = (reach[u] >> k) & 1
                    reach[u] = reach[u] | (bk * has)
        yield probs[start : start + L.shape[0]], reach


def exact_spread(g, S, weights=None):
    """Expected (weighted) number of nodes activated by ``S``."""
    seeds = list(S)
    if not seeds:
        return 0.0
    table = mask_weights(g.n, weights)
    total = 0.0
    for probs, reach in _reach_chunks(g):
        active = np.zeros(probs.shape[0], dtype=np.int64)
        for v in seeds:
            active |= reach[v]
        total += float(probs @ table[active])
    return total


def exact_sni(obj, v):
    """Single-node influence of ``v`` for a graph or an explicit instance."""
    if isinstance(obj, ExplicitInstance):
        return obj.spread(1 << v)
    return exact_spread(obj, [v])


def spread_table(obj, weights=None):
    """``sigma[S]`` for every subset mask ``S``."""
    if isinstance(obj, ExplicitInstance):
        w = obj.weights if weights is None else weights
        table = mask_weights(obj.n, w)
        return np.array(
            [sum(p * table[T] for T, p in obj.rows[S].items()) for S in range(1 << obj.n)]
        )
    _check_small(obj)
    n = obj.n
    table = mask_weights(n, weights)
    sigma = np.zeros(1 << n)
    for probs, reach in _reach_chunks(obj, chunk=max(64, (1 << 22) >> n)):
        active = np.zeros((1 << n, probs.shape[0]), dtype=np.int64)
        for S in range(1, 1 << n):
            low = S & -S
            active[S] = active[S ^ low] | reach[low.bit_length() - 1]
        sigma += table[active] @ probs
    return sigma


def graph_to_instance(g, weights=None):
    """Explicit table ``P(S, T) = sum of Pr(L) over L with Gamma(L, S) = T``."""
    _check_small(g)
    n = g.n
    rows = {S: {} for S in range(1 << n)}
    for probs, reach in _reach_chunks(g):
        for S in range(1 << n):
            active = np.zeros(probs.shape[0], dtype=np.int64)
            for v in members(S):
                active |= reach[v]
            Ts, inv = np.unique(active, return_inverse=True)
            mass = np.bincount(inv.ravel(), weights=probs, minlength=Ts.shape[0])
            dist = rows[S]
            for T, p in zip(Ts.tolist(), mass.tolist()):
                dist[T] = dist.get(T, 0.0) + p
    return ExplicitInstance(n, rows, weights)


# --------------------------------------------------------------------------
# Shapley oracles


def exact_shapley_perm(spread_fn, n):
    """Average marginal contribution over all ``n!`` arrival orders.

    ``spread_fn`` is a callable on subset masks or a precomputed array
    indexed by mask.
    """
    if n > MAX_PERM_NODES:
        raise ValueError(f"permutation enumeration is limited to {MAX_PERM_NODES} nodes")
    if callable(spread_fn):
        sigma = [spread_fn(S) for S in range(1 << n)]
    else:
        sigma = list(np.asarray(spread_fn, dtype=np.float64))
    psi = [0.0] * n
    for order in itertools.permutations(range(n)):
        S = 0
        prev = sigma[0]
        for v in order:
            S |= 1 << v
            cur = sigma[S]
            psi[v] += cur - prev
            prev = cur
    return np.array(psi) / math.factorial(n)


def exact_shapley_rr(g, weights=None):
    """Shapley centrality from the RR-set identity, summed over all live-edge graphs.

    For a fixed live-edge graph each root ``v`` splits its weight evenly
    among the nodes that can reach it.
    """
    _check_small(g)
    n = g.n
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    sizes = _popcounts(n).astype(np.float64)
    psi = np.zeros(n)
    for probs, reach in _reach_chunks(g):
        for v in range(n):
            hits = [(reach[u] >> v) & 1 for u in range(n)]
            back = np.zeros(probs.shape[0], dtype=np.int64)
            for u in range(n):
                back |= hits[u] << u
            share = probs * w[v] / sizes[back]
            for u in range(n):
                psi[u] += float(share @ hits[u])
    return psi


def exact_shapley(obj, weights=None):
    """Shapley centrality of a graph or explicit instance (best available oracle)."""
    if isinstance(obj, Graph):
        return exact_shapley_rr(obj, weights)
    return exact_shapley_perm(spread_table(obj, weights), obj.n)


def weighted_exact_shapley(obj, weights):
    """Shapley centrality of the weighted spread ``E[w(I(S))]``."""
    if isinstance(obj, Graph):
        return exact_shapley_rr(obj, weights)
    return exact_shapley_perm(spread_table(obj, weights), obj.n)
