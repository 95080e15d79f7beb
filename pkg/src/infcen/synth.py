"""Small named graphs and random generators for tests, demos and the ``synth`` command."""

from __future__ import annotations

import numpy as np

from .graph import Graph, assign_wc


def fig1(p):
    """Three nodes: u=0 reaches v=1 and w=2 with probability 1/2, both reach u with ``p``."""
    return Graph.from_edges(3, [(0, 1, 0.5), (0, 2, 0.5), (1, 0, p), (2, 0, p)], ["u", "v", "w"])


def symmetric_cycle(n, p):
    """Undirected n-cycle with probability ``p`` in both directions."""
    edges = []
    for i in range(n):
        j = (i + 1) % n
        edges.append((i, j, p))
        if n > 2:
            edges.append((j, i, p))
    return Graph.from_edges(n, edges)


def star(leaves, p=1.0):
    """Center 0 pointing at ``leaves`` leaf nodes."""
    return Graph.from_edges(leaves + 1, [(0, i, p) for i in range(1, leaves + 1)])


def line(n, p=1.0):
    return Graph.from_edges(n, [(i, i + 1, p) for i in range(n - 1)])


def random_graph(n, m, probs, rng):
    """Random directed simple graph with ``m`` edges.

    Each edge probability is drawn uniformly from ``probs``.
    """
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    if m > len(pairs):
        raise ValueError("too many edges for a simple directed graph")
    pick = rng.choice(len(pairs), size=m, replace=False)
    edges = [(*pairs[i], float(rng.choice(probs))) for i in sorted(pick)]
    return Graph.from_edges(n, edges)


def random_symmetric_graph(n, m_undirected, probs, rng):
    """Random undirected graph: each pair gets one probability used both ways."""
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    m_undirected = min(m_undirected, len(pairs))
    pick = rng.choice(len(pairs), size=m_undirected, replace=False)
    edges = []
    for i in sorted(pick):
        u, v = pairs[i]
        p = float(rng.choice(probs))
        edges += [(u, v, p), (v, u, p)]
    return Graph.from_edges(n, edges)


def random_wc_graph(n, m, rng):
    """Random directed graph with about ``m`` distinct edges and WC probabilities.

    Duplicates and self-loops from the uniform endpoint draws are discarded,
    so the edge count can fall slightly short of ``m``.
    """
    draw = int(m * 1.02) + 16
    src = rng.integers(0, n, size=draw, dtype=np.int64)
    dst = rng.integers(0, n, size=draw, dtype=np.int64)
    keep = src != dst
    key = np.unique(src[keep] * n + dst[keep])
    key = rng.permutation(key)[:m]
    key.sort()
    g = Graph(n, key // n, key % n, np.zeros(key.shape[0]))
    return assign_wc(g)
