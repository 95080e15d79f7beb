"""Greedy max-cover over stored RR sets, used as an influence-maximization baseline.

This is the selection core of RR-set methods with a fixed, user-chosen
sample count.  It does not adapt the sample count to a target accuracy.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .rng import DOMAIN_GREEDY
from .rrset import collect_rr

DEFAULT_MEMBER_CAP = 1 << 28


@dataclass(frozen=True)
class GreedyResult:
    seeds: list
    coverage: float
    est_spread: float
    coverage_trace: list


def _inverted_index(n, offsets, flat):
    set_ids = np.repeat(np.arange(offsets.shape[0] - 1), np.diff(offsets))
    order = np.argsort(flat, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(flat, minlength=n), out=ptr[1:])
    return ptr, set_ids[order]


def greedy_max_cover(n, offsets, flat, k):
    """Lazy greedy selection of ``k`` nodes maximizing the number of covered sets.

    Ties are broken towards the smaller node id.  Once every set is covered
    the remaining picks are the smallest unused ids.
    Returns ``(seeds, covered_counts)`` with the cumulative cover after each pick.
    """
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    ptr, sets_of = _inverted_index(n, offsets, flat)
    covered = np.zeros(offsets.shape[0] - 1, dtype=bool)
    heap = [(-int(ptr[v + 1] - ptr[v]), v) for v in range(n)]
    heapq.heapify(heap)
    seeds, trace, total = [], [], 0
    while len(seeds) < k:
        neg, v = heapq.heappop(heap)
        mine = sets_of[ptr[v] : ptr[v + 1]]
        gain = int(np.count_nonzero(~covered[mine]))
        if gain < -neg:
            heapq.heappush(heap, (-gain, v))
            continue
        covered[mine] = True
        total += gain
        seeds.append(int(v))
        trace.append(total)
    return seeds, trace


def rr_greedy(g, k, num_rr, seed=0, max_members=DEFAULT_MEMBER_CAP):
    """Pick ``k`` seeds by greedy max-cover over ``num_rr`` uniform RR sets."""
    if not 1 <= k <= g.n:
        raise ValueError(f"k={k} out of range for n={g.n}")
    if num_rr < 1:
        raise ValueError("num_rr must be at least 1")
    offsets, flat = collect_rr(g, int(num_rr), seed, DOMAIN_GREEDY, max_members)
    seeds, trace = greedy_max_cover(g.n, offsets, flat, k)
    coverage = trace[-1] / num_rr
    return GreedyResult(
        seeds=seeds,
        coverage=coverage,
        est_spread=g.n * coverage,
        coverage_trace=[c / num_rr for c in trace],
    )
