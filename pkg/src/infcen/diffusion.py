"""Forward independent-cascade simulation and Monte-Carlo spread estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from numba import prange

from .rng import DOMAIN_SPREAD, next_uniform, stream_state


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    stderr: float
    num_sims: int


def seed_array(g, seeds):
    """Validate a seed collection and return it as a sorted id array."""
    arr = np.asarray(sorted(seeds), dtype=np.int64)
    if arr.size and (arr[0] < 0 or arr[-1] >= g.n):
        raise ValueError("seed id out of range")
    if np.unique(arr).shape[0] != arr.shape[0]:
        raise ValueError("duplicate seed ids")
    return arr


@numba.njit(cache=True)
def cascade(out_ptr, out_dst, out_prob, seeds, state, mark, stamp, buf):
    """One cascade from ``seeds``; activated nodes end up in ``buf[:size]``.

    Each newly active node gets one attempt on each currently inactive
    out-neighbour.  Returns ``(size, state)``.
    """
    size = 0
    for s in seeds:
        mark[s] = stamp
        buf[size] = s
        size += 1
    head = 0
    while head < size:
        u = buf[head]
        head += 1
        for e in range(out_ptr[u], out_ptr[u + 1]):
            v = out_dst[e]
            if mark[v] != stamp:
                state, r = next_uniform(state)
                if r < out_prob[e]:
                    mark[v] = stamp
                    buf[size] = v
                    size += 1
    return size, state


@numba.njit(cache=True, parallel=True)
def _cascade_sizes(out_ptr, out_dst, out_prob, seeds, seed, num_sims, nblocks):
    n = out_ptr.shape[0] - 1
    sizes = np.empty(num_sims, dtype=np.int64)
    marks = np.zeros((nblocks, n), dtype=np.int64)
    bufs = np.empty((nblocks, n), dtype=np.int64)
    per = num_sims // nblocks
    extra = num_sims % nblocks
    for b in prange(nblocks):
        lo = b * per + min(b, extra)
        hi = lo + per + (1 if b < extra else 0)
        for i in range(lo, hi):
            state = stream_state(seed, DOMAIN_SPREAD, i)
            size, state = cascade(out_ptr, out_dst, out_prob, seeds, state,
                                  marks[b], i + 1, bufs[b])
            sizes[i] = size
    return sizes


def forward_simulate(g, seeds, stream):
    """Activated node set of one cascade, drawing coins from ``stream``."""
    arr = seed_array(g, seeds)
    mark = np.zeros(g.n, dtype=np.int64)
    buf = np.empty(g.n, dtype=np.int64)
    size, stream.state = cascade(g.out_ptr, g.out_dst, g.out_prob, arr, stream.state, mark, 1, buf)
    return set(buf[:size].tolist())


def cascade_sizes(g, seeds, num_sims, seed=0):
    """|I(S)| for simulations ``0 .. num_sims-1``."""
    arr = seed_array(g, seeds)
    if num_sims < 1:
        raise ValueError("num_sims must be at least 1")
    if arr.size == 0 or g.n == 0:
        return np.zeros(num_sims, dtype=np.int64)
    nblocks = int(max(1, min(16, num_sims // 1024, (1 << 27) // (16 * g.n) or 1)))
    return _cascade_sizes(g.out_ptr, g.out_dst, g.out_prob, arr, np.uint64(seed), num_sims, nblocks)


def estimate_spread_mc(g, seeds, num_sims, seed=0):
    """Mean cascade size over ``num_sims`` independent runs."""
    sizes = cascade_sizes(g, seeds, num_sims, seed).astype(np.float64)
    mean = float(sizes.mean())
    sd = float(sizes.std(ddof=1)) if num_sims > 1 else 0.0
    return SpreadEstimate(mean, sd / math.sqrt(num_sims), int(num_sims))
