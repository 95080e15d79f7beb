"""Reverse-reachable (RR) set sampling.

An RR set is built by a reverse BFS from a root: when a node first joins the
set its in-edges are flipped as independent coins, and every in-neighbour
whose coin lands joins the set.  Edges into already-visited nodes are never
drawn, so the cost of one set is proportional to its width (the total
in-degree of its members) plus one.

The batch kernels below never store sets.  They split a range of sample
indices into a fixed number of blocks, each with its own accumulator row,
and add the rows up in block order.  Sample ``i`` always uses stream
``(seed, domain, i)``, so the output does not depend on the thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numba import prange

from .rng import Stream, next_below, next_uniform, next_weighted, stream_state

ROOT_UNIFORM = 0
ROOT_WEIGHTED = 1

INC_SHAPLEY = 0  # add 1/|R| to every member
INC_COUNT = 1  # add 1 to every member

BLOCK_TARGET = 4096
MAX_BLOCKS = 16
BLOCK_MEMORY_BUDGET = 1 << 28  # bytes across all block-local arrays


@dataclass(frozen=True)
class RRSet:
    root: int
    members: np.ndarray  # sorted node ids, root included
    width: int

    def __len__(self):
        return int(self.members.shape[0])

    def __contains__(self, v):
        i = np.searchsorted(self.members, v)
        return bool(i < self.members.shape[0] and self.members[i] == v)


@numba.njit(cache=True)
def rr_walk(in_ptr, in_src, in_prob, in_log_fail, root, state, mark, stamp, buf):
    """Reverse BFS from ``root``; members land in ``buf[:size]``.

    ``mark[v] == stamp`` flags visited nodes, so callers can reuse ``mark``
    across sets by bumping ``stamp``.  Returns ``(size, width, state)``.

    Nodes whose in-edges share one probability (``in_log_fail`` finite) jump
    between successful coins with geometric gaps; other nodes flip one coin
    per in-edge from an unvisited neighbour.
    """
    buf[0] = root
    mark[root] = stamp
    head = 0
    size = 1
    width = 0
    while head < size:
        u = buf[head]
        head += 1
        lo = in_ptr[u]
        hi = in_ptr[u + 1]
        width += hi - lo
        lf = in_log_fail[u]
        if lf == lf:
            if lf == 0.0:
                continue
            e = lo
            while True:
                if lf != -np.inf:
                    state, r = next_uniform(state)
                    gap = np.log(1.0 - r) / lf
                    if gap >= hi - e:
                        break
                    e += int(gap)
                if e >= hi:
                    break
                w = in_src[e]
                if mark[w] != stamp:
                    mark[w] = stamp
                    buf[size] = w
                    size += 1
                e += 1
        else:
            for e in range(lo, hi):
                w = in_src[e]
                if mark[w] != stamp:
                    state, r = next_uniform(state)
                    if r < in_prob[e]:
                        mark[w] = stamp
                        buf[size] = w
                        size += 1
    return size, width, state


@numba.njit(cache=True, inline="always")
def _draw_root(state, n, root_mode, cum_weights):
    if root_mode == ROOT_WEIGHTED:
        return next_weighted(state, cum_weights)
    return next_below(state, n)


@numba.njit(cache=True, parallel=True)
def accumulate_rr(in_ptr, in_src, in_prob, in_log_fail, seed, domain, start, count, nblocks,
                  root_mode, cum_weights, inc_mode):
    """Generate RR sets ``start .. start+count-1`` and return per-node sums.

    Returns ``(acc, total_size, total_width)`` where ``acc[v]`` sums the
    per-set increment over sets containing ``v``.
    """
    n = in_ptr.shape[0] - 1
    rows = np.zeros((nblocks, n))
    marks = np.zeros((nblocks, n), dtype=np.int64)
    bufs = np.empty((nblocks, n), dtype=np.int64)
    sizes = np.zeros(nblocks, dtype=np.int64)
    widths = np.zeros(nblocks, dtype=np.int64)
    per = count // nblocks
    extra = count % nblocks
    for b in prange(nblocks):
        lo = start + b * per + min(b, extra)
        hi = lo + per + (1 if b < extra else 0)
        row = rows[b]
        mark = marks[b]
        buf = bufs[b]
        tot_size = 0
        tot_width = 0
        for idx in range(lo, hi):
            state = stream_state(seed, domain, idx)
            state, root = _draw_root(state, n, root_mode, cum_weights)
            size, width, state = rr_walk(in_ptr, in_src, in_prob, in_log_fail, root, state,
                                         mark, idx - start + 1, buf)
            inc = 1.0 / size if inc_mode == INC_SHAPLEY else 1.0
            for j in range(size):
                row[buf[j]] += inc
            tot_size += size
            tot_width += width
        sizes[b] = tot_size
        widths[b] = tot_width
    return _merge_rows(rows), sizes.sum(), widths.sum()


@numba.njit(cache=True)
def _merge_rows(rows):
    """Column sums in block order with Neumaier compensation."""
    nblocks, n = rows.shape
    acc = np.zeros(n)
    for v in range(n):
        s = 0.0
        c = 0.0
        for b in range(nblocks):
            x = rows[b, v]
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        acc[v] = s + c
    return acc


@numba.njit(cache=True, parallel=True)
def rr_sizes(in_ptr, in_src, in_prob, in_log_fail, seed, domain, count, nblocks):
    """Sizes of RR sets ``0 .. count-1`` (first pass of :func:`collect_rr`)."""
    n = in_ptr.shape[0] - 1
    out = np.empty(count, dtype=np.int64)
    marks = np.zeros((nblocks, n), dtype=np.int64)
    bufs = np.empty((nblocks, n), dtype=np.int64)
    dummy = np.zeros(1)
    per = count // nblocks
    extra = count % nblocks
    for b in prange(nblocks):
        lo = b * per + min(b, extra)
        hi = lo + per + (1 if b < extra else 0)
        for idx in range(lo, hi):
            state = stream_state(seed, domain, idx)
            state, root = _draw_root(state, n, ROOT_UNIFORM, dummy)
            size, width, state = rr_walk(in_ptr, in_src, in_prob, in_log_fail, root, state,
                                         marks[b], idx + 1, bufs[b])
            out[idx] = size
    return out


@numba.njit(cache=True, parallel=True)
def rr_fill(in_ptr, in_src, in_prob, in_log_fail, seed, domain, offsets, nblocks):
    """Second pass: regenerate every set and write sorted members at ``offsets``."""
    n = in_ptr.shape[0] - 1
    count = offsets.shape[0] - 1
    flat = np.empty(offsets[count], dtype=np.int64)
    marks = np.zeros((nblocks, n), dtype=np.int64)
    bufs = np.empty((nblocks, n), dtype=np.int64)
    dummy = np.zeros(1)
    per = count // nblocks
    extra = count % nblocks
    for b in prange(nblocks):
        lo = b * per + min(b, extra)
        hi = lo + per + (1 if b < extra else 0)
        buf = bufs[b]
        for idx in range(lo, hi):
            state = stream_state(seed, domain, idx)
            state, root = _draw_root(state, n, ROOT_UNIFORM, dummy)
            size, width, state = rr_walk(in_ptr, in_src, in_prob, in_log_fail, root, state,
                                         marks[b], idx + 1, buf)
            flat[offsets[idx]:offsets[idx + 1]] = np.sort(buf[:size])
    return flat


def block_count(n, count):
    """Number of accumulator blocks for a batch; depends only on (n, count)."""
    by_work = max(1, count // BLOCK_TARGET)
    by_memory = max(1, BLOCK_MEMORY_BUDGET // (24 * max(n, 1)))
    return int(min(MAX_BLOCKS, by_work, by_memory))


def cumulative_weights(weights):
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or np.any(~np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and non-negative")
    cum = np.cumsum(w)
    if cum.shape[0] == 0 or cum[-1] <= 0:
        raise ValueError("total weight must be positive")
    return cum


# --------------------------------------------------------------------------
# single-set API


def _scratch(g):
    return np.zeros(g.n, dtype=np.int64), np.empty(g.n, dtype=np.int64)


def sample_rr_from(g, root, stream):
    """One RR set rooted at ``root``, drawn from ``stream`` (an :class:`rng.Stream`)."""
    if not 0 <= root < g.n:
        raise ValueError(f"root {root} out of range for n={g.n}")
    mark, buf = _scratch(g)
    size, width, stream.state = rr_walk(
        g.in_ptr, g.in_src, g.in_prob, g.in_log_fail, np.int64(root), stream.state, mark, 1, buf
    )
    return RRSet(int(root), np.sort(buf[:size]), int(width))


def sample_rr_uniform(g, stream):
    if g.n == 0:
        raise ValueError("cannot sample an RR set from an empty graph")
    stream.state, root = next_below(stream.state, g.n)
    return sample_rr_from(g, root, stream)


def sample_rr_weighted(g, cum_weights, stream):
    """RR set whose root is drawn proportionally to the node weights.

    ``cum_weights`` is the running sum from :func:`cumulative_weights`.
    """
    cum = np.asarray(cum_weights, dtype=np.float64)
    if cum.shape[0] != g.n:
        raise ValueError("need one cumulative weight per node")
    if cum[-1] <= 0:
        raise ValueError("total weight must be positive")
    stream.state, root = next_weighted(stream.state, cum)
    return sample_rr_from(g, root, stream)


def collect_rr(g, count, seed, domain, max_members=None):
    """Generate and store ``count`` uniform-root RR sets.

    Returns ``(offsets, flat)``: set ``i`` is ``flat[offsets[i]:offsets[i+1]]``
    (sorted).  Raises ``MemoryError`` if the sets would hold more than
    ``max_members`` entries in total.
    """
    if g.n == 0:
        raise ValueError("cannot sample RR sets from an empty graph")
    nb = block_count(g.n, count)
    sizes = rr_sizes(g.in_ptr, g.in_src, g.in_prob, g.in_log_fail, np.uint64(seed), domain, count, nb)
    offsets = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    if max_members is not None and offsets[-1] > max_members:
        raise MemoryError(
            f"{count} RR sets need {offsets[-1]} stored entries (cap {max_members})"
        )
    flat = rr_fill(g.in_ptr, g.in_src, g.in_prob, g.in_log_fail, np.uint64(seed), domain, offsets, nb)
    return offsets, flat


__all__ = [
    "RRSet",
    "Stream",
    "sample_rr_from",
    "sample_rr_uniform",
    "sample_rr_weighted",
    "cumulative_weights",
    "accumulate_rr",
    "block_count",
]
