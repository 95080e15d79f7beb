"""Directed probabilistic graphs: storage, edge-list I/O, and probability schemes.

A :class:`Graph` keeps both adjacency directions in CSR form so the samplers
can walk in-edges (reverse reachability) and out-edges (forward cascades)
without touching Python objects.
"""

from __future__ import annotations

import io
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""


@dataclass(frozen=True)
class WC:
    """Weighted cascade: p(u, v) = 1 / in_degree(v)."""


@dataclass(frozen=True)
class PR:
    """PageRank-based probabilities on the edge-reversed graph."""

    restart: float = 0.15
    tol: float = 1e-12
    max_iters: int = 1000

    def __post_init__(self):
        if not 0.0 < self.restart < 1.0:
            raise ValueError(f"restart must lie in (0, 1), got {self.restart}")


@dataclass(frozen=True)
class Const:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"constant probability must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class FromFile:
    """Use the third column of every edge line."""


ProbScheme = WC | PR | Const | FromFile


def _csr(keys, n, *columns):
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return (ptr,) + tuple(c[order] for c in columns)


def _uniform_log_fail(ptr, prob):
    """Per node: log(1 - p) if all its in-edges share probability p, else NaN.

    Nodes with p == 1 get -inf and nodes without in-edges get 0.
    """
    n = ptr.shape[0] - 1
    out = np.full(n, np.nan)
    deg = np.diff(ptr)
    has = deg > 0
    out[~has] = 0.0
    if prob.shape[0]:
        starts = ptr[:-1][has]
        lo = np.minimum.reduceat(prob, starts)
        hi = np.maximum.reduceat(prob, starts)
        same = lo == hi
        with np.errstate(divide="ignore"):
            vals = np.log1p(-lo)
        idx = np.flatnonzero(has)
        out[idx[same]] = vals[same]
    return out


class Graph:
    """Immutable directed graph on nodes ``0..n-1`` with edge probabilities.

    Edges are stored in insertion order in ``src``, ``dst`` and ``prob``;
    ``in_ptr/in_src/in_prob`` and ``out_ptr/out_dst/out_prob`` are the CSR
    views used by the samplers.  ``labels`` maps dense ids back to input
    labels and ``meta`` carries scheme statistics (e.g. PR clamping counts).
    """

    def __init__(self, n, src, dst, prob, labels=None, meta=None):
        src = np.ascontiguousarray(src, dtype=np.int64)
        dst = np.ascontiguousarray(dst, dtype=np.int64)
        prob = np.ascontiguousarray(prob, dtype=np.float64)
        if not (src.shape == dst.shape == prob.shape) or src.ndim != 1:
            raise ValueError("src, dst and prob must be equal-length 1-d arrays")
        n = int(n)
        if n < 0:
            raise ValueError("n must be non-negative")
        m = src.shape[0]
        if m:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(src == dst):
                raise ValueError("self-loops are not allowed")
            if np.any(~((prob >= 0.0) & (prob <= 1.0))):
                raise ValueError("edge probabilities must lie in [0, 1]")
            keys = src * n + dst
            if np.unique(keys).shape[0] != m:
                raise ValueError("duplicate directed edge")
        self.n = n
        self.src, self.dst, self.prob = src, dst, prob
        for a in (src, dst, prob):
            a.setflags(write=False)
        self.in_ptr, self.in_src, self.in_prob = _csr(dst, n, src, prob)
        self.out_ptr, self.out_dst, self.out_prob = _csr(src, n, dst, prob)
        self.in_degree = np.diff(self.in_ptr)
        self.in_log_fail = _uniform_log_fail(self.in_ptr, self.in_prob)
        self.out_degree = np.diff(self.out_ptr)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(n)]
        if len(self.labels) != n:
            raise ValueError("labels must have one entry per node")
        self.meta = dict(meta or {})

    @property
    def m(self):
        return int(self.src.shape[0])

    @property
    def edges(self):
        return [(int(u), int(v), float(p)) for u, v, p in zip(self.src, self.dst, self.prob)]

    @property
    def in_adj(self):
        return [
            [(int(u), float(p)) for u, p in zip(self.in_src[a:b], self.in_prob[a:b])]
            for a, b in zip(self.in_ptr[:-1], self.in_ptr[1:])
        ]

    @property
    def out_adj(self):
        return [
            [(int(v), float(p)) for v, p in zip(self.out_dst[a:b], self.out_prob[a:b])]
            for a, b in zip(self.out_ptr[:-1], self.out_ptr[1:])
        ]

    def with_probs(self, prob, **meta):
        """Same topology, new probabilities (aligned with ``self.src``)."""
        merged = dict(self.meta)
        merged.update(meta)
        return Graph(self.n, self.src, self.dst, prob, self.labels, merged)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    @classmethod
    def from_edges(cls, n, edges, labels=None):
        """Build from ``(u, v, p)`` triples."""
        if edges:
            u, v, p = (np.asarray(c) for c in zip(*edges))
        else:
            u = v = np.zeros(0, dtype=np.int64)
            p = np.zeros(0)
        return cls(n, u, v, p, labels)


# --------------------------------------------------------------------------
# probability schemes


def assign_wc(g):
    """Every edge (u, v) gets probability 1 / in_degree(v)."""
    return g.with_probs(1.0 / g.in_degree[g.dst], scheme="wc")


@dataclass
class PageRankResult:
    scores: np.ndarray
    converged: bool
    iterations: int
    residual: float = field(default=0.0)


def pagerank(g, restart=0.15, tol=1e-12, max_iters=1000):
    """PageRank on the edge-reversed, unweighted graph.

    Edge (u, v) becomes a vote from v to u.  Teleport is uniform and the mass
    of nodes without votes to give (no in-edges in ``g``) is spread uniformly.
    """
    n = g.n
    if n < 1:
        raise ValueError("pagerank needs at least one node")
    voter, target = g.dst, g.src
    outdeg = g.in_degree.astype(np.float64)
    dangling = outdeg == 0
    share = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, outdeg))
    r = np.full(n, 1.0 / n)
    residual = math.inf
    for it in range(1, max_iters + 1):
        flow = np.bincount(target, weights=r[voter] * share[voter], minlength=n)
        nxt = (1.0 - restart) * (flow + r[dangling].sum() / n) + restart / n
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - r).sum())
        r = nxt
        if residual < tol:
            return PageRankResult(r, True, it, residual)
    warnings.warn(f"pagerank did not converge in {max_iters} iterations (residual {residual:.3g})")
    return PageRankResult(r, False, max_iters, residual)


def undirected_edge_count(g):
    """Number of unordered node pairs joined by at least one edge."""
    lo = np.minimum(g.src, g.dst)
    hi = np.maximum(g.src, g.dst)
    return int(np.unique(lo * g.n + hi).shape[0])


def assign_pr(g, restart=0.15, tol=1e-12, max_iters=1000):
    """p(u, v) = min(1, r(u) / (r(u) + r(v)) * n / (2 m_undirected))."""
    if g.m == 0:
        return g.with_probs(g.prob, scheme="pr", pr_clamped=0)
    res = pagerank(g, restart, tol, max_iters)
    r = res.scores
    raw = r[g.src] / (r[g.src] + r[g.dst]) * (g.n / (2.0 * undirected_edge_count(g)))
    clamped = int(np.count_nonzero(raw > 1.0))
    return g.with_probs(
        np.minimum(raw, 1.0),
        scheme="pr",
        pr_clamped=clamped,
        pr_converged=res.converged,
    )


def apply_scheme(g, scheme):
    if isinstance(scheme, WC):
        return assign_wc(g)
    if isinstance(scheme, PR):
        return assign_pr(g, scheme.restart, scheme.tol, scheme.max_iters)
    if isinstance(scheme, Const):
        return g.with_probs(np.full(g.m, scheme.p), scheme="const")
    if isinstance(scheme, FromFile):
        return g.with_probs(g.prob, scheme="file")
    raise TypeError(f"unknown probability scheme {scheme!r}")


def parse_scheme(text):
    """Parse ``wc``, ``pr``, ``pr:0.2``, ``const:0.1`` or ``file``."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "wc":
        return WC()
    if name == "pr":
        return PR(restart=float(arg)) if arg else PR()
    if name == "const":
        if not arg:
            raise ValueError("const scheme needs a probability, e.g. const:0.1")
        return Const(float(arg))
    if name in ("file", "fromfile", "ln"):
        return FromFile()
    raise ValueError(f"unknown probability scheme {text!r}")


# --------------------------------------------------------------------------
# edge-list I/O


def _lines(text_source):
    if isinstance(text_source, (str, bytes)) and not isinstance(text_source, os.PathLike):
        if isinstance(text_source, bytes):
            text_source = text_source.decode()
        return io.StringIO(text_source)
    return text_source


def load_edge_list(text_source, directed=True, scheme=FromFile()):
    """Parse a whitespace-separated edge list.

    ``text_source`` is either the text itself or an iterable of lines (an
    open file works).  Data lines are ``u v`` or ``u v p``; lines starting
    with ``#`` and blank lines are skipped.  Labels are mapped to dense ids
    in order of first appearance.  Undirected input adds both directions.
    """
    ids = {}
    labels = []
    src, dst, prob = [], [], []
    seen = set()

    def node(label):
        i = ids.get(label)
        if i is None:
            i = ids[label] = len(labels)
            labels.append(label)
        return i

    def add(u, v, p, lineno):
        if (u, v) in seen:
            raise GraphFormatError(
                f"line {lineno}: duplicate edge {labels[u]} -> {labels[v]}"
            )
        seen.add((u, v))
        src.append(u)
        dst.append(v)
        prob.append(p)

    for lineno, raw in enumerate(_lines(text_source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'u v' or 'u v p', got {line!r}")
        p = math.nan
        if len(parts) == 3:
            try:
                p = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: bad probability {parts[2]!r}") from None
            if not 0.0 <= p <= 1.0:
                raise GraphFormatError(f"line {lineno}: probability {p} outside [0, 1]")
        elif isinstance(scheme, FromFile):
            raise GraphFormatError(f"line {lineno}: missing probability column")
        if parts[0] == parts[1]:
            raise GraphFormatError(f"line {lineno}: self-loop on {parts[0]!r}")
        u, v = node(parts[0]), node(parts[1])
        add(u, v, p, lineno)
        if not directed:
            add(v, u, p, lineno)

    if isinstance(scheme, FromFile):
        arr = np.asarray(prob, dtype=np.float64)
    else:
        arr = np.zeros(len(prob))
    g = Graph(len(labels), np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64), arr, labels)
    return apply_scheme(g, scheme)


def read_edge_list(path, directed=True, scheme=FromFile()):
    with open(path) as fh:
        return load_edge_list(fh, directed, scheme)


def format_prob(p, digits=9):
    return f"{p:.{digits}g}"


def serialize(g, digits=9, labels=False):
    """Render ``g`` as ``u v p`` lines (dense ids unless ``labels``)."""
    names = g.labels if labels else [str(i) for i in range(g.n)]
    return "".join(
        f"{names[u]} {names[v]} {format_prob(p, digits)}\n"
        for u, v, p in zip(g.src.tolist(), g.dst.tolist(), g.prob.tolist())
    )


def serialize_id_map(g):
    """Sidecar lines ``label id``."""
    return "".join(f"{label} {i}\n" for i, label in enumerate(g.labels))
