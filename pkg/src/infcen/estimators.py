"""Two-phase RR-set estimators for Shapley and single-node-influence centrality.

Phase 1 searches for a lower bound ``LB`` on the k-th largest centrality by
halving a target ``x`` until the running estimate clears it.  Phase 2 draws a
fresh batch of ``theta`` RR sets, sized from ``LB``, and turns the per-node
sums into centralities.  Shapley mode credits ``1/|R|`` to every member of a
set, SNI mode credits ``1``.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numba
import numpy as np

from . import rrset
from .rng import DOMAIN_PHASE1, DOMAIN_PHASE2

SHAPLEY = "shapley"
SNI = "sni"
MODES = (SHAPLEY, SNI)

DEFAULT_THETA_CAP = 1 << 40


class ThetaOverflowError(OverflowError):
    """Requested sample count is above the configured cap."""


@dataclass(frozen=True)
class NodeWeights:
    w: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if w.ndim != 1 or np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValueError("node weights must be finite and non-negative")
        object.__setattr__(self, "w", w)

    @property
    def total(self):
        return float(self.w.sum())


@dataclass(frozen=True)
class EstimatorParams:
    epsilon: float = 0.5
    ell: float = 1.0
    k: int = 50
    seed: int = 0
    mode: str = SHAPLEY
    weights: NodeWeights | None = None
    near_linear: bool = False
    theta_cap: int = DEFAULT_THETA_CAP

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")

    def validate_for(self, n):
        # the near-linear variant always uses k = 1
        if self.k > n and not self.near_linear:
            raise ValueError(f"k={self.k} exceeds the number of nodes {n}")
        if self.weights is not None:
            if self.weights.w.shape[0] != n:
                raise ValueError("need one weight per node")
            if self.weights.total <= 0:
                raise ValueError("total node weight must be positive")


@dataclass(frozen=True)
class CentralityResult:
    estimates: np.ndarray
    theta_phase1: int
    theta: int
    lb: float
    mode: str
    wall_time: float
    stats: dict = field(default_factory=dict)

    def ranking(self):
        """Node ids by estimate descending, ties by id ascending."""
        return np.lexsort((np.arange(self.estimates.shape[0]), -self.estimates))


def theta_i(n, epsilon_prime, ell, x, cap=DEFAULT_THETA_CAP):
    """Phase-1 sample count for target ``x``."""
    if x <= 0:
        raise ValueError("x must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    ep = epsilon_prime
    val = n * ((ell + 1) * math.log(n) + math.log(math.log2(n)) + math.log(2)) * (2 + 2 * ep / 3)
    val /= ep * ep * x
    return _ceil_capped(val, cap)


def theta_final(n, epsilon, ell, lb, cap=DEFAULT_THETA_CAP):
    """Phase-2 sample count given the lower bound ``lb``."""
    if lb < 1:
        raise ValueError("lb must be at least 1")
    if n < 2:
        raise ValueError("n must be at least 2")
    val = n * ((ell + 1) * math.log(n) + math.log(4)) * (2 + 2 * epsilon / 3)
    val /= epsilon * epsilon * lb
    return _ceil_capped(val, cap)


def _ceil_capped(val, cap):
    if not math.isfinite(val) or val > cap:
        raise ThetaOverflowError(f"required sample count {val:.4g} exceeds cap {cap}")
    return max(1, math.ceil(val))


def kth_largest(values, k):
    """k-th largest entry, duplicates counted."""
    a = np.asarray(values)
    if not 1 <= k <= a.shape[0]:
        raise ValueError(f"k={k} out of range for {a.shape[0]} values")
    return a[np.argpartition(a, a.shape[0] - k)[a.shape[0] - k]]


def set_threads(threads=None):
    """Set the numba worker count (``INFCEN_THREADS`` when ``threads`` is None)."""
    if threads is None:
        env = os.environ.get("INFCEN_THREADS")
        if not env:
            return
        threads = int(env)
    numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


class _Sampler:
    """Runs accumulator batches against one graph with fixed root distribution."""

    def __init__(self, g, seed, weights):
        self.g = g
        self.seed = np.uint64(seed)
        if weights is None:
            self.root_mode = rrset.ROOT_UNIFORM
            self.cum = np.zeros(1)
            self.scale = float(g.n)
        else:
            self.root_mode = rrset.ROOT_WEIGHTED
            self.cum = rrset.cumulative_weights(weights.w)
            self.scale = weights.total
        self.total_size = 0
        self.total_width = 0

    def batch(self, domain, start, count, inc_mode):
        g = self.g
        acc, size, width = rrset.accumulate_rr(
            g.in_ptr, g.in_src, g.in_prob, g.in_log_fail, self.seed, domain, start, count,
            rrset.block_count(g.n, count), self.root_mode, self.cum, inc_mode,
        )
        self.total_size += int(size)
        self.total_width += int(width)
        return acc


def _increment(mode):
    return rrset.INC_SHAPLEY if mode == SHAPLEY else rrset.INC_COUNT


def estimate_fixed_theta(g, theta, mode=SHAPLEY, seed=0, weights=None, threads=None):
    """Phase 2 alone: ``theta`` RR sets, no lower-bound search."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if theta < 1:
        raise ValueError("theta must be at least 1")
    set_threads(threads)
    t0 = time.perf_counter()
    sampler = _Sampler(g, seed, weights)
    est = sampler.batch(DOMAIN_PHASE2, 0, int(theta), _increment(mode))
    return CentralityResult(
        estimates=sampler.scale * est / theta,
        theta_phase1=0,
        theta=int(theta),
        lb=1.0,
        mode=mode,
        wall_time=time.perf_counter() - t0,
        stats={"rr_members": sampler.total_size, "rr_width": sampler.total_width},
    )


def run(g, params, threads=None):
    """ASV-RR / ASNI-RR (and the weighted and near-linear variants) on ``g``."""
    params.validate_for(g.n)
    set_threads(threads)
    t0 = time.perf_counter()
    n = g.n
    if n == 1:
        only = params.weights.total if params.weights is not None else 1.0
        return CentralityResult(np.array([only]), 0, 0, 1.0, params.mode, time.perf_counter() - t0)

    sampler = _Sampler(g, params.seed, params.weights)
    eps, ell = params.epsilon, params.ell
    k = 1 if params.near_linear else int(params.k)
    phase1_inc = rrset.INC_COUNT if params.near_linear else _increment(params.mode)
    eps1 = math.sqrt(2.0) * eps

    lb = 1.0
    est = np.zeros(n)
    theta_prev = 0
    iterations = int(math.floor(math.log2(n))) - 1
    for i in range(1, iterations + 1):
        x = n / 2.0**i
        th = theta_i(n, eps1, ell, x, params.theta_cap)
        if th > theta_prev:
            est += sampler.batch(DOMAIN_PHASE1, theta_prev, th - theta_prev, phase1_inc)
            theta_prev = th
        top = sampler.scale * kth_largest(est, k) / th
        if top >= (1.0 + eps1) * x:
            lb = top / (1.0 + eps1)
            break
    phase1_sets = theta_prev

    theta = theta_final(n, eps, ell, lb, params.theta_cap)
    est = sampler.batch(DOMAIN_PHASE2, 0, theta, _increment(params.mode))
    return CentralityResult(
        estimates=sampler.scale * est / theta,
        theta_phase1=phase1_sets,
        theta=theta,
        lb=lb,
        mode=params.mode,
        wall_time=time.perf_counter() - t0,
        stats={"rr_members": sampler.total_size, "rr_width": sampler.total_width},
    )
