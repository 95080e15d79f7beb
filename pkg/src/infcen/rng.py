"""Index-keyed SplitMix64 streams.

Every random draw in the package comes from a stream derived from
``(seed, domain, index)``.  Parallel workers never share a stream, and the
value of any sample depends only on its index, so results do not change
with the worker count.
"""

import numba
import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

# Stream domains keep phase-1, phase-2, simulation, and greedy draws disjoint.
DOMAIN_PHASE1 = 1
DOMAIN_PHASE2 = 2
DOMAIN_SPREAD = 3
DOMAIN_GREEDY = 4
DOMAIN_SAMPLER = 5


@numba.njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@numba.njit(cache=True)
def stream_state(seed, domain, index):
    """Initial state of the stream for sample ``index`` in ``domain``."""
    s = mix64(np.uint64(seed) + _GAMMA)
    s = mix64(s ^ (np.uint64(domain) * _M1))
    return mix64(s + np.uint64(index) * _GAMMA)


@numba.njit(cache=True, inline="always")
def next_uniform(state):
    """Advance ``state``; return ``(new_state, u)`` with u uniform in [0, 1)."""
    state = state + _GAMMA
    z = mix64(state)
    return state, float(z >> _S11) * _INV53


@numba.njit(cache=True, inline="always")
def next_below(state, n):
    """Uniform integer in ``[0, n)``."""
    state, u = next_uniform(state)
    r = int(u * n)
    if r >= n:
        r = n - 1
    return state, r


@numba.njit(cache=True, inline="always")
def next_weighted(state, cum_weights):
    """Index drawn with probability proportional to the increments of ``cum_weights``."""
    state, u = next_uniform(state)
    total = cum_weights[cum_weights.shape[0] - 1]
    r = np.searchsorted(cum_weights, u * total, side="right")
    n = cum_weights.shape[0]
    # u * total < total, so r < n except for rounding at the top end
    while r >= n or (r > 0 and cum_weights[r] == cum_weights[r - 1]):
        r -= 1
    return state, r


class Stream:
    """Python-side handle on one stream, for the single-sample helpers."""

    def __init__(self, seed, domain=DOMAIN_SAMPLER, index=0):
        self.state = stream_state(np.uint64(seed), domain, index)

    @property
    def state(self):
        return self._state

    @state.setter
    def state(self, value):
        self._state = np.uint64(value)

    def uniform(self):
        self.state, u = next_uniform(self.state)
        return u
