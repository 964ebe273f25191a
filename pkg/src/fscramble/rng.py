"""Counter-based random number generation for reproducible parallel ensembles.

All Monte Carlo engines draw their randomness from splitmix64 streams.  A
trajectory's stream is keyed by ``(master_seed, trajectory_index)`` only, so
ensemble results are bit-identical regardless of how trajectories are
scheduled across threads.

splitmix64 (Steele, Lea, Flood 2014): the state advances by a fixed odd
constant (a Weyl sequence) and the output is a bijective mix of the state.
Distinct streams are obtained by hashing the trajectory index into the
starting state.
"""

import numba
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM = np.uint64(0xD1342543DE82EF95)

_U53 = 1.0 / float(1 << 53)


@numba.njit(numba.uint64(numba.uint64), cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@numba.njit(numba.uint64(numba.uint64, numba.uint64), cache=True)
def stream_state(master_seed, index):
    """Initial splitmix64 state for stream `index` of `master_seed`."""
    return _mix(_mix(master_seed ^ (np.uint64(index + 1) * _STREAM)) + GOLDEN)


@numba.njit(numba.types.UniTuple(numba.uint64, 2)(numba.uint64), cache=True,
            inline="always")
def next_u64(state):
    """Advance the stream; returns (value, new_state)."""
    state = state + GOLDEN
    return _mix(state), state


@numba.njit(numba.types.Tuple((numba.float64, numba.uint64))(numba.uint64),
            cache=True, inline="always")
def next_uniform(state):
    """Uniform double in [0, 1); returns (value, new_state)."""
    z, state = next_u64(state)
    return float(z >> np.uint64(11)) * _U53, state


@numba.njit(numba.types.Tuple((numba.int64, numba.uint64))(
    numba.int64, numba.uint64), cache=True, inline="always")
def next_below(n, state):
    """Uniform integer in [0, n); returns (value, new_state).

    Uses the modulo reduction; the bias is < n / 2**64 and irrelevant for the
    lattice sizes used here.
    """
    z, state = next_u64(state)
    return np.int64(z % np.uint64(n)), state


class SplitMix64:
    """Python-side view of the same stream, for tests and light sampling."""

    def __init__(self, master_seed, index=0):
        self._state = stream_state(np.uint64(master_seed), np.uint64(index))

    def u64(self):
        z, self._state = next_u64(self._state)
        return int(z)

    def uniform(self):
        z, self._state = next_uniform(self._state)
        return float(z)

    def below(self, n):
        z, self._state = next_below(n, self._state)
        return int(z)

    def shuffle(self, arr):
        for i in range(len(arr) - 1, 0, -1):
            j = self.below(i + 1)
            arr[i], arr[j] = arr[j], arr[i]
