"""Counter-based random streams.

Every stochastic routine in the package draws from a SplitMix64 stream keyed
by ``(master_seed, stream_index)``.  Output ``i`` of a stream is a pure
function of the key and the draw counter, so trial ``t`` of block ``b`` is
reproducible no matter how many workers run, and the same stream can be
consumed from Python or from inside numba kernels with identical results.

The generator is defined twice on purpose: once as numba functions for the
kernels and once in plain Python for ``RandomStream`` (numba hands uint64
results back as unbounded ints, which poisons re-dispatch).  The test suite
pins the two implementations against each other.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_M64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(cache=True)
def mix64(z):
    """SplitMix64 finalizer: a bijective avalanche mix on uint64."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def stream_state(master_seed, stream_index):
    """Initial state of stream ``stream_index`` under ``master_seed``."""
    a = mix64(master_seed + _GOLDEN)
    b = mix64(stream_index * _GOLDEN + _MIX1)
    return mix64(a ^ b)


@njit(cache=True)
def next_u64(state):
    """Advance a stream: returns (new_state, uniform uint64)."""
    state = state + _GOLDEN
    return state, mix64(state)


@njit(cache=True)
def u64_to_unit(x):
    """Map a uint64 to a double in [0, 1) using the top 53 bits."""
    return np.float64(x >> np.uint64(11)) * _INV53


def _py_mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def _py_stream_state(master_seed: int, stream_index: int) -> int:
    a = _py_mix64((master_seed + 0x9E3779B97F4A7C15) & _M64)
    b = _py_mix64((stream_index * 0x9E3779B97F4A7C15 + 0xBF58476D1CE4E5B9) & _M64)
    return _py_mix64(a ^ b)


class RandomStream:
    """Python-side view of one counter-based stream.

    A ``RandomStream`` and a kernel given the same
    ``(master_seed, stream_index)`` produce the same draw sequence.
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed) & _M64
        self.stream_index = int(stream_index) & _M64
        self._state = _py_stream_state(self.master_seed, self.stream_index)

    def substream(self, index: int) -> "RandomStream":
        """Derive an independent stream keyed by (master_seed, stream_index,
        index); never depends on how many draws this stream has made."""
        derived = _py_mix64(
            _py_stream_state(self.master_seed, self.stream_index)
            ^ _py_mix64(((index & _M64) + 0x9E3779B97F4A7C15) & _M64)
        )
        return RandomStream(derived, index)

    def next_uint64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _M64
        return _py_mix64(self._state)

    def next_float(self) -> float:
        return (self.next_uint64() >> 11) * _INV53

    def randint(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo bias is negligible for the
        small n used here (n <= a few thousand)."""
        return self.next_uint64() % n

    def colors(self, ground_size: int, cum_weights: np.ndarray,
               packed_bits: int = 0) -> np.ndarray:
        """Color draws, consuming the stream exactly as the kernels do."""
        from . import kernels  # deferred: kernels imports this module

        out = np.empty(ground_size, dtype=np.uint8)
        state = np.uint64(self._state)
        if packed_bits > 0:
            state = kernels.fill_colors_packed(state, out, packed_bits)
        else:
            state = kernels.fill_colors_scan(state, out, cum_weights)
        self._state = int(state) & _M64
        return out
