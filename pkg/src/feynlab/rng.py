"""Counter-based random streams.

Every draw is a pure function of ``(seed, stream, counter)``: the stream key is
derived from the experiment seed and a stream index (usually a path or sample
index), and the ``i``-th output of a stream is the SplitMix64 finaliser applied
to ``key + (i + 1) * GAMMA``.  Ensembles are therefore reproducible regardless
of how the work is chunked or ordered.

The compiled kernels in :mod:`feynlab._core` implement the same arithmetic, so
both backends consume identical integer streams.
"""
from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
TWO_M53 = 2.0**-53


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int) -> int:
    """Key of stream ``stream`` under experiment seed ``seed`` (both unsigned 64-bit)."""
    return mix64((seed & MASK64) ^ mix64(((stream + 1) * GAMMA) & MASK64))


def raw(key: int, counter: int) -> int:
    return mix64((key + (counter + 1) * GAMMA) & MASK64)


def to_unit(bits: int) -> float:
    """Map 64 random bits to a double in (0, 1]."""
    return ((bits >> 11) + 1) * TWO_M53


class CounterStream:
    """One keyed stream with a running counter, for scalar Python-level sampling."""

    def __init__(self, seed: int, stream: int = 0, counter: int = 0):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.stream = stream
        self.key = stream_key(seed, stream)
        self.counter = counter

    def uniform(self) -> float:
        u = to_unit(raw(self.key, self.counter))
        self.counter += 1
        return u

    def exponential(self, rate: float) -> float:
        if rate <= 0.0:
            return math.inf
        return -math.log(self.uniform()) / rate

    def normal_pair(self) -> tuple[float, float]:
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        return r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)

    def spawn(self, stream: int) -> "CounterStream":
        return CounterStream(self.seed, stream)


# -- vectorised numpy versions (uint64 arithmetic wraps modulo 2**64) ---------

_G = np.uint64(GAMMA)
_M1 = np.uint64(MIX1)
_M2 = np.uint64(MIX2)


def mix64_np(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= _M1
        z ^= z >> np.uint64(27)
        z *= _M2
        z ^= z >> np.uint64(31)
    return z


def stream_keys_np(seed: int, streams: np.ndarray) -> np.ndarray:
    s = np.asarray(streams, dtype=np.uint64)
    with np.errstate(over="ignore"):
        inner = mix64_np((s + np.uint64(1)) * _G)
    return mix64_np(np.uint64(seed & MASK64) ^ inner)


def uniforms_np(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Uniforms in (0, 1] for broadcastable arrays of keys and counters."""
    k = np.asarray(keys, dtype=np.uint64)
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = mix64_np(k + (c + np.uint64(1)) * _G)
    return ((bits >> np.uint64(11)).astype(np.float64) + 1.0) * TWO_M53
