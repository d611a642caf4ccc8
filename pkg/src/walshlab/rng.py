"""Seeded substreams: SplitMix64 key derivation and xoshiro256** bit blocks.

The contract, fixed so results are reproducible across runs and thread counts:

* ``substream_key(seed, index) = splitmix64_mix(seed ^ (GOLDEN * index mod 2**64))``
  where ``splitmix64_mix(z)`` is one SplitMix64 step (add ``GOLDEN``, then the
  finalizer).
* The xoshiro256** state is four consecutive SplitMix64 outputs seeded with the key.
* A truth table of ``N = 2**p`` bits is filled from successive 64-bit outputs,
  least significant bit first: bit ``j`` of output ``w`` is table bit ``64*w + j``.
  For ``p < 6`` only the low ``N`` bits of the first output are used.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix64_mix(x: int) -> int:
    """One SplitMix64 output for state ``x`` (state is advanced by ``GOLDEN`` first)."""
    return _finalize((x + GOLDEN) & MASK64)


def splitmix64(seed: int, count: int) -> list[int]:
    """The first ``count`` outputs of SplitMix64 started at ``seed``."""
    out = []
    state = seed & MASK64
    for _ in range(count):
        state = (state + GOLDEN) & MASK64
        out.append(_finalize(state))
    return out


def substream_key(seed: int, index: int) -> int:
    if index < 0:
        raise ValueError("substream index must be nonnegative")
    return splitmix64_mix((seed & MASK64) ^ ((GOLDEN * index) & MASK64))


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """Scalar xoshiro256** generator (reference implementation)."""

    def __init__(self, key: int | None = None, state=None):
        if state is None:
            state = splitmix64(key, 4)
        if len(state) != 4 or not any(state):
            raise ValueError("xoshiro256** needs four words, not all zero")
        self.s = [int(w) & MASK64 for w in state]

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound


def _vrotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


def xoshiro_blocks(keys, words: int) -> np.ndarray:
    """``words`` outputs from each of ``len(keys)`` independent xoshiro256** streams.

    Vectorized across streams; returns a ``(len(keys), words)`` uint64 array whose
    rows equal what :class:`Xoshiro256` produces for the same key.
    """
    states = np.array([splitmix64(int(k), 4) for k in keys], dtype=np.uint64).reshape(-1, 4)
    s0, s1, s2, s3 = (states[:, i].copy() for i in range(4))
    out = np.empty((len(states), words), dtype=np.uint64)
    five, nine, seventeen = np.uint64(5), np.uint64(9), np.uint64(17)
    for w in range(words):
        out[:, w] = _vrotl(s1 * five, 7) * nine
        t = s1 << seventeen
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _vrotl(s3, 45)
    return out


def sample_bits(p: int, keys) -> np.ndarray:
    """Truth-table bits (uint8, shape ``(len(keys), 2**p)``) for each substream key."""
    n = 1 << p
    blocks = xoshiro_blocks(keys, max(1, n // 64))
    raw = blocks.astype("<u8").view(np.uint8).reshape(len(blocks), -1)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :n]


def sample_signs(p: int, seed: int, indices) -> np.ndarray:
    """+-1 truth tables (int64) for substreams ``indices`` of ``seed``."""
    keys = [substream_key(seed, int(i)) for i in indices]
    return 1 - 2 * sample_bits(p, keys).astype(np.int64)
