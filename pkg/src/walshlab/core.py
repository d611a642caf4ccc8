"""Exact Boolean functions on {-1,1}^p and integer Walsh-Hadamard transforms.

Point encoding: mask ``m`` in ``[0, 2**p)`` is the point with coordinates
``x_i = (-1)**((m >> i) & 1)``, so the Walsh character of mask ``J`` evaluates
to ``w_J(x_m) = (-1)**popcount(m & J)``.  A truth table stores bit ``m`` set
iff ``f(x_m) = -1``; the all-zero table is the constant ``+1`` function.

All spectral arithmetic is done on unnormalized integers ``S_J = sum_x f(x) w_J(x)``;
divide by ``N = 2**p`` only for presentation.
"""

from __future__ import annotations

import re
from fractions import Fraction
from dataclasses import dataclass
from math import comb

import numpy as np

MAX_P = 24
WHT_ENTRY_LIMIT = 2**32

WBF_MAGIC = "WBF1"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _check_p(p: int) -> None:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise TypeError(f"p must be an integer, got {p!r}")
    if not 1 <= p <= MAX_P:
        raise ValueError(f"p must be in [1, {MAX_P}], got {p}")


def _check_degree(p: int, d: int) -> None:
    if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
        raise TypeError(f"d must be an integer, got {d!r}")
    if not 0 <= d <= p:
        raise ValueError(f"degree d must be in [0, {p}], got {d}")


def mask_degrees(p: int) -> np.ndarray:
    """popcount of every mask in ``[0, 2**p)``."""
    return np.bitwise_count(np.arange(1 << p, dtype=np.uint32)).astype(np.int8)


def low_masks(p: int, d: int) -> np.ndarray:
    """Masks of degree <= d in increasing order (``K_d`` of them)."""
    _check_degree(p, d)
    return np.flatnonzero(mask_degrees(p) <= d)


def walsh_sign(points, masks) -> np.ndarray:
    """``w_J(x_m)`` for broadcastable arrays of point masks and character masks."""
    parity = np.bitwise_count(np.bitwise_and(np.asarray(points), np.asarray(masks))) & 1
    return (1 - 2 * parity.astype(np.int64)).astype(np.int64)


_LOW_BITS = 5
_HADAMARD_CACHE: dict[int, np.ndarray] = {}


def _hadamard(k: int) -> np.ndarray:
    if k not in _HADAMARD_CACHE:
        idx = np.arange(1 << k)
        _HADAMARD_CACHE[k] = walsh_sign(idx[:, None], idx[None, :]).astype(np.float64)
    return _HADAMARD_CACHE[k]


def _butterfly(a: np.ndarray, h: int = 1) -> np.ndarray:
    # in-place unnormalized Hadamard butterflies along the last axis of a 2-D array,
    # starting at stride h (bits below log2(h) assumed already transformed)
    rows, n = a.shape
    tmp = np.empty(rows * n // 2, dtype=a.dtype)
    while h < n:
        v = a.reshape(rows, n // (2 * h), 2, h)
        lo = v[:, :, 0, :]
        hi = v[:, :, 1, :]
        t = tmp.reshape(rows, n // (2 * h), h)
        np.copyto(t, lo)
        lo += hi
        np.subtract(t, hi, out=hi)
        h *= 2
    return a


def _float_transform(a: np.ndarray, n: int) -> np.ndarray:
    # all stages as float64 Hadamard matmuls of at most 5 bits each; exact because every
    # partial sum is an integer bounded by bound * n < 2**53
    x = a.astype(np.float64)
    bits, inner = n.bit_length() - 1, 1
    stages = -(-bits // _LOW_BITS)
    for i in range(stages):
        k = (bits + i) // stages  # balanced chunks, e.g. 16 bits -> 4, 4, 4, 4
        v = x.reshape(-1, 1 << k, inner)
        x = v.reshape(-1, 1 << k) @ _hadamard(k) if inner == 1 else np.matmul(_hadamard(k), v)
        inner <<= k
    return x.astype(np.int64).reshape(a.shape)


def _transform(a: np.ndarray, bound: int) -> np.ndarray:
    # a: 2-D int64 rows; bound: max |entry|.  Every intermediate is a signed sum of
    # at most N entries, so bound * N decides whether int32 is safe.
    rows, n = a.shape
    if bound * n < 2**53:
        return _float_transform(a, n)
    k = min(_LOW_BITS, n.bit_length() - 1)
    dtype = np.int32 if bound * n < 2**31 else np.int64
    if k:
        # float64 is exact here: |partial sums| <= 2**32 * 2**5 < 2**53
        low = a.reshape(-1, 1 << k).astype(np.float64) @ _hadamard(k)
        work = low.astype(dtype).reshape(rows, n)
    else:
        work = a.astype(dtype)
    _butterfly(work, 1 << k)
    return work.astype(np.int64, copy=False)


def wht(values) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform.

    Returns ``out[J] = sum_m values[m] * (-1)**popcount(m & J)``.  A 2-D input is
    transformed row by row.  The transform is self-inverse up to a factor
    ``N``: ``wht(wht(v)) == N * v``.

    Raises ``ValueError`` if the length is not a power of two (at most
    ``2**24``) or if any entry exceeds ``2**32`` in magnitude, which is the
    bound that keeps every intermediate inside int64.
    """
    a = np.asarray(values)
    if a.dtype.kind not in "iub":
        raise TypeError(f"wht requires an integer array, got dtype {a.dtype}")
    if a.ndim not in (1, 2):
        raise ValueError("wht accepts a 1-D vector or a 2-D batch of vectors")
    n = a.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError(f"length {n} is not a power of two")
    if n > 1 << MAX_P:
        raise ValueError(f"length {n} exceeds 2**{MAX_P}")
    flat = np.asarray(a, dtype=np.int64).reshape(-1, n)
    bound = int(np.abs(flat).max()) if flat.size else 0
    if bound > WHT_ENTRY_LIMIT:
        raise ValueError("entry magnitude exceeds 2**32; transform could overflow int64")
    return _transform(flat, bound).reshape(a.shape)


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """A truth table ``f: {-1,1}^p -> {-1,1}``, bit-packed little-endian.

    ``packed`` holds ``ceil(2**p / 8)`` bytes; bit ``m`` (byte ``m // 8``,
    bit ``m % 8``) is 1 iff ``f(x_m) = -1``.  Padding bits beyond ``2**p`` are 0.
    """

    p: int
    packed: bytes

    def __post_init__(self):
        _check_p(self.p)
        n = 1 << self.p
        if len(self.packed) != (n + 7) // 8:
            raise ValueError(f"packed table must be {(n + 7) // 8} bytes for p={self.p}")
        if n < 8 and self.packed[0] >> n:
            raise ValueError("padding bits beyond 2**p must be zero")

    @property
    def n(self) -> int:
        return 1 << self.p

    @classmethod
    def from_bits(cls, p: int, bits) -> "BooleanFunction":
        _check_p(p)
        b = np.asarray(bits, dtype=np.uint8)
        if b.shape != (1 << p,):
            raise ValueError(f"expected {1 << p} bits, got shape {b.shape}")
        if np.any(b > 1):
            raise ValueError("bits must be 0 or 1")
        return cls(p, np.packbits(b, bitorder="little").tobytes())

    @classmethod
    def from_signs(cls, p: int, signs) -> "BooleanFunction":
        s = np.asarray(signs)
        if not np.all((s == 1) | (s == -1)):
            raise ValueError("signs must be +1 or -1")
        return cls.from_bits(p, (s < 0).astype(np.uint8))

    @classmethod
    def constant(cls, p: int, value: int = 1) -> "BooleanFunction":
        return cls.from_signs(p, np.full(1 << p, value, dtype=np.int8))

    @classmethod
    def character(cls, p: int, mask: int) -> "BooleanFunction":
        """The Walsh character ``w_J`` for ``J = mask``; ``mask = 2**p - 1`` is full parity."""
        return cls.from_signs(p, walsh_sign(np.arange(1 << p), mask))

    def bits(self) -> np.ndarray:
        raw = np.frombuffer(self.packed, dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.n]

    def signs(self) -> np.ndarray:
        """Values ``f(x_m)`` as an int64 array of +-1."""
        return 1 - 2 * self.bits().astype(np.int64)

    def flip(self, points) -> "BooleanFunction":
        bits = self.bits().copy()
        bits[np.asarray(list(points), dtype=np.int64)] ^= 1
        return BooleanFunction.from_bits(self.p, bits)

    def __neg__(self) -> "BooleanFunction":
        return BooleanFunction.from_bits(self.p, 1 - self.bits())

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.p == other.p and self.packed == other.packed

    def __hash__(self):
        return hash((self.p, self.packed))

    def to_wbf(self) -> str:
        chars = np.where(self.bits() == 1, ord("-"), ord("+")).astype(np.uint8)
        return f"{WBF_MAGIC}\n{self.p}\n{chars.tobytes().decode('ascii')}\n"

    @classmethod
    def from_wbf(cls, text: str) -> "BooleanFunction":
        return parse_wbf(text)


_DECIMAL = re.compile(r"[0-9]+")


def parse_wbf(text: str) -> BooleanFunction:
    """Parse the three-line ``WBF1`` truth-table format.

    Exactly ``WBF1``, a decimal ``p``, and ``2**p`` characters from ``+-``, each on
    its own line; a single trailing newline is allowed and nothing else.
    """
    lines = text.split("\n")
    if len(lines) == 4 and lines[3] == "":
        lines = lines[:3]
    if len(lines) != 3:
        raise ValueError("WBF1 input must have exactly three lines")
    magic, p_line, table = lines
    if magic != WBF_MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {WBF_MAGIC!r}")
    if not _DECIMAL.fullmatch(p_line):
        raise ValueError(f"bad dimension line {p_line!r}")
    p = int(p_line)
    _check_p(p)
    if len(table) != 1 << p:
        raise ValueError(f"truth table has {len(table)} characters, expected {1 << p}")
    if set(table) - {"+", "-"}:
        raise ValueError("truth table may only contain '+' and '-'")
    bits = np.frombuffer(table.encode("ascii"), dtype=np.uint8) == ord("-")
    return BooleanFunction.from_bits(p, bits.astype(np.uint8))


def read_wbf(path) -> BooleanFunction:
    with open(path, encoding="ascii", newline="") as fh:
        return parse_wbf(fh.read())


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Integer coefficients ``S_J`` for all ``2**p`` masks."""

    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_p(self.p)
        c = np.array(self.coeffs, dtype=np.int64)
        if c.shape != (1 << self.p,):
            raise ValueError(f"expected {1 << self.p} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", _readonly(c))

    @property
    def n(self) -> int:
        return 1 << self.p

    def degrees(self) -> np.ndarray:
        return mask_degrees(self.p)

    def fourier(self, mask: int):
        """Normalized coefficient ``S_J / N`` as an exact fraction."""
        return Fraction(int(self.coeffs[mask]), self.n)

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LowFrequencyData:
    """The ``K_d`` coefficients ``S_J`` with ``|J| <= d``, mask-ascending."""

    p: int
    d: int
    entries: np.ndarray

    def __post_init__(self):
        _check_degree(self.p, self.d)
        e = np.array(self.entries, dtype=np.int64)
        k = sum(comb(self.p, j) for j in range(self.d + 1))
        if e.shape != (k,):
            raise ValueError(f"expected K_d={k} entries, got shape {e.shape}")
        object.__setattr__(self, "entries", _readonly(e))

    def key(self) -> bytes:
        """Exact hashable key: equal keys iff equal data."""
        return self.entries.tobytes()

    def __eq__(self, other):
        if not isinstance(other, LowFrequencyData):
            return NotImplemented
        return (self.p, self.d) == (other.p, other.d) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.p, self.d, self.key()))


@dataclass(frozen=True, eq=False)
class TruncationResult:
    """Numerators of the degree-d truncation: ``q_d(x_m) = t_m / N``, ``r_d(x_m) = rho_m / N``."""

    p: int
    d: int
    trunc_numerators: np.ndarray
    residual_numerators: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "trunc_numerators", _readonly(np.asarray(self.trunc_numerators, dtype=np.int64)))
        object.__setattr__(self, "residual_numerators", _readonly(np.asarray(self.residual_numerators, dtype=np.int64)))

    @property
    def n(self) -> int:
        return 1 << self.p


def spectrum(f: BooleanFunction) -> Spectrum:
    return Spectrum(f.p, wht(f.signs()))


def low_frequency_data(s: Spectrum, d: int) -> LowFrequencyData:
    return LowFrequencyData(s.p, d, s.coeffs[low_masks(s.p, d)])


def truncate(f: BooleanFunction, d: int) -> TruncationResult:
    """Degree-d Walsh-Fourier truncation and its residual, in integer numerators."""
    _check_degree(f.p, d)
    signs = f.signs()
    s = wht(signs)
    s[mask_degrees(f.p) > d] = 0
    t = wht(s)
    return TruncationResult(f.p, d, t, f.n * signs - t)


def truncate_batch(signs: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Batched :func:`truncate` on rows of +-1 values; returns ``(t, rho)``."""
    signs = np.asarray(signs, dtype=np.int64)
    n = signs.shape[-1]
    p = n.bit_length() - 1
    _check_degree(p, d)
    s = wht(signs)
    s[..., mask_degrees(p) > d] = 0
    t = wht(s)
    return t, n * signs - t
