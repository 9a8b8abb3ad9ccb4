"""Exact integer numerics shared by the labeling schemes.

Everything here is integer-only: rounding to the floor(2^(t/b)) grid, the
mantissa/exponent ("two parts") rounding, the nonincreasing-sequence codec
and the broadword rank dictionary.  No floating point is used anywhere so
encoder output is bit-identical across platforms.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

WORD_BITS = 64


def iroot(x, k):
    """Floor of the integer k-th root, Newton + exact fixup."""
    if x < 0 or k < 1:
        raise ValueError("iroot domain")
    if x == 0 or k == 1:
        return x
    bl = x.bit_length()
    if bl > 64:
        # ~36-bit-accurate float seed (kept slightly above the root so the
        # descent loop below stays monotone), worth it for huge operands
        rb = ((bl - 53) + math.log2(x >> (bl - 53))) / k
        ip = max(0, int(rb) - 40)
        r = int(2 ** (rb - ip)) << ip
        r += (r >> 25) + 1
    else:
        r = 1 << ((bl + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


@lru_cache(maxsize=None)
def pow_floor(t, b):
    """floor(2^(t/b)), exactly."""
    if t < 0 or b < 1:
        raise ValueError("pow_floor domain")
    q, r = divmod(t, b)
    if r == 0:
        return 1 << q
    if t <= 256:
        return iroot(1 << t, b)
    # estimate from the cached fractional power, certify by comparison
    prec = q + 16
    m = (_frac_pow2_fixed(r, b, prec) << q) >> prec
    t2 = 1 << t
    while m ** b > t2:
        m -= 1
    while (m + 1) ** b <= t2:
        m += 1
    return m


class BoundExp(NamedTuple):
    """A value floor(2^(t/b)) kept as its exponent."""

    t: int
    b: int

    @property
    def value(self):
        return pow_floor(self.t, self.b)


def round_pow(x, b) -> BoundExp:
    """Smallest t with floor(2^(t/b)) >= x.

    floor(2^(t/b)) >= x  iff  2^t >= x^b for integer x, so the minimal t is
    the bit length of x^b - 1.
    """
    if x < 1:
        raise ValueError("round_pow needs x >= 1")
    t = (x ** b - 1).bit_length()
    return BoundExp(t, b)


class GridRounder:
    """round_pow against one fixed base, amortized.

    The grid floor(2^(t/b)) is materialized lazily into a sorted list so a
    rounding query is a single bisect; this is what the encoders use when
    they round one bound per node.
    """

    __slots__ = ("b", "vals")

    def __init__(self, b):
        if b < 1:
            raise ValueError("b must be >= 1")
        self.b = b
        self.vals = [1]

    def round_t(self, x):
        """Smallest t with floor(2^(t/b)) >= x; agrees with round_pow."""
        if x < 1:
            raise ValueError("round_t needs x >= 1")
        b = self.b
        vals = self.vals
        hi = b * x.bit_length()
        while len(vals) <= hi:
            vals.append(pow_floor(len(vals), b))
        # floor(2^(t/b)) has bit length floor(t/b)+1, which pins the answer
        # to a b-wide window
        return bisect_left(vals, x, max(0, hi - b), hi + 1)


_frac_cache = {}


def _frac_pow2_fixed(r, den, prec):
    # floor(2^(r/den) * 2^prec); cached at the highest precision seen so far
    # and shifted down (floor of a floor is still the floor)
    key = (r, den)
    p, f = _frac_cache.get(key, (0, 0))
    if p < prec:
        p = max(prec, 2 * p, WORD_BITS)
        f = iroot(1 << (r + p * den), den)
        _frac_cache[key] = (p, f)
    return f >> (p - prec)


def ceil_mul_exp2(x, num, den):
    """ceil(x * 2^(num/den)), exactly.

    The fractional part is located with a fixed-point estimate whose
    precision scales with the operand, then verified by integer power
    comparison, so the result never depends on platform arithmetic.
    """
    if x == 0:
        return 0
    if x < 0 or num < 0 or den < 1:
        raise ValueError("ceil_mul_exp2 domain")
    q, r = divmod(num, den)
    y = x << q
    if r == 0:
        return y
    prec = y.bit_length() + 8
    m = (y * _frac_pow2_fixed(r, den, prec)) >> prec
    target = (y ** den) << r
    while m ** den < target:
        m += 1
    while m > 1 and (m - 1) ** den >= target:
        m -= 1
    return m


# ---------------------------------------------------------------------------
# two-parts (mantissa * 2^exponent) rounding


@dataclass(frozen=True)
class TwoParts:
    m: int          # mantissa, fits in mbits
    e: int          # exponent
    mbits: int

    @property
    def value(self):
        return self.m << self.e

    def key(self, ebits):
        """Flatten to the integer whose bits are e followed by m; at equal
        widths this ordering coincides with numeric order."""
        if self.e >= (1 << ebits):
            raise ValueError("exponent field overflow")
        return (self.e << self.mbits) | self.m


def two_parts_round(x, mbits, round_up=True) -> TwoParts:
    """Keep the mbits most significant bits of x.

    round_up=True bumps the mantissa when any dropped bit was set (the
    stored value is then >= x, within factor 1 + 2^-(mbits-1)); round_up=False
    truncates, giving the largest representable value <= x.
    """
    if mbits < 2:
        raise ValueError("mbits must be >= 2")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return TwoParts(0, 0, mbits)
    e = max(0, x.bit_length() - mbits)
    m = x >> e
    if round_up and (m << e) != x:
        m += 1
        if m.bit_length() > mbits:
            m >>= 1
            e += 1
    return TwoParts(m, e, mbits)


# ---------------------------------------------------------------------------
# nonincreasing-sequence codec


def encode_monotone(seq, z):
    """Encode a nonincreasing sequence of at most z integers from [0, z].

    A 0-bit decrements a counter that starts at z, a 1-bit emits it.  The
    output is at most 2z bits.
    """
    if len(seq) > z:
        raise ValueError("sequence longer than z")
    out = []
    counter = z
    for v in seq:
        if v < 0 or v > z:
            raise ValueError("value out of [0, z]")
        if v > counter:
            raise ValueError("sequence not nonincreasing")
        out.append("0" * (counter - v))
        out.append("1")
        counter = v
    return "".join(out)


def decode_monotone(bits, z, count=None):
    """Inverse of encode_monotone.  With count=None every emit in the bit
    string is returned."""
    seq = []
    counter = z
    for ch in bits:
        if ch == "0":
            counter -= 1
            if counter < 0:
                raise ValueError("corrupt monotone stream")
        else:
            seq.append(counter)
    if count is not None and len(seq) != count:
        raise ValueError("element count mismatch")
    return seq


# ---------------------------------------------------------------------------
# broadword rank dictionary


class RankDict:
    """Packed sorted keys answering rank(x) = |{a_i < x}| in O(1) word ops.

    Keys are stored as 1.a_1.1.a_2...1.a_k (nondecreasing).  A query
    replicates x next to every key with one multiplication, subtracts, masks
    the borrow bits and counts them with a second multiplication.  When the
    packed form exceeds one machine word it is split into word-sized blocks,
    each queried the same way; the block count is what the constant-time
    contract charges.
    """

    __slots__ = ("k", "width", "s", "blocks", "keys")

    def __init__(self, keys, width):
        if width < 1:
            raise ValueError("width must be positive")
        prev = None
        for a in keys:
            if a < 0 or a.bit_length() > width:
                raise ValueError("key does not fit the width")
            if prev is not None and a < prev:
                raise ValueError("keys must be sorted nondecreasing")
            prev = a
        self.k = len(keys)
        self.width = width
        self.keys = tuple(keys)
        # keys per machine-word block; the per-field sum in the counting
        # multiply must itself fit in width+1 bits
        per_block = max(1, min(WORD_BITS // (width + 1), (1 << (width + 1)) - 1))
        blocks = []
        for i in range(0, len(keys), per_block):
            chunk = keys[i:i + per_block]
            s = 0
            for a in chunk:
                s = (s << (width + 1)) | (1 << width) | a
            blocks.append((s, len(chunk)))
        self.blocks = blocks
        self.s = blocks[0][0] if len(blocks) == 1 else None

    def bit_size(self):
        return self.k * (self.width + 1)

    def rank(self, x, counter=None):
        """Number of stored keys strictly below x."""
        if counter is not None:
            counter.ops += 2
        if x < 0:
            return 0
        w = self.width
        if x.bit_length() > w:
            return self.k
        total = 0
        for s, kb in self.blocks:
            if counter is not None:
                counter.ops += 6
            rep = ((1 << (kb * (w + 1))) - 1) // ((1 << (w + 1)) - 1)
            diff = s - x * rep
            high = diff & (rep << w)
            # ones collide in the lowest block of the product
            ge = ((high >> w) * rep) >> ((kb - 1) * (w + 1)) & ((1 << (w + 1)) - 1)
            total += kb - ge
        return total


def rank_build(keys, width) -> RankDict:
    return RankDict(list(keys), width)


def rank_naive(keys, x):
    return sum(1 for a in keys if a < x)
