"""Routing via a small/big light-child split.

A light child v of u is big when level(v) > level(u) - c, otherwise small.
Big children keep individual grid-rounded spans; the routing table stores,
for every possible big span value, how many big children have it (< 2^c
each, c bits per counter).  All small children share one region subdivided
by a harmonic sequence: slot j has length floor(small'/j), and the j-th
largest small child lives in slot j.

Both sides must agree on the set of possible big span values.  It is
derived from (b, c, level(u)) alone via an exact per-level cap on
span/size for heavy-path heads, computed by the same integer recursion in
the encoder and the decoder.  The cap is deliberately generous (a few
factor-2 slacks); that costs a handful of extra counters, never
correctness, which the encoder enforces by assertion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .bits import bits_to_uint, pack_parts, uint_to_bits, unpack_parts
from .numeric import BoundExp, ceil_mul_exp2, round_pow
from .tree import Tree, canonical_ports, decompose

_SH = 64  # fixed-point shift for the span/size factor table


@lru_cache(maxsize=None)
def _span_factor(b, c, lev):
    """Fixed-point (2^-64 scaled) cap on span(u1)/|T_{u1}| for heads at the
    given level."""
    if lev <= 0:
        return 1 << _SH
    cand = _span_factor(b, c, lev - 1)
    if lev >= c:
        fs = _span_factor(b, c, lev - c)
        # largest possible small' at a node of this level
        smallcap = (((1 << (lev + 1)) * fs) >> _SH) + 1
        smallp = round_pow(smallcap + 1, b).value
        bits = smallp.bit_length() + 2
        cand = max(cand, 4 * fs * bits)
    # bound rounding plus head grid forcing
    return ceil_mul_exp2(cand + 1, 2, b) + 1


@lru_cache(maxsize=None)
def big_span_values(b, c, lev):
    """Possible spans of big children of a level-lev node, descending."""
    if lev < 1 or c < 2:
        return ()
    lo = 1 << max(0, lev - c + 1)
    hi = ((((1 << lev) - 1) * _span_factor(b, c, lev - 1)) >> _SH) + 1
    vals = []
    t = round_pow(lo, b).t
    while True:
        v = BoundExp(t, b).value
        if v > hi:
            break
        if not vals or v != vals[-1]:
            vals.append(v)
        t += 1
    return tuple(reversed(vals))


def harmonic_total(m):
    """sum of floor(m/j) for j=1..m, by divisor blocks."""
    s = 0
    j = 1
    while j <= m:
        q = m // j
        j2 = m // q
        s += q * (j2 - j + 1)
        j = j2 + 1
    return s


def harmonic_slot(m, off):
    """Smallest j with off < sum_{i<=j} floor(m/i), for 0 <= off < total."""
    s = 0
    j = 1
    while j <= m:
        q = m // j
        j2 = m // q
        block = q * (j2 - j + 1)
        if off < s + block:
            return j + (off - s) // q
        s += block
        j = j2 + 1
    raise ValueError("offset outside the harmonic region")


@dataclass(frozen=True)
class PrelimLabel:
    start: int
    bound: BoundExp
    small_t: int        # exponent of small', or -1 when no small children
    rt: tuple           # big-child counts, one per possible value, descending
    level: int


def encode_prelim(t: Tree, b, c, checks=None):
    if b < 1 or c < 1:
        raise ValueError("b and c must be >= 1")
    h = decompose(t)
    p = canonical_ports(t, h)
    n = t.n
    start = [0] * n
    bound = [None] * n
    small_t = [-1] * n
    rt = [()] * n

    def shift_subtree(v, off):
        stack = [v]
        while stack:
            x = stack.pop()
            start[x] += off
            stack.extend(t.children[x])

    def do_path(head):
        # assigns starts relative to the head at 0; returns grid span
        path = [head]
        while h.heavy_child[path[-1]] != -1:
            path.append(h.heavy_child[path[-1]])
        a = 0
        for u in path:
            start[u] = a
            a += 1
            lights = [v for v in p.order[u] if v != h.heavy_child[u]]
            nbig = 0
            while nbig < len(lights) and h.level[lights[nbig]] > h.level[u] - c:
                nbig += 1
            bigs, smalls = lights[:nbig], lights[nbig:]
            if bigs:
                spans = [do_path(v) for v in bigs]
                # restore non-increasing spans in port order: the counters
                # only record the multiset, so the decoder replays them in
                # descending order
                for j in range(len(spans) - 2, -1, -1):
                    spans[j] = max(spans[j], spans[j + 1])
                vals = big_span_values(b, c, h.level[u])
                counts = {}
                for v, sp in zip(bigs, spans):
                    shift_subtree(v, a)
                    a += sp
                    counts[sp] = counts.get(sp, 0) + 1
                assert all(sp in set(vals) for sp in counts), (counts, vals)
                assert all(x < (1 << c) for x in counts.values())
                rt[u] = tuple(counts.get(v, 0) for v in vals)
            else:
                rt[u] = tuple(0 for _ in big_span_values(b, c, h.level[u]))
            if smalls:
                spans = [do_path(v) for v in smalls]
                need = max(sum(spans),
                           max(j * sp for j, sp in enumerate(spans, start=1)))
                sm = round_pow(need, b)
                small_t[u] = sm.t
                m = sm.value
                base = a
                pref = 0
                for j, (v, sp) in enumerate(zip(smalls, spans), start=1):
                    slot = m // j
                    assert sp <= slot, (sp, slot, j)
                    shift_subtree(v, base + pref)
                    pref += slot
                a = base + harmonic_total(m)
        end = a
        end_max = end
        for u in path:
            bound[u] = round_pow(end - start[u], b)
            end_max = max(end_max, start[u] + bound[u].value)
        sp = round_pow(end_max, b)
        if sp.value > bound[head].value:
            bound[head] = sp
        if checks is not None:
            checks.append(("head-span-cap", head, end_max,
                           ((1 << (h.level[head] + 1)) - 1)
                           * _span_factor(b, c, h.level[head]) >> _SH))
        return bound[head].value

    do_path(t.root)
    return ([PrelimLabel(start[u], bound[u], small_t[u], rt[u], h.level[u])
             for u in range(n)], p)


def route_prelim(lu: PrelimLabel, lw: PrelimLabel, b, c):
    if not lu.start < lw.start < lu.start + lu.bound.value:
        return 0
    q = lw.start - lu.start
    s = 0
    port = 2
    for val, cnt in zip(big_span_values(b, c, lu.level), lu.rt):
        for _ in range(cnt):
            s += val
            if q <= s:
                return port
            port += 1
    if lu.small_t >= 0:
        m = BoundExp(lu.small_t, b).value
        total = harmonic_total(m)
        if q <= s + total:
            return port + harmonic_slot(m, q - s - 1) - 1
    return 1


def pack_prelim(label: PrelimLabel, c):
    counters = "".join(uint_to_bits(x, c) for x in label.rt)
    small = "" if label.small_t < 0 else "1" + uint_to_bits(
        label.small_t, label.small_t.bit_length())
    return pack_parts([
        uint_to_bits(label.start, label.start.bit_length()),
        uint_to_bits(label.bound.t, label.bound.t.bit_length()),
        small,
        counters,
        uint_to_bits(label.level, label.level.bit_length()),
    ])


def unpack_prelim(bits, b, c) -> PrelimLabel:
    s, tb, small, counters, lev = unpack_parts(bits)
    level = bits_to_uint(lev)
    nvals = len(big_span_values(b, c, level))
    if len(counters) != nvals * c:
        raise ValueError("routing table size mismatch")
    return PrelimLabel(
        bits_to_uint(s),
        BoundExp(bits_to_uint(tb), b),
        bits_to_uint(small[1:]) if small else -1,
        tuple(bits_to_uint(counters[i * c:(i + 1) * c]) for i in range(nvals)),
        level,
    )
