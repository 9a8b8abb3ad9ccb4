"""Routing for bounded-degree trees: explicit per-child span tables.

Same ID layout as the ancestry scheme, except the span of every heavy-path
head is itself rounded up to the floor(2^(t/b)) grid (by enlarging the
head's bound if needed).  Each path node then stores the rounded spans of
its light children in port order; the decoder routes by a prefix-sum scan
over those spans.  Table size is deg(u)-1 entries, so this is only compact
when the degree is bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import bits_to_uint, pack_parts, uint_to_bits, unpack_parts
from .numeric import BoundExp, round_pow
from .tree import Tree, canonical_ports, decompose


@dataclass(frozen=True)
class BdLabel:
    start: int
    bound: BoundExp
    rt: tuple          # rounded spans of light children, port order 2..deg


def encode_bd(t: Tree, b):
    if b < 1:
        raise ValueError("b must be >= 1")
    h = decompose(t)
    p = canonical_ports(t, h)
    start = [0] * t.n
    bound = [None] * t.n
    rt = [()] * t.n

    def do_path(head, s):
        # returns span(head), already on the grid
        path = [head]
        while h.heavy_child[path[-1]] != -1:
            path.append(h.heavy_child[path[-1]])
        a = s
        for u in path:
            start[u] = a
            a += 1
            spans = []
            for v in p.order[u]:
                if v == h.heavy_child[u]:
                    continue
                sp = do_path(v, a)
                spans.append(sp)
                a += sp
            rt[u] = tuple(spans)
        end_max = a
        for u in path:
            bound[u] = round_pow(a - start[u], b)
            end_max = max(end_max, start[u] + bound[u].value)
        span = round_pow(end_max - s, b)
        if span.value > bound[head].value:
            bound[head] = span
        return bound[head].value

    do_path(t.root, 0)
    return [BdLabel(start[u], bound[u], rt[u]) for u in range(t.n)], p


def route_bd(lu: BdLabel, lw: BdLabel):
    if not lu.start < lw.start < lu.start + lu.bound.value:
        return 0
    off = lw.start - lu.start
    acc = 0
    for j, sp in enumerate(lu.rt):
        acc += sp
        if off <= acc:
            return j + 2
    return 1


def _rt_field_width(b, clog_n):
    # span exponents satisfy t <= b*log(span) and span <= n*2^((log n + 1)/b),
    # so (b+1)(clog_n+1) bounds every t stored in a table entry
    return max(1, ((b + 1) * (clog_n + 1)).bit_length())


def pack_bd(label: BdLabel, b, clog_n):
    tw = _rt_field_width(b, clog_n)
    rt_bits = "".join(
        uint_to_bits(round_pow(sp, b).t, tw) for sp in label.rt
    )
    return pack_parts([
        uint_to_bits(label.start, label.start.bit_length()),
        uint_to_bits(label.bound.t, label.bound.t.bit_length()),
        rt_bits,
    ])


def unpack_bd(bits, b, clog_n) -> BdLabel:
    s, tb, rt_bits = unpack_parts(bits)
    tw = _rt_field_width(b, clog_n)
    if len(rt_bits) % tw:
        raise ValueError("corrupt routing table field")
    rt = tuple(
        BoundExp(bits_to_uint(rt_bits[i:i + tw]), b).value
        for i in range(0, len(rt_bits), tw)
    )
    return BdLabel(bits_to_uint(s), BoundExp(bits_to_uint(tb), b), rt)


def bd_bits(label: BdLabel, b, clog_n):
    return len(pack_bd(label, b, clog_n))
