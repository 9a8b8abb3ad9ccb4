"""Segment-reservation routing with a single global rounding base b.

Per path node, light children are bucketed into classes (segment lengths
round to the class boundary x2 * 2^(12*floor(log x2)/b)) and groups (one
shared length per group, monotone-coded into rt).  The decoder rebuilds
class boundary values and group sizes from (b, floor(log lw), level,
ceil(log(deg-1))) and scans groups for the child slot holding start(w).

b below 6 breaks no routing, only the length analysis; encode and route
clamp to 6 unless explicitly told otherwise (the bounded-depth
configuration runs unclamped with b=1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .bits import bits_to_uint, pack_parts, uint_to_bits, unpack_parts
from .grouping import (boundary_table, ceil_log2, encode_engine, group_sizes,
                       plan_walk)
from .numeric import BoundExp, ceil_mul_exp2, decode_monotone
from .tree import Tree

MIN_B = 6


@dataclass(frozen=True)
class TwelveExpFormula:
    """Boundary and segment formulas with the 2^(12k/b) rounding allowance."""

    anchor_class = "class-boundary-12"
    anchor_rcap = "assign-sl-guarantee-12"
    anchor_span = "span-le-sl-12"

    def boundary(self, x2, b):
        return ceil_mul_exp2(x2, 12 * (x2.bit_length() - 1), b)

    def sl(self, size, level, b):
        return ceil_mul_exp2(size, 12 * level, b)

    def class_allow(self, sl_v, k, b):
        return ceil_mul_exp2(sl_v, 3 * k, b)

    def r_cap(self, size, level, b):
        return ceil_mul_exp2(size, 12 * level - 1, b)


INTERM_FORMULA = TwelveExpFormula()


class IntermLabel(NamedTuple):
    start: int
    bound: BoundExp
    rt: str
    floor_log_lw: int
    level: int
    ceil_log_degm1: int


def effective_b(b, clamp=True):
    if b < 1:
        raise ValueError("b must be >= 1")
    return max(MIN_B, b) if clamp else b


def encode_interm(t: Tree, b, clamp=True, checks=None):
    be = effective_b(b, clamp)
    res = encode_engine(t, INTERM_FORMULA, lambda _flw: be, be,
                        reserve=False, checks=checks)
    labels = [IntermLabel(res.start[u], BoundExp(res.bound_t[u], be),
                          res.rt[u], res.floor_log_lw[u], res.level[u],
                          res.ceil_log_degm1[u])
              for u in range(t.n)]
    return labels, res.ports


def route_interm(lu: IntermLabel, lw: IntermLabel, b, clamp=True):
    be = effective_b(b, clamp)
    if not lu.start < lw.start < lu.start + lu.bound.value:
        return 0
    l = min(lu.floor_log_lw + 1, lu.level)
    values, _ = boundary_table(INTERM_FORMULA, be, l)
    gs = group_sizes(be, lu.ceil_log_degm1)
    z = max(len(values), len(gs))
    seq = decode_monotone(lu.rt, z)
    slot = plan_walk(values, z, seq, gs, lw.start - lu.start)
    return slot + 2 if slot >= 0 else 1


def pack_interm(label: IntermLabel):
    return pack_parts([
        uint_to_bits(label.start, label.start.bit_length()),
        uint_to_bits(label.bound.t, label.bound.t.bit_length()),
        label.rt,
        uint_to_bits(label.floor_log_lw, label.floor_log_lw.bit_length()),
        uint_to_bits(label.level, label.level.bit_length()),
        uint_to_bits(label.ceil_log_degm1, label.ceil_log_degm1.bit_length()),
    ])


def unpack_interm(bits, b, clamp=True) -> IntermLabel:
    be = effective_b(b, clamp)
    s, tb, rt, flw, lev, cld = unpack_parts(bits)
    return IntermLabel(bits_to_uint(s), BoundExp(bits_to_uint(tb), be), rt,
                       bits_to_uint(flw), bits_to_uint(lev),
                       bits_to_uint(cld))


def interm_bits(label: IntermLabel):
    return len(pack_interm(label))
