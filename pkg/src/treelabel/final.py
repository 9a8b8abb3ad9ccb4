"""Per-node-parameterized segment reservation with trailing-zero starts.

Same two-phase engine as the globally-parameterized scheme, with three
changes: the rounding parameter b is chosen per node from its light
weight, every path node claims a 2*lw(u) window in which its start is
aligned to a multiple of 2^ceil(log lw(u)) (freeing that many label bits
for the routing table), and bound values round on the global
floor(2^(t/L)) grid with L = ceil(log of the augmented node count).

Class boundary values follow the product formula
    2 * x2 * ceil(log x2) * 2^(ceil(log x2)/L) * prod_{k<=ceil(log x2)} 2^(28*ceil(log k)/k)
evaluated exactly over integers via a fixed-point ceil chain, so encoder
and decoder always agree bit for bit.

Also provides the local-table configurations (label = start only, the rest
of the record kept at the node) and the bounded-depth configuration (the
global-b encoder run unclamped with b=1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

from .bits import bits_to_uint, pack_parts, uint_to_bits, unpack_parts
from .grouping import (AUG, boundary_table, ceil_log2, encode_engine,
                       group_sizes, plan_walk)
from .numeric import BoundExp, ceil_mul_exp2, decode_monotone, iroot
from .tree import Tree

_SH = 96                      # fixed-point shift for the product table
_MASK = (1 << _SH) - 1
PROD_C = 2                    # the "big enough constant" c; 14c = 28


@lru_cache(maxsize=None)
def _prod(L, j, c=PROD_C):
    """ceil fixed point of 2^(j/L) * prod_{k=1..j} 2^(14c*ceil(log k)/k)."""
    if j == 0:
        return 1 << _SH
    return ceil_mul_exp2(_prod(L, j - 1, c), j + 14 * c * ceil_log2(j) * L,
                         L * j)


@lru_cache(maxsize=None)
def _inv_step(L):
    # floor(2^(_SH - 1/L)), used to peel one 2^(1/L) factor off a cap
    return iroot(1 << (_SH * L - 1), L)


def scheme_log(n):
    """The globally known log: ceil(log2) of the augmented node count."""
    return ceil_log2(AUG * n)


def final_b(flw):
    """Per-node rounding parameter from floor(log lw), clamped to >= 6."""
    llw = flw.bit_length() - 1
    return max(6, flw // (2 * (llw + 3)))


@dataclass(frozen=True)
class ProductFormula:
    """Boundary/segment formulas with the per-level 2^(28*ceil(log k)/k)
    rounding allowances baked into one monotone product."""

    L: int

    prod_c = PROD_C
    anchor_class = "class-boundary-28"
    anchor_rcap = "assign-sl-guarantee-28"
    anchor_span = "span-le-sl-28"

    def boundary(self, x2, b):
        if x2 == 1:
            return 1
        # floor(log x2) is the level shared by the class members (classes
        # never straddle a level); the ceiling would smuggle in one extra
        # per-level allowance and break the boundary-vs-sl bound
        lx = x2.bit_length() - 1
        return (2 * x2 * lx * _prod(self.L, lx, self.prod_c) + _MASK) >> _SH

    def sl(self, size, level, b):
        if level < 1:
            return 1
        return (2 * size * level * _prod(self.L, level, self.prod_c)
                + _MASK) >> _SH

    def class_allow(self, sl_v, k, b):
        return ceil_mul_exp2(sl_v, 6 * k, b)

    def r_cap(self, size, level, b):
        if level < 1:
            return 1
        x = (2 * size * level * _prod(self.L, level, self.prod_c)
             * _inv_step(self.L))
        return (x + (1 << (2 * _SH)) - 1) >> (2 * _SH)


class FinalLabel(NamedTuple):
    start_hi: int
    tz: int
    bound: BoundExp
    rt: str
    floor_log_lw: int
    level: int
    ceil_log_degm1: int
    has_children: bool

    @property
    def start(self):
        return self.start_hi << self.tz


def encode_final(t: Tree, checks=None):
    L = scheme_log(t.n)
    res = encode_engine(t, ProductFormula(L), final_b, L,
                        reserve=True, checks=checks)
    start, bound_t, rt = res.start, res.bound_t, res.rt
    flw, lev, cld, lwa = (res.floor_log_lw, res.level, res.ceil_log_degm1,
                          res.lw_aug)
    children = t.children
    if checks is None:
        return [FinalLabel(s >> (tz := (w - 1).bit_length()), tz,
                           BoundExp(bt, L), r, f, le, c, bool(ch))
                for s, w, bt, r, f, le, c, ch
                in zip(start, lwa, bound_t, rt, flw, lev, cld, children)
                ], res.ports
    labels = []
    for u in range(t.n):
        tz = ceil_log2(lwa[u])
        labels.append(FinalLabel(start[u] >> tz, tz, BoundExp(bound_t[u], L),
                                 rt[u], flw[u], lev[u], cld[u],
                                 bool(children[u])))
        if checks is not None:
            assert start[u] & ((1 << tz) - 1) == 0
            checks.append(("tz-ge-ceil-log-lw", u, ceil_log2(lwa[u]), tz))
            if flw[u] // (2 * (flw[u].bit_length() + 2)) >= 6:
                # the trailing-zeros budget claim presumes b is at least 6
                # before clamping; below that light weight the clamped b
                # makes rt provably wider and the claim does not apply
                checks.append(("rt-le-ceil-log-lw", u, len(rt[u]),
                               ceil_log2(lwa[u])))
    return labels, res.ports


def route_final(lu: FinalLabel, lw: FinalLabel, n):
    su, sw = lu.start, lw.start
    if not su < sw < su + lu.bound.value:
        return 0
    b = final_b(lu.floor_log_lw)
    l = min(lu.floor_log_lw + 1, lu.level)
    values, _ = boundary_table(ProductFormula(scheme_log(n)), b, l)
    gs = group_sizes(b, lu.ceil_log_degm1)
    z = max(len(values), len(gs))
    seq = decode_monotone(lu.rt, z)
    slot = plan_walk(values, z, seq, gs, sw - su)
    return slot + 2 if slot >= 0 else 1


def pack_final(label: FinalLabel):
    return pack_parts([
        uint_to_bits(label.start_hi, label.start_hi.bit_length()),
        uint_to_bits(label.tz, label.tz.bit_length()),
        uint_to_bits(label.bound.t, label.bound.t.bit_length()),
        label.rt,
        uint_to_bits(label.floor_log_lw, label.floor_log_lw.bit_length()),
        uint_to_bits(label.level, label.level.bit_length()),
        uint_to_bits(label.ceil_log_degm1, label.ceil_log_degm1.bit_length()),
        "1" if label.has_children else "0",
    ])


def unpack_final(bits, n) -> FinalLabel:
    sh, tz, tb, rt, flw, lev, cld, hc = unpack_parts(bits)
    return FinalLabel(bits_to_uint(sh), bits_to_uint(tz),
                      BoundExp(bits_to_uint(tb), scheme_log(n)), rt,
                      bits_to_uint(flw), bits_to_uint(lev),
                      bits_to_uint(cld), hc == "1")


def final_bits(label: FinalLabel):
    return len(pack_final(label))


# ---------------------------------------------------------------------------
# local-table and bounded-depth configurations

LOCAL_VARIANTS = ("b_logn_over_loglogn", "b_logn")


def local_variant_b(variant, n):
    cl = max(1, ceil_log2(n))
    cll = max(1, ceil_log2(cl))
    if variant == "b_logn_over_loglogn":
        return -(-cl // cll)
    if variant == "b_logn":
        return cl
    raise ValueError(f"unknown local-table variant {variant!r}")


@dataclass(frozen=True)
class LocalTablePair:
    label: str     # just the start bits
    local: object  # the full record, kept at the node


def encode_local_tables(t: Tree, variant):
    from .intermediate import encode_interm

    b = local_variant_b(variant, t.n)
    labels, ports = encode_interm(t, b)
    pairs = [LocalTablePair(uint_to_bits(l.start, l.start.bit_length()), l)
             for l in labels]
    return pairs, ports, b


def route_local(pair_u: LocalTablePair, label_w, b):
    from .intermediate import route_interm

    lu = pair_u.local
    return route_interm(lu, lu.__class__(bits_to_uint(label_w), lu.bound,
                                         "", 0, 0, 0), b)


def encode_bounded_depth(t: Tree, checks=None):
    """Depth-bounded configuration: unclamped b=1, so every rounding is to
    a power of two and the total blowup is 2^O(depth)."""
    from .intermediate import encode_interm

    return encode_interm(t, 1, clamp=False, checks=checks)
