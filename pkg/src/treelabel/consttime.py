"""Routing with a straight-line decoder: per-group prefix-sum tuples.

The bit-serial routing table of the per-node-parameterized scheme is
replaced by, per group of light children, a tuple (S, C, L):

  S  prefix sum of the space used by all earlier groups (two-parts rounded,
     so it is exactly representable with few mantissa bits),
  C  number of children in all earlier groups (exact, forced by child
     migration to have only a few significant bits),
  L  reserved segment length inside the group (two-parts rounded up).

The decoder truncates q = start(w) - start(u) to the same two-parts
precision, flattens it to the exponent-then-mantissa key form, asks a
broadword rank dictionary over the S keys which group's region holds q,
and answers 1 + C + ceil((q - S)/L) -- a fixed number of word operations
regardless of n or the degree.

Rounding prefix sums leaves gaps of never-assigned IDs between group
regions and inflates every member's segment to the group's L, so segment
formulas carry a larger per-level allowance (42 instead of 28) and b is
divided by an extra log log factor.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .bits import bits_to_uint, pack_parts, uint_to_bits, unpack_parts
from .final import ProductFormula, scheme_log
from .grouping import (ceil_log2, boundary_table, class_index, encode_engine,
                       group_sizes)
from .numeric import BoundExp, RankDict, TwoParts, two_parts_round
from .tree import Tree

# the "big enough constant" dividing b; see the ledger note on the bit
# budget for the dictionary at practical light weights
CT_C = 2


def ct_b(flw):
    """Per-node rounding parameter, one log log factor below the
    per-node-parameterized scheme's, clamped to >= 6."""
    llw = flw.bit_length() - 1
    return max(6, flw // (CT_C * (llw + 3) ** 2))


def plan_mbits(b, l):
    """Mantissa bits for the per-group roundings: every prefix sum may only
    grow by a factor 1 + 2^-(mbits-1) <= 2^(1/(b^2 (l+3))), so the product
    over all O(b log l) groups stays within one 2^(O(1/b)) per level."""
    return max(4, (b * b * (l + 3) - 1).bit_length() + 2)


class CtFormula(ProductFormula):
    """Product formula with allowance 2^(42*ceil(log k)/k) per level: the
    28 of the parent scheme plus one extra 14 absorbing the per-group
    prefix-sum and segment-length roundings."""

    prod_c = 3
    anchor_class = "class-boundary-42"
    anchor_rcap = "assign-sl-guarantee-42"
    anchor_span = "span-le-sl-42"


class CtPlan(NamedTuple):
    total: int
    child_adv: tuple
    child_off: tuple
    keys: tuple         # S keys in e||m form, one per real group + sentinel
    tuples: tuple       # (S, C, L) per group holding a materialized child
    mbits: int
    ebits: int
    rt: str = ""        # no bit-serial table in this scheme


@lru_cache(maxsize=None)
def build_ct_plan(formula, b, l, p, cls_idx, n_art) -> CtPlan:
    """Group layout with migrated child counts and rounded prefix sums.

    Group sizes start from the shared (b, p) partition, then each group is
    grown until the cumulative child count is exactly the two-parts
    round-up of its natural value -- the pulled children come from later
    groups and their segments inflate to this group's L.  Only when the
    pool runs dry (necessarily the last group) the remaining slots are
    dummies.  S advances by slots*L per group and is itself rounded up,
    leaving an ID gap.
    """
    values, cls_val = boundary_table(formula, b, l)
    vidx = [cls_val[c] for c in cls_idx]
    if n_art:
        vidx += [cls_val[class_index(b, l, 1)]] * n_art
    nreal = len(cls_idx)
    nmem = len(vidx)
    gs = group_sizes(b, p)
    if sum(gs) < nmem:
        raise ValueError("pregroup count too small for the children")
    mbits = plan_mbits(b, l)
    child_adv = []
    child_off = []
    tuples = []
    s_parts = []
    sentinel = None
    s_val = 0
    s_tp = TwoParts(0, 0, mbits)
    cnt = 0
    pos = 0
    for sz in gs:
        if pos >= nmem:
            break
        adv = two_parts_round(values[vidx[pos]], mbits).value
        target = two_parts_round(cnt + sz, mbits).value
        slots = target - cnt
        members = min(slots, nmem - pos)
        if pos < nreal:
            tuples.append((s_val, cnt, adv))
            s_parts.append(s_tp)
            for k in range(min(members, nreal - pos)):
                child_adv.append(adv)
                child_off.append(s_val + k * adv)
        s_tp = two_parts_round(s_val + slots * adv, mbits)
        if pos < nreal:
            sentinel = s_tp
        s_val = s_tp.value
        cnt += members
        pos += members
    if s_parts:
        s_parts.append(sentinel)
        ebits = max(1, max(tp.e.bit_length() for tp in s_parts))
        keys = tuple(tp.key(ebits) for tp in s_parts)
    else:
        ebits = 0
        keys = ()
    return CtPlan(s_val, tuple(child_adv), tuple(child_off),
                  keys, tuple(tuples), mbits, ebits)


class CtLabel(NamedTuple):
    start_hi: int
    tz: int
    bound: BoundExp
    rdict: object       # RankDict over the S keys, or None
    tuples: tuple
    mbits: int
    floor_log_lw: int
    level: int
    ceil_log_degm1: int
    has_children: bool

    @property
    def start(self):
        return self.start_hi << self.tz


@lru_cache(maxsize=None)
def _rank_dict(keys, width):
    return RankDict(list(keys), width)


def encode_ct(t: Tree, checks=None):
    L = scheme_log(t.n)
    res = encode_engine(t, CtFormula(L), ct_b, L, reserve=True,
                        checks=checks, plan_builder=build_ct_plan)
    labels = []
    children = t.children
    for u in range(t.n):
        plan = res.plans[u]
        tz = (res.lw_aug[u] - 1).bit_length()
        if plan.keys:
            rdict = _rank_dict(plan.keys, plan.ebits + plan.mbits)
            mbits = plan.mbits
        else:
            rdict, mbits = None, 0
        labels.append(CtLabel(res.start[u] >> tz, tz,
                              BoundExp(res.bound_t[u], L), rdict, plan.tuples,
                              mbits, res.floor_log_lw[u], res.level[u],
                              res.ceil_log_degm1[u], bool(children[u])))
        if checks is not None:
            flw = res.floor_log_lw[u]
            if flw // (CT_C * (flw.bit_length() + 2) ** 2) >= 6:
                # the log lw bit budget presumes b >= 6 before clamping;
                # with the clamp active the structures are provably wider
                bits = 0
                if rdict is not None:
                    bits = rdict.bit_size() + sum(
                        s.bit_length() + c.bit_length() + v.bit_length()
                        for s, c, v in plan.tuples)
                checks.append(("ct-table-budget", u, bits, tz))
    return labels, res.ports


class OpCounter:
    __slots__ = ("ops",)

    def __init__(self):
        self.ops = 0


def route_ct(lu: CtLabel, lw: CtLabel, counter=None):
    """Port from u towards w; every step is O(1) word operations plus one
    rank query (whose block count the counter also charges)."""
    if counter is not None:
        counter.ops += 10   # interval test, q, truncation, key build
    su, sw = lu.start, lw.start
    if not su < sw < su + lu.bound.value:
        return 0
    if lu.rdict is None:
        return 1
    q = sw - su
    mbits = lu.mbits
    width = lu.rdict.width
    ebits = width - mbits
    tq = two_parts_round(q, mbits, round_up=False)
    if tq.e >= 1 << ebits:
        # q outgrows every stored key
        key = 1 << width
    else:
        key = tq.key(ebits)
    # stored S values are exactly representable and every real ID offset is
    # strictly above its group's S, so "S < q" is "S <= truncated q"
    j = lu.rdict.rank(key + 1, counter)
    if counter is not None:
        counter.ops += 6    # index, subtract, divide, add
    if j > len(lu.tuples):
        return 1            # past the last real region: heavy-path descendant
    s, c, adv = lu.tuples[j - 1]
    return 1 + c + (q - s + adv - 1) // adv


def pack_ct(label: CtLabel):
    if label.rdict is None:
        dict_part = ""
        tuples_part = ""
    else:
        w = label.rdict.width
        dict_part = pack_parts([
            uint_to_bits(label.mbits, 6),
            uint_to_bits(w, 8),
            "".join(uint_to_bits(k, w) for k in label.rdict.keys),
        ])
        tuples_part = pack_parts([
            uint_to_bits(x, x.bit_length())
            for tup in label.tuples for x in tup
        ])
    return pack_parts([
        uint_to_bits(label.start_hi, label.start_hi.bit_length()),
        uint_to_bits(label.tz, label.tz.bit_length()),
        uint_to_bits(label.bound.t, label.bound.t.bit_length()),
        "",                 # bit-serial rt slot, unused here
        uint_to_bits(label.floor_log_lw, label.floor_log_lw.bit_length()),
        uint_to_bits(label.level, label.level.bit_length()),
        uint_to_bits(label.ceil_log_degm1,
                     label.ceil_log_degm1.bit_length()),
        "1" if label.has_children else "0",
        dict_part,
        tuples_part,
    ])


def unpack_ct(bits, n) -> CtLabel:
    (sh, tz, tb, _rt, flw, lev, cld, hc,
     dict_part, tuples_part) = unpack_parts(bits)
    if dict_part:
        mb, wb, ks = unpack_parts(dict_part)
        mbits = bits_to_uint(mb)
        width = bits_to_uint(wb)
        keys = tuple(bits_to_uint(ks[i:i + width])
                     for i in range(0, len(ks), width))
        rdict = _rank_dict(keys, width)
        flat = [bits_to_uint(f) for f in unpack_parts(tuples_part)]
        tuples = tuple((flat[i], flat[i + 1], flat[i + 2])
                       for i in range(0, len(flat), 3))
    else:
        mbits, rdict, tuples = 0, None, ()
    return CtLabel(bits_to_uint(sh), bits_to_uint(tz),
                   BoundExp(bits_to_uint(tb), scheme_log(n)), rdict, tuples,
                   mbits, bits_to_uint(flw), bits_to_uint(lev),
                   bits_to_uint(cld), hc == "1")


def ct_bits(label: CtLabel):
    return len(pack_ct(label))
