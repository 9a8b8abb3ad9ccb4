"""Interval ancestry labels via per-heavy-path shifting.

Every node gets I(u) = [start(u), start(u)+bound(u)) with bound on the
floor(2^(t/b)) grid.  A heavy path is processed top to bottom with an
accumulator: +1 at each path node, +span(v) for each light subtree v, and a
final pass rounds every bound up to the accumulator.  The parent level
advances by span(v) = max interval end inside T_v, so IDs assigned later
never fall inside an earlier subtree's (possibly overshooting) intervals.

u is a proper ancestor of w iff start(w) lands in I(u) minus its left end.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bits import bits_to_uint, pack_parts, uint_to_bits, unpack_parts
from .numeric import BoundExp, ceil_mul_exp2, round_pow
from .tree import Tree, canonical_ports, decompose


@dataclass(frozen=True)
class AncestryLabel:
    start: int
    bound: BoundExp


def _heavy_path(h, head):
    path = [head]
    while h.heavy_child[path[-1]] != -1:
        path.append(h.heavy_child[path[-1]])
    return path


def encode_ancestry(t: Tree, b):
    """Labels for every node; light children visited in canonical order so
    the routing schemes can reuse the same ID layout."""
    if b < 1:
        raise ValueError("b must be >= 1")
    h = decompose(t)
    p = canonical_ports(t, h)
    start = [0] * t.n
    bound = [None] * t.n

    def do_path(head, s):
        # returns span(head) = max interval end in T_head, relative to s
        path = _heavy_path(h, head)
        a = s
        for u in path:
            start[u] = a
            a += 1
            for v in p.order[u]:
                if v == h.heavy_child[u]:
                    continue
                a += do_path(v, a)
        end_max = a
        for u in path:
            bound[u] = round_pow(a - start[u], b)
            end_max = max(end_max, start[u] + bound[u].value)
        return end_max - s

    span_root = do_path(t.root, 0)
    clog = (t.n - 1).bit_length() if t.n > 1 else 0
    assert span_root <= max(ceil_mul_exp2(t.n, clog, b), 1), span_root
    return [AncestryLabel(start[u], bound[u]) for u in range(t.n)]


def is_ancestor(lu: AncestryLabel, lw: AncestryLabel):
    return lu.start < lw.start < lu.start + lu.bound.value


def pack_ancestry(label: AncestryLabel):
    return pack_parts([
        uint_to_bits(label.start, label.start.bit_length()),
        uint_to_bits(label.bound.t, label.bound.t.bit_length()),
    ])


def unpack_ancestry(bits, b) -> AncestryLabel:
    s, tb = unpack_parts(bits)
    return AncestryLabel(bits_to_uint(s), BoundExp(bits_to_uint(tb), b))


def ancestry_bits(label: AncestryLabel):
    return len(pack_ancestry(label))
