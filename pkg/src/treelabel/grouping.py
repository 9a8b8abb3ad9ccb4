"""Class/group segment rounding shared by the segment-reservation schemes.

Light children of a path node are bucketed twice:

  * by subtree size into classes: one "preclass" per level below the
    parent's, the first b-1 preclasses subdivided into ceil(b/k) size
    subranges, deeper ones merged in runs of 1,1,..(b),2,2,..(b),4,...
    Every class has one boundary value; a member's reserved segment length
    (sl') rounds up to it.
  * by rank into groups: pregroup k holds 2^k consecutive children (last
    one padded with size-0 dummies), subdivided/merged with the same index
    arithmetic.  All members of a group reserve the largest sl' in it
    (sl''), so the routing table only needs one value per group, encoded
    with the nonincreasing-sequence codec.

Both sides derive the class structure from (b, l) and the group structure
from (b, number of pregroups) alone; only the boundary-value formula
differs between schemes, so it is passed in as a hashable object.

The schemes run on an augmented tree where every real node has c'+1 = 17
extra leaf children (so light weights never degenerate); those leaves are
never materialized here, they enter a node's plan only as trailing size-1
children.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

from .numeric import GridRounder, ceil_mul_exp2, encode_monotone, pow_floor

ART_LEAVES = 17          # artificial leaf children added to every real node
AUG = ART_LEAVES + 1     # augmented subtree size multiplier


def ceil_log2(x):
    return (x - 1).bit_length()


@lru_cache(maxsize=None)
def class_ranges(b, l):
    """Subtree-size intervals [lo, hi] of the classes at a node with
    l = min(floor(log lw)+1, level), descending by size."""
    if b < 1 or l < 1:
        raise ValueError("class_ranges domain")
    out = []
    for k in range(1, min(b - 1, l) + 1):
        x = l - k
        sub = []
        lo = 1 << x
        top = (1 << (x + 1)) - 1
        for p in range(1, -(-b // k) + 1):
            hi = min(ceil_mul_exp2(1 << x, p * k, b) - 1, top)
            if hi >= lo:
                sub.append((lo, hi))
            lo = hi + 1
            if lo > top:
                break
        out.extend(reversed(sub))
    j, z = b, 1
    while j <= l:
        for k in range(1, b + 1):
            m0 = j + (k - 1) * z
            if m0 > l:
                break
            m1 = min(j + k * z - 1, l)
            out.append((1 << (l - m1), (1 << (l - m0 + 1)) - 1))
        j *= 2
        z *= 2
    return tuple(out)


@lru_cache(maxsize=None)
def _class_neg_los(b, l):
    return tuple(-lo for lo, _ in class_ranges(b, l))


def class_index(b, l, size):
    """Index into class_ranges(b, l) of the class containing the size."""
    if size < 1:
        raise ValueError(f"size {size} outside class coverage (b={b}, l={l})")
    i = bisect_left(_class_neg_los(b, l), -size)
    lo, hi = class_ranges(b, l)[i]
    if not lo <= size <= hi:
        raise ValueError(f"size {size} outside class coverage (b={b}, l={l})")
    return i


@lru_cache(maxsize=None)
def boundary_table(formula, b, l):
    """(values, idx): deduped descending boundary values of all classes and,
    per class, the index of its value."""
    values = []
    idx = []
    for _, hi in class_ranges(b, l):
        v = formula.boundary(hi, b)
        if not values or v < values[-1]:
            values.append(v)
        assert v == values[-1], "boundary formula not monotone in class size"
        idx.append(len(values) - 1)
    return tuple(values), tuple(idx)


@lru_cache(maxsize=None)
def group_sizes(b, p):
    """Children per group for a node with pregroups 1..p; pregroup k holds
    2^k consecutive children, total 2^(p+1)-2 including dummy padding."""
    if b < 1 or p < 1:
        raise ValueError("group_sizes domain")
    sizes = []
    for k in range(1, min(b - 1, p) + 1):
        q = -(-b // k)
        base, ext = divmod(1 << k, q)
        sizes += [base + 1] * ext + [base] * (q - ext)
    j, z = b, 1
    while j <= p:
        for k in range(1, b + 1):
            m0 = j + (k - 1) * z
            if m0 > p:
                break
            m1 = min(j + k * z - 1, p)
            sizes.append((1 << (m1 + 1)) - (1 << m0))
        j *= 2
        z *= 2
    return tuple(sizes)


@dataclass(frozen=True)
class NodePlan:
    """Reservation plan for the light region of one path node.

    Children (materialized real ones, then artificial leaves, then dummies)
    are laid out group by group; every child in group g reserves sl''(g).
    rt encodes the group values up to the last group holding a materialized
    child -- later groups hold only artificial/dummy segments, which no
    query can land in.
    """

    rt: str
    z: int
    total: int          # space of the whole light region, dummies included
    child_adv: tuple    # sl'' of each materialized child, port order
    child_off: tuple    # light-region offset of each materialized child


@lru_cache(maxsize=None)
def build_plan(formula, b, l, p, cls_idx, n_art) -> NodePlan:
    values, cls_val = boundary_table(formula, b, l)
    vidx = [cls_val[c] for c in cls_idx]
    vidx += [cls_val[class_index(b, l, 1)]] * n_art
    nreal = len(cls_idx)
    gs = group_sizes(b, p)
    if sum(gs) < len(vidx):
        raise ValueError("pregroup count too small for the children")
    z = max(len(values), len(gs))
    seq = []
    child_adv = []
    child_off = []
    total = 0
    pos = 0          # next child slot
    prev = None
    for sz in gs:
        if pos >= len(vidx):
            break                       # all-dummy tail reserves nothing
        vi = vidx[pos] if sz else prev  # empty group carries the last value
        assert vi is not None and (prev is None or vi >= prev), \
            "children not sorted by class"
        prev = vi
        if pos < nreal:
            # groups past the last real child hold only artificial leaf /
            # dummy slots; no query can land there, so rt omits them
            seq.append(z - vi)
        adv = values[vi]
        for j in range(min(sz, nreal - pos) if pos < nreal else 0):
            child_adv.append(adv)
            child_off.append(total + j * adv)
        total += sz * adv               # artificial and dummy slots count too
        pos += sz
    return NodePlan(encode_monotone(seq, z), z, total,
                    tuple(child_adv), tuple(child_off))


@dataclass
class EncodeResult:
    start: list
    bound_t: list
    rt: list
    floor_log_lw: list
    level: list
    ceil_log_degm1: list
    lw_aug: list
    ports: object
    plans: list


def aug_light_weight(t, h, u):
    """Light weight of u in the augmented tree.  A real leaf's heavy child
    is one of its artificial leaves, so one of them is not light."""
    extra = ART_LEAVES if t.children[u] else ART_LEAVES - 1
    return AUG * h.light_weight[u] + extra


def encode_engine(t, formula, node_b, bound_b, reserve, checks=None,
                  plan_builder=build_plan):
    """Two-phase segment-reservation encoder.

    node_b maps floor(log lw) to the per-node rounding parameter b (a
    constant function for the globally-parameterized scheme).  bound_b is
    the denominator of the bound grid floor(2^(t/bound_b)).  With reserve
    set, every path node claims a 2*lw(u) window and its start is aligned
    to a multiple of 2^ceil(log lw(u)) inside it (the trailing-zeros
    placement); otherwise a path node consumes a single ID.
    """
    from .tree import canonical_ports, decompose

    h = decompose(t)
    ports = canonical_ports(t, h)
    n = t.n
    size = h.subtree_size
    heavy = h.heavy_child
    lev = [(AUG * size[u]).bit_length() - 1 for u in range(n)]
    lwa = [aug_light_weight(t, h, u) for u in range(n)]
    flw = [x.bit_length() - 1 for x in lwa]

    # phase one: plans bottom-up (children have larger indices than parents)
    lights = [None] * n
    plans = [None] * n
    pp = [0] * n
    seg = [0] * n
    r = [0] * n
    orders = ports.order
    cidx = class_index
    plan_cache = {}
    # every leaf shares one plan: lw is the 16 artificial leaves, no lights
    leaf_flw = (AUG - 2).bit_length() - 1
    leaf_lev = (AUG).bit_length() - 1
    leaf_b = node_b(leaf_flw)
    leaf_l = min(leaf_flw + 1, leaf_lev)
    leaf_p = (ART_LEAVES - 2).bit_length()
    leaf_plan = plan_builder(formula, leaf_b, leaf_l, leaf_p, (),
                             ART_LEAVES - 1)
    leaf_seg = (2 * (AUG - 2) if reserve else 1) + leaf_plan.total
    leaf_lights = []
    for u in range(n - 1, -1, -1):
        hc = heavy[u]
        order = orders[u]
        if not order and checks is None:
            lights[u] = leaf_lights
            pp[u] = leaf_p
            plans[u] = leaf_plan
            seg[u] = leaf_seg
            r[u] = leaf_seg + 1
            continue
        # the heavy child always takes port 1
        ls = order[1:] if hc != -1 else order
        lights[u] = ls
        n_art = ART_LEAVES if order else ART_LEAVES - 1
        b = node_b(flw[u])
        l = min(flw[u] + 1, lev[u])
        p = (len(ls) + n_art - 1).bit_length()
        pp[u] = p
        cls = tuple([cidx(b, l, AUG * size[v]) for v in ls])
        key = (b, l, p, cls, n_art)
        plan = plan_cache.get(key)
        if plan is None:
            plan = plan_builder(formula, b, l, p, cls, n_art)
            plan_cache[key] = plan
        plans[u] = plan
        adv = plan.child_adv
        for j, v in enumerate(ls):
            # a light subtree must fit the slot its group reserves for it
            assert r[v] <= adv[j], (u, v, r[v], adv[j])
        seg[u] = (2 * lwa[u] if reserve else 1) + plan.total
        r[u] = seg[u] + (r[hc] if hc != -1 else 1)
        if checks is not None:
            values, cls_val = boundary_table(formula, b, l)
            for j, v in enumerate(ls):
                k = l - lev[v]
                sl_v = formula.sl(AUG * size[v], lev[v], b)
                checks.append((formula.anchor_class, v,
                               values[cls_val[cls[j]]],
                               formula.class_allow(sl_v, k, b)))
            if isinstance(plan, NodePlan):
                checks.append(("monotone-rt-2z", u, len(plan.rt), 2 * plan.z))
            if h.path_head[u] == u:
                checks.append((formula.anchor_rcap, u, r[u],
                               formula.r_cap(AUG * size[u], lev[u], b)))

    # phase two: start/bound assignment top-down
    start = [0] * n
    bt = [0] * n
    grid = GridRounder(bound_b)
    round_t = grid.round_t
    slot_end = [0] * n if checks is not None else None
    base_of = [0] * n if checks is not None else None
    stack = [(t.root, 0)]
    push = stack.append
    while stack:
        u, base = stack.pop()
        if checks is not None:
            base_of[u] = base
        a = base
        path = []
        path_append = path.append
        while True:
            if reserve:
                w = lwa[u]
                tz = (w - 1).bit_length()
                su = (a + 2 * w - 1) >> tz << tz
                start[u] = su
                a = su + 1
            else:
                start[u] = a
                a += 1
            path_append(u)
            plan = plans[u]
            off = plan.child_off
            adv = plan.child_adv
            for j, v in enumerate(lights[u]):
                push((v, a + off[j]))
                if checks is not None:
                    base_of[v] = a + off[j]
                    slot_end[v] = a + off[j] + adv[j]
            a += plan.total
            hc = heavy[u]
            if hc == -1:
                a += 1      # artificial tail leaf of the heavy path
                break
            u = hc
        for x in path:
            bt[x] = round_t(a - start[x])

    if checks is not None:
        _span_checks(t, formula, node_b, bound_b, h, lev, flw, size, start,
                     bt, base_of, slot_end, checks)
    return EncodeResult(start, bt, [plans[u].rt for u in range(n)],
                        flw, lev, pp, lwa, ports, plans)


def _span_checks(t, formula, node_b, bound_b, h, lev, flw, size, start, bt,
                 base_of, slot_end, checks):
    # max interval end within each subtree, then per-head span vs sl and
    # per-light-child containment in its reserved slot
    n = t.n
    me = [0] * n
    for u in range(n - 1, -1, -1):
        m = start[u] + pow_floor(bt[u], bound_b)
        for v in t.children[u]:
            if me[v] > m:
                m = me[v]
        me[u] = m
        if h.path_head[u] == u:
            b = node_b(flw[u])
            checks.append((formula.anchor_span, u, me[u] - base_of[u],
                           formula.sl(AUG * size[u], lev[u], b)))
            if u != t.root:
                checks.append(("slot-containment", u, me[u], slot_end[u]))


def plan_walk(values, z, seq, gs, q):
    """Decoder-side scan: given decoded group values and group sizes, find
    the child whose slot contains offset q (1-based in the light region).
    Returns the 0-based child slot, or -1 when q is past every reserved
    slot (heavy-path descendant)."""
    cum = 0
    slot = 0
    for g, v in enumerate(seq):
        sz = gs[g]
        adv = values[z - v]
        if q <= cum + sz * adv:
            return slot + (q - cum - 1) // adv
        cum += sz * adv
        slot += sz
    return -1
