import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treelabel.grouping import (ART_LEAVES, AUG, NodePlan, boundary_table,
                                build_plan, class_index, class_ranges,
                                encode_engine, group_sizes, plan_walk)
from treelabel.intermediate import INTERM_FORMULA
from treelabel.numeric import decode_monotone
from treelabel.tree import Tree, gen_tree

bl = st.tuples(st.integers(1, 24), st.integers(1, 40))


@given(bl)
def test_class_ranges_partition(args):
    b, l = args
    ranges = class_ranges(b, l)
    # descending, contiguous, covering [1, 2^l - 1]
    assert ranges[0][1] == (1 << l) - 1
    assert ranges[-1][0] == 1
    for (lo, hi), (lo2, hi2) in zip(ranges, ranges[1:]):
        assert lo <= hi and lo == hi2 + 1


@given(bl, st.integers(1, 1 << 40))
def test_class_index_consistent(args, raw):
    b, l = args
    size = 1 + raw % ((1 << l) - 1)
    i = class_index(b, l, size)
    lo, hi = class_ranges(b, l)[i]
    assert lo <= size <= hi


def test_class_index_out_of_range():
    with pytest.raises(ValueError):
        class_index(4, 3, 8)
    with pytest.raises(ValueError):
        class_index(4, 3, 0)


@given(st.tuples(st.integers(1, 24), st.integers(1, 24)))
def test_group_sizes_total(args):
    b, p = args
    gs = group_sizes(b, p)
    assert sum(gs) == (1 << (p + 1)) - 2
    # zero-size groups are legal (a narrow pregroup split b ways), negative not
    assert all(sz >= 0 for sz in gs)


def test_group_sizes_small_example():
    # b=3, p=3: pregroup 1 split into 3 groups, pregroup 2 into 2,
    # pregroup 3 merged whole
    assert group_sizes(3, 3) == (1, 1, 0, 2, 2, 8)


@given(bl)
def test_boundary_table_descending(args):
    b, l = args
    values, idx = boundary_table(INTERM_FORMULA, b, l)
    assert list(values) == sorted(values, reverse=True)
    assert len(set(values)) == len(values)
    assert len(idx) == len(class_ranges(b, l))
    assert all(idx[i] <= idx[i + 1] for i in range(len(idx) - 1))


def plan_case(b, l, sizes, n_art=ART_LEAVES):
    sizes = sorted(sizes, reverse=True)
    cls = tuple(class_index(b, l, s) for s in sizes)
    p = max(1, (len(sizes) + n_art - 1).bit_length())
    return build_plan(INTERM_FORMULA, b, l, p, cls, n_art), sizes, p


@given(st.integers(6, 12), st.integers(2, 16).flatmap(
    lambda l: st.tuples(st.just(l),
                        st.lists(st.integers(1, (1 << l) - 1), max_size=12))))
@settings(max_examples=150)
def test_build_plan_invariants(b, ls):
    l, sizes = ls
    plan, sizes, p = plan_case(b, l, sizes)
    assert isinstance(plan, NodePlan)
    assert len(plan.child_adv) == len(plan.child_off) == len(sizes)
    values, _ = boundary_table(INTERM_FORMULA, b, l)
    prev_end = 0
    for s, adv, off in zip(sizes, plan.child_adv, plan.child_off):
        assert adv in values
        assert adv >= s                 # the slot fits the member's subtree
        assert off >= prev_end          # slots are disjoint, in port order
        prev_end = off + adv
    assert prev_end <= plan.total
    # group advances decoded from rt are nonincreasing and cover the members
    seq = decode_monotone(plan.rt, plan.z)
    gs = group_sizes(b, p)
    assert len(seq) <= len(gs)
    assert sum(gs[:len(seq)]) >= len(sizes)


@given(st.integers(6, 12), st.integers(2, 16).flatmap(
    lambda l: st.tuples(
        st.just(l),
        st.lists(st.integers(1, (1 << l) - 1), min_size=1, max_size=12))))
@settings(max_examples=150)
def test_plan_walk_inverts_layout(b, ls):
    l, sizes = ls
    plan, sizes, p = plan_case(b, l, sizes)
    values, _ = boundary_table(INTERM_FORMULA, b, l)
    seq = decode_monotone(plan.rt, plan.z)
    gs = group_sizes(b, p)
    for j, (adv, off) in enumerate(zip(plan.child_adv, plan.child_off)):
        for q in (off + 1, off + adv):  # both ends of the reserved slot
            assert plan_walk(values, plan.z, seq, gs, q) == j
    # past the last reserved slot the walk falls through
    assert plan_walk(values, plan.z, seq, gs, plan.total + 1) == -1


def test_build_plan_rejects_small_pregroup_count():
    cls = tuple(class_index(6, 4, 3) for _ in range(8))
    with pytest.raises(ValueError):
        build_plan(INTERM_FORMULA, 6, 4, 1, cls, ART_LEAVES)


def engine(t, reserve, checks=None):
    return encode_engine(t, INTERM_FORMULA, lambda _f: 6, 6,
                         reserve=reserve, checks=checks)


def test_engine_starts_distinct_and_dfs_ordered():
    t = gen_tree("random_attachment", 300, seed=3)
    for reserve in (False, True):
        res = engine(t, reserve)
        assert len(set(res.start)) == t.n
        for u in range(t.n):
            for v in t.children[u]:
                assert res.start[v] > res.start[u]


def test_engine_reserve_alignment():
    t = gen_tree("caterpillar", 120, seed=0)
    res = engine(t, reserve=True)
    for u in range(t.n):
        tz = (res.lw_aug[u] - 1).bit_length()
        assert res.start[u] % (1 << tz) == 0


def test_engine_interval_contains_exactly_subtree():
    t = gen_tree("random_attachment", 150, seed=9)
    res = engine(t, reserve=False)
    from treelabel.numeric import pow_floor
    for u in range(t.n):
        end = res.start[u] + pow_floor(res.bound_t[u], 6)
        inside = [w for w in range(t.n)
                  if res.start[u] < res.start[w] < end]
        # membership test the decoders rely on: strictly-inside starts are
        # exactly the proper descendants
        desc = set()
        stack = list(t.children[u])
        while stack:
            w = stack.pop()
            desc.add(w)
            stack.extend(t.children[w])
        assert set(inside) == desc


def test_engine_checks_all_pass():
    checks = []
    t = gen_tree("random_attachment", 200, seed=5)
    engine(t, reserve=False, checks=checks)
    assert checks
    for anchor, where, lhs, rhs in checks:
        assert lhs <= rhs, (anchor, where, lhs, rhs)


def test_engine_single_node():
    t = Tree([-1])
    res = engine(t, reserve=False)
    assert res.start == [0]
    assert res.rt == [""]
    res = engine(t, reserve=True)
    tz = (res.lw_aug[0] - 1).bit_length()
    assert res.start[0] % (1 << tz) == 0
