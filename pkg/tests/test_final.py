import pytest

from treelabel.final import (LOCAL_VARIANTS, FinalLabel, encode_bounded_depth,
                             encode_final, encode_local_tables, final_b,
                             local_variant_b, pack_final, route_final,
                             route_local, scheme_log, unpack_final)
from treelabel.grouping import aug_light_weight, ceil_log2
from treelabel.intermediate import route_interm
from treelabel.tree import FirstHopOracle, decompose, gen_tree

from conftest import route_mismatches


def test_final_b_regimes():
    assert final_b(0) == 6
    assert final_b(63) == 6                 # clamp active through desk sizes
    assert final_b(1000) == 41              # 1000 // (2 * (10 + 2))
    assert final_b(1 << 20) == (1 << 20) // 46


def test_scheme_log():
    assert scheme_log(1) == 5               # 18 augmented nodes
    assert scheme_log(1000) == 15


@pytest.mark.parametrize("kind,n,seed", [
    ("path", 25, 0), ("star", 25, 0), ("caterpillar", 26, 0),
    ("complete_binary", 31, 0), ("random_attachment", 64, 3),
    ("lower_bound:2", 48, 0),
])
def test_final_routes_match_oracle(kind, n, seed):
    assert route_mismatches("final", gen_tree(kind, n, seed=seed)) == []


def test_final_checks_pass():
    checks = []
    t = gen_tree("random_attachment", 300, seed=7)
    encode_final(t, checks=checks)
    anchors = {a for a, *_ in checks}
    assert {"class-boundary-28", "assign-sl-guarantee-28", "span-le-sl-28",
            "slot-containment", "monotone-rt-2z",
            "tz-ge-ceil-log-lw"} <= anchors
    for anchor, where, lhs, rhs in checks:
        assert lhs <= rhs, (anchor, where, lhs, rhs)


def test_final_start_alignment():
    t = gen_tree("random_attachment", 200, seed=2)
    labels, _ = encode_final(t)
    h = decompose(t)
    for u, l in enumerate(labels):
        assert isinstance(l, FinalLabel)
        assert l.start == l.start_hi << l.tz
        # stored trailing-zero count is exactly ceil(log of the augmented
        # light weight), so the start is recoverable from few high bits
        assert l.tz == ceil_log2(aug_light_weight(t, h, u))


def test_final_pack_roundtrip():
    t = gen_tree("caterpillar", 80)
    labels, _ = encode_final(t)
    for l in labels:
        assert unpack_final(pack_final(l), t.n) == l


def test_final_routes_after_roundtrip():
    t = gen_tree("random_attachment", 50, seed=5)
    labels, _ = encode_final(t)
    redone = [unpack_final(pack_final(l), t.n) for l in labels]
    for u in range(t.n):
        for w in range(t.n):
            if u != w:
                assert (route_final(redone[u], redone[w], t.n)
                        == route_final(labels[u], labels[w], t.n))


def test_local_variant_b():
    n = 1 << 16
    assert local_variant_b("b_logn", n) == 16
    assert local_variant_b("b_logn_over_loglogn", n) == 4
    with pytest.raises(ValueError):
        local_variant_b("b_whatever", n)


@pytest.mark.parametrize("variant", LOCAL_VARIANTS)
def test_local_tables_route(variant):
    t = gen_tree("random_attachment", 70, seed=6)
    pairs, ports, b = encode_local_tables(t, variant)
    oracle = FirstHopOracle(t, ports)
    for u in range(t.n):
        for w in range(t.n):
            if u != w:
                assert (route_local(pairs[u], pairs[w].label, b)
                        == oracle.first_hop(u, w))


def test_local_label_is_start_only():
    t = gen_tree("star", 20)
    pairs, _, _ = encode_local_tables(t, "b_logn")
    starts = {int(p.label, 2) if p.label else 0 for p in pairs}
    assert len(starts) == t.n


def test_bounded_depth_routes():
    # shallow and skewed shapes, decoded with the unclamped b=1 parameters
    for t in (gen_tree("star", 40), gen_tree("caterpillar", 30),
              gen_tree("complete_binary", 31)):
        labels, ports = encode_bounded_depth(t)
        oracle = FirstHopOracle(t, ports)
        for u in range(t.n):
            for w in range(t.n):
                if u != w:
                    assert (route_interm(labels[u], labels[w], 1, clamp=False)
                            == oracle.first_hop(u, w))


def test_bounded_depth_uses_power_of_two_grid():
    # unclamped b=1 rounds every bound to a power of two
    labels, _ = encode_bounded_depth(gen_tree("random_attachment", 60, seed=1))
    for l in labels:
        v = l.bound.value
        assert v & (v - 1) == 0
