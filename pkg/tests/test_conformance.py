from treelabel.conformance import (SCHEMES, AssertionRecord,
                                   ConformanceReport, check_canonical,
                                   default_ancestry_b, default_interm_b,
                                   run_conformance)
from treelabel.tree import PortAssignment, decompose, gen_tree


def test_default_parameters():
    assert default_ancestry_b(2) == 1
    assert default_ancestry_b(1024) == 10
    # smallest b with b^2 * ceil(log log n) >= ceil(log n)
    assert default_interm_b(1 << 16) == 2
    assert default_interm_b(1 << 20) == 2
    assert default_interm_b(1 << 30) == 3


def test_assertion_record_lines():
    ok = AssertionRecord("span-le-sl-28", "final path/n=4 0", 5, 9)
    bad = AssertionRecord("span-le-sl-28", "x", 9, 5)
    assert ok.ok and not bad.ok
    assert ok.line() == "span-le-sl-28 ok 5 9"
    assert bad.line() == "span-le-sl-28 FAIL 9 5"


def test_report_failures():
    rep = ConformanceReport()
    rep.add("a", "w", 1, 2)
    rep.add("b", "w", 3, 2)
    assert not rep.ok
    assert [r.anchor for r in rep.failures] == ["b"]
    assert len(list(rep.lines())) == 2


def test_check_canonical_flags_bad_order():
    t = gen_tree("random_attachment", 30, seed=1)
    h = decompose(t)
    good = ConformanceReport()
    from treelabel.tree import canonical_ports
    ports = canonical_ports(t, h)
    check_canonical(t, h, ports, good, "x")
    assert good.ok
    # reverse one multi-child order: heavy child no longer first
    order = [list(o) for o in ports.order]
    u = next(u for u in range(t.n) if len(order[u]) > 1)
    order[u].reverse()
    bad = ConformanceReport()
    check_canonical(t, h, PortAssignment(order), bad, "x")
    assert not bad.ok


def test_run_conformance_small_sweep():
    rep = run_conformance(sizes=tuple(range(1, 14)) + (31,))
    assert rep.ok, [r.line() for r in rep.failures[:5]]
    anchors = {r.anchor for r in rep.records}
    assert {"oracle-equivalence", "canonical-ports", "start-uniqueness",
            "class-boundary-12", "class-boundary-28", "class-boundary-42",
            "monotone-rt-2z", "tz-ge-ceil-log-lw"} <= anchors


def test_run_conformance_sampled_mode():
    rep = run_conformance(scheme_names=("interm", "final"), sizes=(64,),
                          exhaustive=False)
    assert rep.ok
    assert any(r.anchor == "oracle-equivalence" for r in rep.records)


def test_every_scheme_registered_consistently():
    for name, scheme in SCHEMES.items():
        assert scheme.name == name
        assert callable(scheme.encode) and callable(scheme.route)
        p = scheme.params(100)
        assert isinstance(p, dict)
