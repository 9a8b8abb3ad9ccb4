import pytest

from treelabel.conformance import SCHEMES
from treelabel.tree import FirstHopOracle, canonical_ports, decompose


def route_mismatches(scheme_name, t, params=None):
    """Exhaustive ordered-pair comparison against the precomputed oracle;
    returns the list of disagreeing (u, w, got, expected) tuples."""
    scheme = SCHEMES[scheme_name]
    p = scheme.params(t.n)
    if params:
        p.update(params)
    labels, ports = scheme.encode(t, p, None)
    if ports is None:
        ports = canonical_ports(t, decompose(t))
    oracle = FirstHopOracle(t, ports)
    bad = []
    for u in range(t.n):
        for w in range(t.n):
            if u == w:
                continue
            got = scheme.route(labels, u, w, t.n, p)
            exp = (oracle.is_ancestor(u, w) if scheme.ancestor_only
                   else oracle.first_hop(u, w))
            if got != exp:
                bad.append((u, w, got, exp))
    return bad


@pytest.fixture(scope="session")
def small_sizes():
    return tuple(range(1, 33))
