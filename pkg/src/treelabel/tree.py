"""Rooted trees: parsing, generators, heavy-path decomposition, port maps, routing oracle.

Node indices are 0..n-1 with node 0 as the root.  The on-disk format is a
parent array with topological numbering (parent index < child index), so a
single forward pass suffices to parse and a single backward pass to compute
subtree sizes.
"""

from __future__ import annotations

from dataclasses import dataclass


class TreeFormatError(ValueError):
    pass


class Tree:
    """Rooted tree with ordered children.

    parent[0] is -1; children lists preserve input order.
    """

    __slots__ = ("n", "parent", "children", "root")

    def __init__(self, parent):
        self.n = len(parent)
        self.parent = parent
        self.root = 0
        if self.n == 0:
            raise TreeFormatError("empty tree")
        if parent[0] != -1:
            raise TreeFormatError("node 0 must be the root")
        children = [[] for _ in range(self.n)]
        for k in range(1, self.n):
            p = parent[k]
            if not 0 <= p < k:
                # topological numbering also rules out cycles
                raise TreeFormatError(f"node {k}: parent {p} out of range [0,{k})")
            children[p].append(k)
        self.children = children

    def to_text(self):
        if self.n == 1:
            return "1\n"
        return "%d\n%s\n" % (self.n, " ".join(str(p) for p in self.parent[1:]))

    def depth_of(self, u):
        d = 0
        while self.parent[u] != -1:
            u = self.parent[u]
            d += 1
        return d

    def depth(self):
        # max over nodes; subtree-topological order makes this a single pass
        dep = [0] * self.n
        for k in range(1, self.n):
            dep[k] = dep[self.parent[k]] + 1
        return max(dep)

    def max_degree(self):
        return max(len(c) for c in self.children)


def parse_tree(text) -> Tree:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.split("\n")
    if not lines or not lines[0].strip():
        raise TreeFormatError("missing node count")
    try:
        n = int(lines[0].strip())
    except ValueError:
        raise TreeFormatError("malformed node count") from None
    if n < 1:
        raise TreeFormatError("node count must be positive")
    parent = [-1]
    if n > 1:
        if len(lines) < 2:
            raise TreeFormatError("missing parent line")
        fields = lines[1].split()
        if len(fields) != n - 1:
            raise TreeFormatError(f"expected {n - 1} parents, got {len(fields)}")
        try:
            parent.extend(int(f) for f in fields)
        except ValueError:
            raise TreeFormatError("malformed parent entry") from None
    return Tree(parent)


@dataclass
class HeavyDecomposition:
    subtree_size: list
    heavy_child: list       # -1 for leaves
    path_head: list
    level: list             # floor(log2(subtree size))
    light_weight: list
    light_depth: list


def decompose(t: Tree) -> HeavyDecomposition:
    n = t.n
    size = [1] * n
    for k in range(n - 1, 0, -1):
        size[t.parent[k]] += size[k]
    heavy = [-1] * n
    for u in range(n):
        best = -1
        best_size = 0
        for c in t.children[u]:
            if size[c] > best_size:
                best, best_size = c, size[c]
        heavy[u] = best
    head = [0] * n
    ldepth = [0] * n
    for k in range(1, n):
        p = t.parent[k]
        if heavy[p] == k:
            head[k] = head[p]
            ldepth[k] = ldepth[p]
        else:
            head[k] = k
            ldepth[k] = ldepth[p] + 1
    level = [s.bit_length() - 1 for s in size]
    lw = [0] * n
    for u in range(n):
        if heavy[u] != -1:
            lw[u] = size[u] - 1 - size[heavy[u]]
    return HeavyDecomposition(size, heavy, head, level, lw, ldepth)


class PortAssignment:
    """Canonical designer ports: per node a permutation of 1..deg(u).

    Port 0 is reserved for "toward parent" and never appears in the maps.
    """

    __slots__ = ("order", "_port_of")

    def __init__(self, order):
        # order[u] = children of u sorted by non-increasing subtree size
        self.order = order
        self._port_of = None

    @property
    def port_of(self):
        if self._port_of is None:
            self._port_of = [
                {c: i + 1 for i, c in enumerate(ch)} for ch in self.order
            ]
        return self._port_of

    def port(self, u, child):
        return self.port_of[u][child]


def canonical_ports(t: Tree, h: HeavyDecomposition) -> PortAssignment:
    size = h.subtree_size
    order = []
    for u in range(t.n):
        ch = t.children[u]
        if len(ch) > 1:
            ch = sorted(ch, key=lambda c: (-size[c], c))
            hc = h.heavy_child[u]
            if ch[0] != hc:
                # can only differ through an equal-size tie; keep the heavy
                # child first
                ch.remove(hc)
                ch.insert(0, hc)
        else:
            ch = list(ch)
        order.append(ch)
    return PortAssignment(order)


def oracle_first_hop(t: Tree, p: PortAssignment, u, w):
    """Ground-truth first hop on the u -> w path, by explicit walk."""
    if u == w:
        raise ValueError("u and w must differ")
    # climb from w towards the root; if we pass through u, the previous
    # node on the climb is the child of u we must route to
    x = w
    while x != -1:
        px = t.parent[x]
        if px == u:
            return p.port(u, x)
        x = px
        if x == u:
            # only reachable when w == u, excluded above
            break
    return 0


class FirstHopOracle:
    """Same answers as oracle_first_hop, precomputed for exhaustive sweeps.

    Uses entry/exit times for the ancestor test and a bisect over children
    entry times for the child-on-path lookup.
    """

    def __init__(self, t: Tree, p: PortAssignment):
        self.t = t
        self.p = p
        n = t.n
        tin = [0] * n
        tout = [0] * n
        clock = 0
        stack = [(0, False)]
        while stack:
            u, done = stack.pop()
            if done:
                tout[u] = clock
                continue
            tin[u] = clock
            clock += 1
            stack.append((u, True))
            for c in reversed(t.children[u]):
                stack.append((c, False))
        self.tin = tin
        self.tout = tout
        # children sorted by entry time for bisection
        self.ch_by_tin = [sorted(t.children[u], key=lambda c: tin[c]) for u in range(n)]

    def is_ancestor(self, u, w):
        """Proper ancestor test."""
        return u != w and self.tin[u] <= self.tin[w] < self.tout[u]

    def first_hop(self, u, w):
        if u == w:
            raise ValueError("u and w must differ")
        if not self.is_ancestor(u, w):
            return 0
        ch = self.ch_by_tin[u]
        lo, hi = 0, len(ch) - 1
        tw = self.tin[w]
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.tin[ch[mid]] <= tw:
                lo = mid
            else:
                hi = mid - 1
        return self.p.port(u, ch[lo])


# ---------------------------------------------------------------------------
# generators

_XS_MULT = 2685821657736338717
_MASK64 = (1 << 64) - 1


class XorShift64Star:
    """xorshift64* with the standard multiplier; seed 0 is remapped."""

    def __init__(self, seed):
        self.state = (seed or 0x9E3779B97F4A7C15) & _MASK64

    def next(self):
        x = self.state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * _XS_MULT) & _MASK64

    def randint(self, bound):
        # bound > 0; modulo bias is irrelevant for test corpora but keep it
        # deterministic and documented
        return self.next() % bound


def gen_tree(kind, n, seed=0) -> Tree:
    if n < 1:
        raise ValueError("n must be >= 1")
    if kind == "path":
        return Tree([-1] + list(range(n - 1)))
    if kind == "star":
        return Tree([-1] + [0] * (n - 1))
    if kind == "caterpillar":
        # spine of ceil(n/2); remaining nodes become one leg per spine node,
        # cycling from the front
        spine = (n + 1) // 2
        parent = [-1] + list(range(spine - 1))
        for j in range(n - spine):
            parent.append(j % spine)
        return Tree(parent)
    if kind == "complete_binary":
        if n + 1 & n:
            raise ValueError("complete_binary requires n = 2^k - 1")
        return Tree([-1] + [(k - 1) // 2 for k in range(1, n)])
    if kind == "random_attachment":
        rng = XorShift64Star(seed)
        return Tree([-1] + [rng.randint(k) for k in range(1, n)])
    if kind.startswith("lower_bound"):
        i = int(kind.split(":", 1)[1]) if ":" in kind else 1
        return _gen_lower_bound(i, n)
    raise ValueError(f"unknown tree kind: {kind}")


def _gen_lower_bound(i, n):
    """i near-equal paths off a root, one pendant leaf per path node, and the
    root expanded into a binary tree so every node has at most 2 children."""
    if i < 1:
        raise ValueError("path count must be >= 1")
    expansion = 2 * i - 1 if i > 1 else 1
    budget = n - expansion
    if budget < 2 * i:
        raise ValueError(f"n={n} too small for lower_bound:{i}")
    parent = [-1] * expansion
    if i > 1:
        # heap-shaped binary expansion: nodes 1..2i-2, leaves are the last i
        for k in range(1, expansion):
            parent[k] = (k - 1) // 2
        anchors = list(range(expansion - i, expansion))
    else:
        anchors = [0]
    per, extra = divmod(budget // 2, i)
    spare = budget % 2
    nxt = expansion
    parent = list(parent)
    for j, anchor in enumerate(anchors):
        length = per + (1 if j < extra else 0)
        prev = anchor
        for _ in range(length):
            parent.append(prev)       # path node
            node = nxt
            nxt += 1
            parent.append(node)       # its pendant leaf
            nxt += 1
            prev = node
        if j == 0 and spare:
            parent.append(prev)       # odd node budget: one leaf-less path node
            nxt += 1
            spare = 0
    return Tree(parent)


CORPUS_KINDS = (
    "path",
    "star",
    "caterpillar",
    "complete_binary",
    "random_attachment",
    "lower_bound:1",
    "lower_bound:2",
    "lower_bound:8",
)


def corpus_trees(sizes, random_seeds=(1, 2, 3, 4, 5)):
    """Yield (name, tree) over the standard verification corpus.

    Kinds with structural constraints are skipped at sizes they cannot
    realise.
    """
    for n in sizes:
        for kind in CORPUS_KINDS:
            if kind == "random_attachment":
                for seed in random_seeds:
                    yield f"{kind}/n={n}/seed={seed}", gen_tree(kind, n, seed)
                continue
            try:
                t = gen_tree(kind, n)
            except ValueError:
                continue
            yield f"{kind}/n={n}", t
