"""Command-line front end: generate trees, encode labels, answer routing
queries, verify against the brute-force oracle, and benchmark label
lengths.

Exit codes: 0 success, 1 verification mismatch, 2 usage error.

Labels file layout: a header comment carrying the scheme and its
parameters, one "node_id len:<bits> <hex>" line per node, then a PORTS
section with one "u child port" line per edge.  Everything is
deterministic for fixed arguments, so re-runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .bits import bits_to_hex, hex_to_bits
from .conformance import SCHEMES
from .grouping import ceil_log2
from .tree import FirstHopOracle, canonical_ports, decompose, gen_tree, \
    parse_tree

BENCH_HEADER = ("scheme", "n", "kind", "seed", "max_label_bits",
                "mean_label_bits", "encode_ms", "verify", "second_order")


def _threads():
    try:
        return max(1, int(os.environ.get("TREELABEL_THREADS", "1")))
    except ValueError:
        return 1


def _load_tree(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tree(fh.read())


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_gen(args):
    t = gen_tree(args.kind, args.n, args.seed)
    _write(args.output, t.to_text())
    return 0


def _scheme_and_params(args, n):
    scheme = SCHEMES[args.scheme]
    return scheme, scheme.params(n, b=args.b, c=args.c)


def _params_header(scheme, n, params):
    fields = " ".join(f"{k}={params[k]}" for k in sorted(params))
    return f"# treelabel scheme={scheme.name} n={n}" + (f" {fields}" if fields else "")


def encode_text(scheme, t, params):
    labels, ports = scheme.encode(t, params, None)
    out = [_params_header(scheme, t.n, params)]
    for u, l in enumerate(labels):
        out.append(f"{u} {bits_to_hex(scheme.pack(l, params))}")
    out.append("PORTS")
    if ports is None:
        ports = canonical_ports(t, decompose(t))
    for u in range(t.n):
        for i, c in enumerate(ports.order[u]):
            out.append(f"{u} {c} {i + 1}")
    return "\n".join(out) + "\n"


def cmd_encode(args):
    t = _load_tree(args.tree)
    scheme, params = _scheme_and_params(args, t.n)
    _write(args.output, encode_text(scheme, t, params))
    return 0


def parse_labels_file(text):
    """-> (scheme, n, params, labels, ports dict {(u, child): port})"""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# treelabel "):
        raise ValueError("missing labels file header")
    meta = dict(f.split("=", 1) for f in lines[0].split()[2:])
    scheme = SCHEMES[meta.pop("scheme")]
    n = int(meta.pop("n"))
    params = {k: int(v) for k, v in meta.items()}
    labels = [None] * n
    ports = {}
    in_ports = False
    for ln in lines[1:]:
        if ln == "PORTS":
            in_ports = True
            continue
        if in_ports:
            u, c, port = (int(x) for x in ln.split())
            ports[(u, c)] = port
        else:
            node, rest = ln.split(" ", 1)
            labels[int(node)] = scheme.unpack(hex_to_bits(rest), n, params)
    if any(l is None for l in labels):
        raise ValueError("labels file is missing nodes")
    return scheme, n, params, labels, ports


def cmd_route(args):
    with open(args.labels, "r", encoding="utf-8") as fh:
        scheme, n, params, labels, _ = parse_labels_file(fh.read())
    if not (0 <= args.u < n and 0 <= args.w < n):
        raise SystemExit(2)
    if args.u == args.w:
        print("u and w must differ", file=sys.stderr)
        raise SystemExit(2)
    print(scheme.route(labels, args.u, args.w, n, params))
    return 0


def _verify_block(scheme, labels, oracle, n, params, us, sample_rng=None,
                  sample_count=0):
    if sample_rng is not None:
        pairs = []
        while len(pairs) < sample_count:
            u, w = sample_rng.randrange(n), sample_rng.randrange(n)
            if u != w:
                pairs.append((u, w))
    else:
        pairs = ((u, w) for u in us for w in range(n) if u != w)
    for u, w in pairs:
        got = scheme.route(labels, u, w, n, params)
        exp = (oracle.is_ancestor(u, w) if scheme.ancestor_only
               else oracle.first_hop(u, w))
        if got != exp:
            return (u, w, got, exp)
    return None


def verify_tree(scheme, t, params, mode="exhaustive"):
    """-> None on success, else the first mismatch (u, w, got, expected)."""
    labels, ports = scheme.encode(t, params, None)
    if ports is None:
        ports = canonical_ports(t, decompose(t))
    oracle = FirstHopOracle(t, ports)
    n = t.n
    if mode.startswith("sample:"):
        k = int(mode.split(":", 1)[1])
        return _verify_block(scheme, labels, oracle, n, params, None,
                             sample_rng=random.Random(0), sample_count=k)
    if mode != "exhaustive":
        raise ValueError(f"unknown mode {mode!r}")
    nthreads = _threads()
    if nthreads == 1 or n < 256:
        return _verify_block(scheme, labels, oracle, n, params, range(n))
    chunks = [range(i, n, nthreads) for i in range(nthreads)]
    with ThreadPoolExecutor(max_workers=nthreads) as ex:
        for res in ex.map(lambda us: _verify_block(scheme, labels, oracle,
                                                   n, params, us), chunks):
            if res is not None:
                return res
    return None


def cmd_verify(args):
    t = _load_tree(args.tree)
    scheme, params = _scheme_and_params(args, t.n)
    res = verify_tree(scheme, t, params, args.mode)
    if res is None:
        print(f"PASS {scheme.name} n={t.n} mode={args.mode}")
        return 0
    u, w, got, exp = res
    print(f"FAIL {scheme.name} n={t.n}: pair ({u}, {w}) routed {got}, "
          f"oracle says {exp}")
    return 1


def bench_row(scheme_name, kind, n, seed, verify_mode="sample:2000"):
    scheme = SCHEMES[scheme_name]
    t = gen_tree(kind, n, seed)
    params = scheme.params(t.n)
    t0 = time.perf_counter()
    labels, _ = scheme.encode(t, params, None)
    encode_ms = round((time.perf_counter() - t0) * 1e3, 1)
    sizes = [scheme.label_bits(l, params) for l in labels]
    mx = max(sizes)
    status = "pass" if verify_tree(scheme, t, params, verify_mode) is None \
        else "FAIL"
    cl = max(1, ceil_log2(n))
    cll = max(1, ceil_log2(cl))
    second = round((mx - cl) / cll ** 2, 3) if scheme_name == "final" else ""
    return {"scheme": scheme_name, "n": n, "kind": kind, "seed": seed,
            "max_label_bits": mx,
            "mean_label_bits": round(sum(sizes) / len(sizes), 2),
            "encode_ms": encode_ms, "verify": status, "second_order": second}


def run_bench(schemes, kinds, sizes, seed, csv_path, figures=True):
    items = [(s, k, n) for s in schemes for k in kinds for n in sizes]
    nthreads = _threads()
    if nthreads == 1:
        rows = [bench_row(s, k, n, seed) for s, k, n in items]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            rows = list(ex.map(lambda it: bench_row(*it, seed), items))
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=BENCH_HEADER)
        w.writeheader()
        w.writerows(rows)
    if figures:
        write_figures(rows, csv_path)
    return rows


def write_figures(rows, csv_path):
    """Label-length and second-order-ratio plots next to the CSV."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stem = os.path.splitext(csv_path)[0]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    by_series = {}
    for r in rows:
        by_series.setdefault((r["scheme"], r["kind"]), []).append(
            (r["n"], r["max_label_bits"]))
    for (scheme, kind), pts in sorted(by_series.items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", label=f"{scheme}/{kind}")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("max label bits")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(stem + "_bits.png", dpi=120)
    plt.close(fig)

    finals = [r for r in rows if r["second_order"] != ""]
    if finals:
        fig, ax = plt.subplots(figsize=(7, 4.5))
        by_kind = {}
        for r in finals:
            by_kind.setdefault(r["kind"], []).append((r["n"],
                                                      r["second_order"]))
        for kind, pts in sorted(by_kind.items()):
            pts.sort()
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    marker="o", label=kind)
        ax.set_xscale("log", base=2)
        ax.set_xlabel("n")
        ax.set_ylabel("(max bits - ceil(log n)) / ceil(log log n)^2")
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(stem + "_second_order.png", dpi=120)
        plt.close(fig)


def cmd_bench(args):
    schemes = args.scheme.split(",") if args.scheme else ["final"]
    kinds = args.kind.split(",") if args.kind else ["random_attachment"]
    sizes = [int(x) for x in args.n.split(",")]
    for s in schemes:
        if s not in SCHEMES:
            raise SystemExit(2)
    rows = run_bench(schemes, kinds, sizes, args.seed, args.csv,
                     figures=not args.no_figures)
    if any(r["verify"] != "pass" for r in rows):
        return 1
    print(f"wrote {args.csv} ({len(rows)} rows)")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="treelabel",
        description="Routing labeling schemes for rooted trees.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="generate a tree file")
    g.add_argument("--kind", required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(fn=cmd_gen)

    e = sub.add_parser("encode", help="encode labels for a tree file")
    e.add_argument("tree")
    e.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    e.add_argument("--b", type=int)
    e.add_argument("--c", type=int)
    e.add_argument("-o", "--output", default="-")
    e.set_defaults(fn=cmd_encode)

    r = sub.add_parser("route", help="first hop from u towards w")
    r.add_argument("labels")
    r.add_argument("u", type=int)
    r.add_argument("w", type=int)
    r.set_defaults(fn=cmd_route)

    v = sub.add_parser("verify", help="check a scheme against the oracle")
    v.add_argument("tree")
    v.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    v.add_argument("--b", type=int)
    v.add_argument("--c", type=int)
    v.add_argument("--mode", default="exhaustive")
    v.set_defaults(fn=cmd_verify)

    b = sub.add_parser("bench", help="label-length benchmark -> CSV + figures")
    b.add_argument("--scheme", help="comma-separated scheme names")
    b.add_argument("--kind", help="comma-separated generator kinds")
    b.add_argument("--n", required=True, help="comma-separated sizes")
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--csv", required=True)
    b.add_argument("--no-figures", action="store_true")
    b.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
