"""Command-line front end: ``infcen <command> [options]``.

Results go to stdout as CSV, preceded by ``#key=value`` stats lines.  Timing
goes to stderr so that stdout is byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import exact, synth
from .diffusion import estimate_spread_mc
from .estimators import SHAPLEY, SNI, EstimatorParams, NodeWeights, run, set_threads
from .graph import FromFile, GraphFormatError, load_edge_list, parse_scheme, serialize, serialize_id_map
from .im import rr_greedy


class UsageError(Exception):
    pass


def _read_text(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_graph(args):
    return load_edge_list(_read_text(args.graph), directed=not args.undirected, scheme=args.scheme)


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get("INFCEN_THREADS")
    return int(env) if env else None


def _node_ids(g, tokens):
    index = {label: i for i, label in enumerate(g.labels)}
    out = []
    for tok in tokens:
        if tok not in index:
            raise UsageError(f"unknown node label {tok!r}")
        out.append(index[tok])
    return out


def _read_weights(path, g):
    w = np.zeros(g.n)
    index = {label: i for i, label in enumerate(g.labels)}
    seen = set()
    for lineno, raw in enumerate(_read_text(path).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in index:
            raise UsageError(f"weights line {lineno}: expected '<node label> <weight>'")
        w[index[parts[0]]] = float(parts[1])
        seen.add(parts[0])
    if len(seen) != g.n:
        raise UsageError(f"weights file covers {len(seen)} of {g.n} nodes")
    return NodeWeights(w)


def _emit_values(out, labels, values, stats):
    for key, val in stats.items():
        out.write(f"#{key}={val}\n")
    order = np.lexsort((np.arange(len(values)), -np.asarray(values)))
    out.write("node,value\n")
    for i in order:
        out.write(f"{labels[i]},{values[i]:.10g}\n")


def cmd_centrality(args, out, err):
    g = _load_graph(args)
    weights = _read_weights(args.weights, g) if args.weights else None
    params = EstimatorParams(
        epsilon=args.epsilon,
        ell=args.ell,
        k=min(args.k, g.n),
        seed=args.seed,
        mode=args.mode,
        weights=weights,
        near_linear=args.near_linear,
    )
    res = run(g, params, threads=_threads(args))
    stats = {
        "mode": res.mode,
        "n": g.n,
        "m": g.m,
        "theta": res.theta,
        "theta_phase1": res.theta_phase1,
        "lb": f"{res.lb:.10g}",
        "sum": f"{res.estimates.sum():.10g}",
    }
    if "pr_clamped" in g.meta:
        stats["pr_clamped"] = g.meta["pr_clamped"]
    _emit_values(out, g.labels, res.estimates, stats)
    err.write(f"#wall_ms={res.wall_time * 1000:.1f}\n")


def cmd_spread(args, out, err):
    g = _load_graph(args)
    if os.path.isfile(args.seeds):
        tokens = _read_text(args.seeds).split()
    else:
        tokens = args.seeds.split(",")
    seeds = _node_ids(g, [t for t in tokens if t])
    set_threads(_threads(args))
    est = estimate_spread_mc(g, seeds, args.sims, args.seed)
    out.write(f"#num_sims={est.num_sims}\n")
    out.write("mean,stderr\n")
    out.write(f"{est.mean:.10g},{est.stderr:.10g}\n")


def _load_oracle_input(args):
    text = _read_text(args.graph)
    if text.lstrip().startswith("{"):
        return exact.ExplicitInstance.from_json(text), None
    g = load_edge_list(text, directed=not args.undirected, scheme=args.scheme)
    return g, g.labels


def cmd_exact(args, out, err):
    obj, labels = _load_oracle_input(args)
    if labels is None:
        labels = [str(i) for i in range(obj.n)]
    if args.what == "fixture":
        inst = obj if isinstance(obj, exact.ExplicitInstance) else exact.graph_to_instance(obj)
        out.write(inst.to_json() + "\n")
        return
    if args.what == "shapley":
        values = exact.exact_shapley(obj)
    elif args.what == "sni":
        values = np.array([exact.exact_sni(obj, v) for v in range(obj.n)])
    else:
        if not args.seeds:
            raise UsageError("exact --what spread needs --seeds")
        index = {label: i for i, label in enumerate(labels)}
        ids = [index[t] for t in args.seeds.split(",") if t]
        if isinstance(obj, exact.ExplicitInstance):
            value = obj.spread(exact.mask_of(ids))
        else:
            value = exact.exact_spread(obj, ids)
        out.write("spread\n")
        out.write(f"{value:.12g}\n")
        return
    _emit_values(out, labels, values, {"what": args.what, "n": obj.n})


def _parse_ids(text):
    return [int(t) for t in text.split(",") if t]


def cmd_synth(args, out, err):
    fx = args.fixture
    if fx == "fig1":
        out.write(serialize(synth.fig1(args.p), labels=True))
    elif fx == "symmetric-cycle":
        out.write(serialize(synth.symmetric_cycle(args.n, args.p)))
    elif fx == "star":
        out.write(serialize(synth.star(args.leaves, args.p)))
    elif fx == "null":
        out.write(exact.null_instance(args.n).to_json() + "\n")
    elif fx == "critical":
        if not args.R:
            raise UsageError("critical fixture needs --R")
        R = _parse_ids(args.R)
        U = _parse_ids(args.U) if args.U else R + [args.n - 1]
        out.write(exact.critical_set_instance(args.n, R, sorted(set(U))).to_json() + "\n")


def cmd_im(args, out, err):
    g = _load_graph(args)
    set_threads(_threads(args))
    res = rr_greedy(g, min(args.k, g.n), args.rr, args.seed)
    out.write(f"#num_rr={args.rr}\n#coverage={res.coverage:.10g}\n#est_spread={res.est_spread:.10g}\n")
    out.write("rank,node,coverage\n")
    for i, (v, c) in enumerate(zip(res.seeds, res.coverage_trace), start=1):
        out.write(f"{i},{g.labels[v]},{c:.10g}\n")


def cmd_convert(args, out, err):
    g = _load_graph(args)
    out.write(serialize(g))
    if args.idmap:
        with open(args.idmap, "w") as fh:
            fh.write(serialize_id_map(g))


def _scheme(text):
    try:
        return parse_scheme(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(prog="infcen", description="Influence-based network centrality.")
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_opts(p, scheme_default="file"):
        p.add_argument("--graph", "-g", default="-", help="edge-list file ('-' for stdin)")
        p.add_argument("--scheme", type=_scheme, default=_scheme(scheme_default),
                       help="wc | pr[:restart] | const:P | file (default: %(default)s)")
        p.add_argument("--undirected", action="store_true", help="add both directions of every line")
        p.add_argument("--threads", type=int, default=None)

    for name in ("centrality", "sni"):
        p = sub.add_parser(name, help="RR-set centrality estimates")
        graph_opts(p)
        p.add_argument("--mode", choices=(SHAPLEY, SNI), default=SNI if name == "sni" else SHAPLEY)
        p.add_argument("--epsilon", type=float, default=0.5)
        p.add_argument("--ell", type=float, default=1.0)
        p.add_argument("--k", type=int, default=50)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--weights", help="file of '<node> <weight>' lines")
        p.add_argument("--near-linear", action="store_true")
        p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("spread", help="Monte-Carlo influence spread")
    graph_opts(p)
    p.add_argument("--seeds", required=True, help="comma-separated labels or a file of labels")
    p.add_argument("--sims", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_spread)

    p = sub.add_parser("exact", help="brute-force oracles (small inputs)")
    graph_opts(p)
    p.add_argument("--what", choices=("shapley", "sni", "spread", "fixture"), default="shapley")
    p.add_argument("--seeds", help="seed labels for --what spread")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("synth", help="emit a named fixture")
    p.add_argument("--fixture", required=True,
                   choices=("critical", "null", "fig1", "symmetric-cycle", "star"))
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--leaves", type=int, default=3)
    p.add_argument("--R", help="critical set, comma-separated ids")
    p.add_argument("--U", help="activated set, comma-separated ids (default R plus node n-1)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("im", help="greedy max-cover seed selection")
    graph_opts(p)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--rr", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_im)

    p = sub.add_parser("convert", help="apply a probability scheme and write 'u v p' lines")
    graph_opts(p)
    p.add_argument("--idmap", help="write 'label id' lines here")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command in ("centrality", "sni") and args.weights and args.mode != SHAPLEY:
        err.write("infcen: --weights is only supported with --mode shapley\n")
        return 2
    try:
        args.func(args, out, err)
    except UsageError as exc:
        err.write(f"infcen: {exc}\n")
        return 2
    except (GraphFormatError, ValueError, OSError, MemoryError, OverflowError) as exc:
        err.write(f"infcen: error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
