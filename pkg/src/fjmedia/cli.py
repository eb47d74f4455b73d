"""Command-line harness.

Subcommands:
    generate      write a synthetic graph as an edge list
    equilibrium   one media-augmented period per repetition, with sum bounds
    periods       the full multi-period protocol
    nonstubborn   single persuadable source (alpha = 1)
    bounds        analytic formulas only, no solves

Run `fjmedia <subcommand> --help` for flags.
"""

from __future__ import annotations

import argparse
import sys

from .graph import write_edge_list
from .harness import ExperimentConfig, GraphSpec, run_experiment
from .numerics import ConvergenceError


def _add_graph_source(p: argparse.ArgumentParser, *, for_generate: bool = False):
    if not for_generate:
        p.add_argument("--graph", metavar="PATH", help="edge-list file to load")
    p.add_argument("--gen", choices=("ba", "dreg"), help="graph generator")
    p.add_argument("--n", type=int, help="node count for --gen")
    p.add_argument("--m", type=int, help="edges per new node (ba)")
    p.add_argument("--d", type=int, help="degree (dreg)")


def _add_run_flags(p: argparse.ArgumentParser, *, default_alpha=None):
    p.add_argument("--alpha", type=float, required=default_alpha is None,
                   default=default_alpha, help="fraction of nodes following M")
    p.add_argument("--beta", type=float, required=True, help="media strength")
    p.add_argument("--gamma", type=float, required=True, help="source opinion spread")
    p.add_argument("--reps", type=int, default=20, help="repetitions (default 20)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    p.add_argument("--tol", type=float, default=1e-10, help="solver tolerance")
    p.add_argument("--innate-mu", type=float, default=0.5,
                   help="innate opinion mean (default 0.5)")
    p.add_argument("--innate-var", type=float, default=0.2,
                   help="innate opinion variance before clipping (default 0.2)")
    p.add_argument("--out", metavar="PATH",
                   help="CSV output path; manifest lands at PATH.manifest")


def _graph_spec(args) -> GraphSpec:
    if getattr(args, "graph", None):
        if args.gen:
            raise ValueError("--graph and --gen are mutually exclusive")
        return GraphSpec(kind="file", path=args.graph)
    if not args.gen:
        raise ValueError("need either --graph or --gen")
    if args.n is None:
        raise ValueError("--gen needs --n")
    if args.gen == "ba":
        if args.m is None:
            raise ValueError("--gen ba needs --m")
        return GraphSpec(kind="ba", n=args.n, m=args.m)
    if args.d is None:
        raise ValueError("--gen dreg needs --d")
    return GraphSpec(kind="dreg", n=args.n, d=args.d)


def _cmd_generate(args) -> int:
    spec = _graph_spec(args)
    graph = spec.build(args.seed)
    params = " ".join(f"{k}={v}" for k, v in spec.describe())
    comment = f"fjmedia generate: {params} seed={args.seed}"
    if args.out:
        write_edge_list(graph, args.out, comment=comment)
        print(f"wrote {graph.n} nodes / {graph.m} edges to {args.out}")
    else:
        print(f"# {comment}")
        for u, v, w in graph.edges:
            print(f"{u} {v} {w:.17g}")
    return 0


def _cmd_run(args, mode: str) -> int:
    config = ExperimentConfig(
        mode=mode,
        graph=_graph_spec(args),
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        innate_mu=args.innate_mu,
        innate_var=args.innate_var,
        repetitions=args.reps,
        base_seed=args.seed,
        tol=args.tol,
        max_periods=getattr(args, "max_periods", 1000),
        epsilon=getattr(args, "epsilon", None),
        output=args.out,
    )
    _, rows = run_experiment(config)
    _print_summary(mode, rows)
    if args.out:
        print(f"wrote {args.out} and {args.out}.manifest")
    return 0


def _print_summary(mode: str, rows) -> None:
    if mode == "periods":
        by_rep: dict[int, dict] = {}
        for row in rows:
            by_rep[row["rep"]] = row  # rows are ordered, keep the last
        for rep, row in by_rep.items():
            print(f"rep {rep}: stop={row['stop_cause']} periods={row['period']} "
                  f"mean={row['mean_z']:.6f} sum={row['sum_z']:.6f}")
        return
    for row in rows:
        parts = [f"rep {row['rep']}:"]
        for key, val in row.items():
            if key == "rep":
                continue
            if isinstance(val, float):
                parts.append(f"{key}={val:.6f}")
            elif val is not None:
                parts.append(f"{key}={val}")
        print(" ".join(parts))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fjmedia",
        description="Friedkin-Johnsen opinion dynamics with media sources")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic graph edge list")
    _add_graph_source(p, for_generate=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", help="file to write (default stdout)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("equilibrium", help="single period, prints sum and bounds")
    _add_graph_source(p)
    _add_run_flags(p)
    p.set_defaults(func=lambda a: _cmd_run(a, "equilibrium"))

    p = sub.add_parser("periods", help="multi-period protocol")
    _add_graph_source(p)
    _add_run_flags(p)
    p.add_argument("--max-periods", type=int, default=1000, dest="max_periods")
    p.add_argument("--epsilon", type=float, default=None,
                   help="down-radicalization threshold (default 10/n)")
    p.set_defaults(func=lambda a: _cmd_run(a, "periods"))

    p = sub.add_parser("nonstubborn", help="single persuadable source")
    _add_graph_source(p)
    _add_run_flags(p, default_alpha=1.0)
    p.set_defaults(func=lambda a: _cmd_run(a, "nonstubborn"))

    p = sub.add_parser("bounds", help="analytic sum bounds, no solve")
    _add_graph_source(p)
    _add_run_flags(p)
    p.set_defaults(func=lambda a: _cmd_run(a, "bounds"))

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
