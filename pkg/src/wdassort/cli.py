"""Command-line interface: ``wdassort {assort,generate,rewire,backbone,experiment}``.

Exit codes: 0 success, 2 input or flag error, 3 unreachable rewiring target.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import __version__
from .assort import assortativity_profile, failure_reason, feature_assortativity
from .backbone import extract_backbone
from .errors import DegenerateVarianceError, InfeasibleTargetError, WdassortError
from .experiment import DESIGNS, run_design, summarize
from .gen import BaConfig, ErConfig, SbmConfig, gen_ba, gen_er, gen_sbm
from .graph import WeightedDigraph, build_graph, unit_weights
from .io import (COEFFICIENT_HEADER, EXPERIMENT_HEADER, SUMMARY_HEADER, read_edge_csv, read_feature_csv,
                 write_edge_csv, write_rows, write_significance_csv)
from .rewire import RewireConfig, StrengthDistribution, run_rewire

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    """Invalid flag combination detected after argument parsing."""


def _split_graph(g: WeightedDigraph) -> WeightedDigraph:
    """Treat every stored edge as undirected and apply the half-weight split."""
    rows = []
    for s, t, w in g.edges():
        rows += [(s, t, w / 2.0), (t, s, w / 2.0)]
    return build_graph(rows, g.n)


def _feature_value(graph, cols, a, b):
    try:
        return feature_assortativity(graph, cols[a], cols[b])
    except DegenerateVarianceError as exc:
        return f"NA:degenerate-variance:{a if exc.side == 'source' else b}"
    except WdassortError as exc:
        return f"NA:{failure_reason(exc)}"


def cmd_assort(args, out) -> int:
    g, labels = read_edge_csv(args.edges)
    if args.undirected:
        g = _split_graph(g)
    measures = ["unweighted"] if args.unweighted else ["weighted", "unweighted"]
    rows = []
    if args.features:
        if not (args.x and args.y):
            raise UsageError("--features requires --x and --y")
        table = read_feature_csv(args.features, labels)
        cols = {args.x: table.column(args.x), args.y: table.column(args.y)}
        pairs = [(args.x, args.x), (args.x, args.y), (args.y, args.x), (args.y, args.y)]
        for measure in measures:
            graph = g if measure == "weighted" else unit_weights(g)
            for a, b in pairs:
                rows.append([measure, a, b, _feature_value(graph, cols, a, b)])
    else:
        if args.x or args.y:
            raise UsageError("--x/--y require --features")
        profile = assortativity_profile(g)
        for measure, alpha, beta, value in profile.rows():
            if measure in measures:
                rows.append([measure, alpha, beta,
                             value if value is not None else f"NA:{profile.reasons[(measure, alpha, beta)]}"])
    write_rows(out, COEFFICIENT_HEADER, rows)
    return 0


_MODEL_FLAGS = {
    "er": {"n", "p", "theta"},
    "ba": {"steps", "alpha", "delta_in", "delta_out", "theta", "big_edge_step", "big_edge_weight"},
    "sbm": {"community_size", "p_within", "p_between", "between_weight", "wr1", "wr2"},
}


def _interval(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LOW,HIGH, got {text!r}") from None
    return lo, hi


def cmd_generate(args, out) -> int:
    given = {k for k in set().union(*_MODEL_FLAGS.values()) if getattr(args, k) is not None}
    foreign = given - _MODEL_FLAGS[args.model]
    if foreign:
        flags = ", ".join("--" + f.replace("_", "-") for f in sorted(foreign))
        raise UsageError(f"{flags} not valid with --model {args.model}")

    def opt(name, default):
        value = getattr(args, name)
        return default if value is None else value

    rng = np.random.default_rng(args.seed)
    if args.model == "er":
        g = gen_er(ErConfig(opt("n", 150), opt("p", 0.2), opt("theta", 10)), rng)
    elif args.model == "ba":
        big = None
        if args.big_edge_step is not None:
            big = (args.big_edge_step, opt("big_edge_weight", 1000.0))
        elif args.big_edge_weight is not None:
            raise UsageError("--big-edge-weight requires --big-edge-step")
        alpha = opt("alpha", 0.6)
        cfg = BaConfig(opt("steps", 500), alpha, 1.0 - alpha, opt("delta_in", 1.0), opt("delta_out", 1.0),
                       opt("theta", 10), big)
        g = gen_ba(cfg, rng)
    else:
        cfg = SbmConfig(opt("community_size", 500), opt("p_within", 0.2), opt("p_between", 0.02),
                        opt("wr1", (0.0, 5.0)), opt("wr2", (5.0, 10.0)), opt("between_weight", 5.0))
        g = gen_sbm(cfg, rng)
    write_edge_csv(g, args.out or out)
    return 0


def cmd_rewire(args, out) -> int:
    dist = StrengthDistribution.power_law_cutoff(args.z_min, args.z_max, args.exponent, args.cutoff)
    steps = args.steps if args.steps is not None else 1000 * args.n
    cfg = RewireConfig(args.n, args.xi, steps, args.seed, distribution=dist,
                       selection=args.selection, link_basis=args.link_basis)
    res = run_rewire(cfg)
    to_stdout = args.out in (None, "-")
    write_edge_csv(res.graph, out if to_stdout else args.out, undirected=True)
    report = sys.stderr if to_stdout else out
    write_rows(report, ["xi", "achieved_weighted", "achieved_unweighted", "initial_weighted"],
               [[args.xi, res.achieved_weighted, res.achieved_unweighted, res.initial_weighted]])
    return 0


def cmd_backbone(args, out) -> int:
    if not 0.0 < args.alpha < 1.0:
        raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")
    g, labels = read_edge_csv(args.edges)
    bb, sig = extract_backbone(g, args.alpha, keep_exempt=not args.drop_exempt)
    write_edge_csv(bb, out if args.out in (None, "-") else args.out, labels=labels)
    if args.significance:
        write_significance_csv(sig, args.significance, labels=labels)
    kept = bb.total_weight / g.total_weight if g.total_weight else float("nan")
    logging.getLogger(__name__).info("kept %d of %d edges, %.4f of total weight", bb.edge_count,
                                     g.edge_count, kept)
    return 0


def _parse_params(items):
    params = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        key = key.strip().replace("-", "_")
        params[key] = [v for v in value.split(",")] if key in ("grid", "k_values") else value
    return params


def cmd_experiment(args, out) -> int:
    params = _parse_params(args.param)
    if args.grid:
        params["grid"] = args.grid.split(",")
    records = run_design(args.design, args.replicates, args.seed, params, workers=args.workers)
    write_rows(args.out or out, EXPERIMENT_HEADER, (r.row() for r in records))
    if args.summary:
        write_rows(args.summary, SUMMARY_HEADER, (r.row() for r in summarize(records)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wdassort", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assort", help="assortativity coefficients of an edge CSV")
    p.add_argument("--edges", required=True)
    p.add_argument("--features", help="feature CSV with header vertex,<name>...")
    p.add_argument("--x", help="source-side feature column")
    p.add_argument("--y", help="target-side feature column")
    p.add_argument("--unweighted", action="store_true", help="emit only the unweighted coefficients")
    p.add_argument("--undirected", action="store_true",
                   help="treat rows as undirected edges (half-weight split in both directions)")
    p.set_defaults(func=cmd_assort)

    p = sub.add_parser("generate", help="sample a random weighted directed graph")
    p.add_argument("--model", choices=sorted(_MODEL_FLAGS), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", help="output edge CSV (default: stdout)")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--theta", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--alpha", type=float, help="probability that the newcomer is the source")
    p.add_argument("--delta-in", type=float)
    p.add_argument("--delta-out", type=float)
    p.add_argument("--big-edge-step", type=int)
    p.add_argument("--big-edge-weight", type=float)
    p.add_argument("--community-size", type=int)
    p.add_argument("--p-within", type=float)
    p.add_argument("--p-between", type=float)
    p.add_argument("--between-weight", type=float)
    p.add_argument("--wr1", type=_interval, help="community-1 weight range LOW,HIGH")
    p.add_argument("--wr2", type=_interval, help="community-2 weight range LOW,HIGH")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rewire", help="rewire a random network to a target assortativity")
    p.add_argument("--xi", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--steps", type=int, help="rewiring proposals (default 1000 * n)")
    p.add_argument("--z-min", type=int, default=10)
    p.add_argument("--z-max", type=int, default=100)
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--cutoff", type=float, default=100.0)
    p.add_argument("--selection", choices=["weight", "uniform"], default="weight")
    p.add_argument("--link-basis", choices=["empirical", "distribution"], default="empirical")
    p.add_argument("--out", help="rewired undirected edge CSV (default: stdout; report then goes to stderr)")
    p.set_defaults(func=cmd_rewire)

    p = sub.add_parser("backbone", help="disparity-filter backbone")
    p.add_argument("--edges", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out", help="backbone edge CSV (default: stdout)")
    p.add_argument("--significance", help="write per-edge p-values to this CSV")
    p.add_argument("--drop-exempt", action="store_true",
                   help="drop edges whose source out-degree and target in-degree are both 1")
    p.set_defaults(func=cmd_backbone)

    p = sub.add_parser("experiment", help="replicated ensemble designs")
    p.add_argument("--design", choices=sorted(DESIGNS), required=True)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--grid", help="comma-separated values of the swept parameter")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a design setting")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="long-format records CSV (default: stdout)")
    p.add_argument("--summary", help="write per-cell summary rows to this CSV")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, out)
    except InfeasibleTargetError as exc:
        print(f"wdassort: infeasible target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, WdassortError, OSError, ValueError) as exc:
        print(f"wdassort: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
