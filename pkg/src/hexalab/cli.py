"""Command-line front end (``hexalab <subcommand> ...``).

Exit codes: 0 success, 2 usage or parse error, 3 infeasible
configuration, 4 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import complex as cx
from .complex import ResourceLimitError, SchemaError
from .metric import WeightParam, d_upper, metric_bracket, theta_chain_profile
from .symbolic import format_point, parse_point, word

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_RESOURCE = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def cache_dir() -> Path:
    return Path(os.environ.get("HEXALAB_CACHE_DIR", Path.home() / ".cache" / "hexalab"))


def cache_path(kind: str, level: int) -> Path:
    return cache_dir() / f"{kind}-{level}.json"


def fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return f"{float(v):.12g}"


def _mu(text: str) -> WeightParam:
    try:
        return WeightParam.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _point(text: str):
    try:
        return parse_point(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _word(text: str) -> tuple:
    if text in ("", "e"):
        return ()
    try:
        return word(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _words(text: str) -> tuple:
    return tuple(_word(t.strip()) for t in text.split(","))


def _ints(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _emit(args, header, rows, extra=None) -> None:
    """Write a table as CSV (default) or JSON to ``--out`` or stdout."""
    if getattr(args, "format", "csv") == "json":
        doc = {"columns": header, "rows": rows}
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=1, default=str) + "\n"
    else:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(header)
        wr.writerows(rows)
        text = buf.getvalue()
    _write(args, text)


def _write(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# --- subcommands ---------------------------------------------------------------


def _build_graph(kind: str, level: int):
    if kind == "G":
        return cx.build_cell_graph(level)
    if kind == "H":
        return cx.build_vertex_graph(level)
    return cx.build_chain_complex(level)


def _get_graph(kind: str, level: int, use_cache: bool):
    path = cache_path(kind, level)
    if use_cache and path.exists():
        return cx.load_graph(path)
    return _build_graph(kind, level)


def cmd_build(args) -> int:
    g = _build_graph(args.kind, args.level)
    path = Path(args.out) if args.out else cache_path(args.kind, args.level)
    path.parent.mkdir(parents=True, exist_ok=True)
    cx.save_graph(g, path)
    print(f"{args.kind} level={args.level} nodes={g.n_nodes} edges={g.n_edges} -> {path}")
    return EXIT_OK


def cmd_graph_diameter(args) -> int:
    rows = []
    for n in args.level:
        g = _get_graph(args.kind, n, not args.no_cache)
        if args.mode == "exact":
            lo = hi = cx.diameter(g, mode="exact")
        else:
            b = cx.diameter(g, mode="bounds", max_bfs=args.max_bfs)
            lo, hi = b.lower, b.upper
        scale = n * 2**n if n else 1
        rows.append([args.kind, n, g.n_nodes, g.n_edges, lo, hi, int(lo == hi), f"{lo / scale:.12g}"])
    _emit(args, ["kind", "level", "nodes", "edges", "lower", "upper", "exact", "ratio"], rows)
    return EXIT_OK


def _metric_row(x, y, mu, N):
    est = metric_bracket(x, y, N, mu)
    row = [format_point(x), format_point(y), str(mu), N, fmt_value(est.lower), fmt_value(est.upper), len(est.witness)]
    return row, est


METRIC_COLUMNS = ["x", "y", "mu", "depth", "lower", "upper", "witness_len"]


def cmd_metric(args) -> int:
    row, est = _metric_row(args.from_, args.to, args.mu, args.depth)
    extra = {
        "witness": ["".join(map(str, w)) or "e" for w in est.witness],
        "certificate": est.certificate,
    }
    _emit(args, METRIC_COLUMNS, [row], extra)
    return EXIT_OK


def cmd_metric_matrix(args) -> int:
    if args.points:
        pts = [_point(p) for p in args.points.split(",")]
    else:
        pts = cx.build_vertex_graph(args.k).vertices
    rows = []
    for i, x in enumerate(pts):
        for y in pts[i + 1 :]:
            rows.append(_metric_row(x, y, args.mu, args.depth)[0])
    _emit(args, METRIC_COLUMNS, rows)
    return EXIT_OK


def cmd_chain_experiment(args) -> int:
    prof = theta_chain_profile(args.from_, args.to, args.k, args.depth, args.mu, args.steps)
    rows = [
        [n, fmt_value(e), f"{s:.12g}"]
        for (n, e), (_, s) in zip(prof.rows, prof.scaled(args.theta))
    ]
    _emit(args, ["n", "eps", "eps_scaled"], rows, {"distance": fmt_value(prof.distance), "theta": args.theta})
    return EXIT_OK


def cmd_exit_dist(args) -> int:
    from .moves import WalkConfig, exit_distribution, make_move_configs, mc_exit

    configs = make_move_configs(args.move, args.base, args.k)
    if args.orientation is not None:
        if not 0 <= args.orientation < len(configs):
            raise UsageError(f"orientation must be in 0..{len(configs) - 1}")
        configs = [configs[args.orientation]]
    exact = {"auto": None, "exact": True, "float": False}[args.arith]
    header = ["kind", "base", "k", "start", "face", "prob"]
    rows = []
    any_exact = False
    reports = []
    for c in configs:
        r = exit_distribution(c, exact=exact)
        reports.append(r)
        any_exact |= r.exact
    if any_exact:
        header.append("prob_exact")
    if args.trials:
        header.append("mc_freq")
    for i, r in enumerate(reports):
        recs = r.rows()
        if any_exact and not r.exact:
            recs = [rec + [""] for rec in recs]
        if args.trials:
            mc = mc_exit(r.config, WalkConfig(args.seed + i, args.trials))
            freqs = [f"{f:.12g}" for row in mc.freqs for f in row]
            recs = [rec + [f] for rec, f in zip(recs, freqs)]
        rows += recs
    _emit(args, header, rows)
    return EXIT_OK


def cmd_hit_prob(args) -> int:
    from .moves import cell_vertex_ids, geodesic_paths, hitting_function, loop_erased_path

    g = cx.build_vertex_graph(args.k)
    w = args.cell
    inner = w + (5, 3)
    if len(inner) > args.k:
        raise UsageError("walk level must be at least |cell| + 2")
    starts = [int(v) for v in cell_vertex_ids(g, inner)]
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0]))
    gammas = [("lerw", loop_erased_path(g, w, starts[i % len(starts)], rng)) for i in range(args.samples)]
    if args.geodesics:
        gammas += [("geodesic", p) for y in starts for p in geodesic_paths(g, w, y)]
    rows = []
    for gi, (src, path) in enumerate(gammas):
        h = hitting_function(w, args.k, path, exact=not args.float)
        for x in starts:
            p = h[x]
            rows.append([gi, src, len(path), format_point(g.vertices[x]), f"{float(p):.12g}", fmt_value(p)])
    _emit(args, ["gamma", "source", "length", "x", "prob", "prob_exact"], rows)
    return EXIT_OK


def cmd_harnack(args) -> int:
    from .harnack import harnack_ratio
    from .moves import cell_vertex_ids

    rows = []
    for n in args.level:
        g = cx.build_vertex_graph(n)
        cell = args.cell if args.cell is not None else (0,) * n
        N = args.depth if args.depth else n + args.depth_offset
        js = args.j if args.j else list(range(1, n + 1))
        for v in cell_vertex_ids(g, cell):
            for j in js:
                rows.append(harnack_ratio(n, g.vertices[int(v)], j, N, args.mu).row())
    _emit(args, ["n", "x", "j", "N", "mu", "ratio", "vacuous", "component_size"], rows)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .plot import plot_csv

    svg = plot_csv(args.in_, x=args.x, y=args.y, group=args.group)
    _write(args, svg)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hexalab", description="Hexacarpet metric and harmonic-analysis toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def out_opts(sp, formats=("csv", "json")):
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0])

    def mu_opt(sp, default="1/2"):
        sp.add_argument("--mu", type=_mu, default=_mu(default), help="weight parameter, p/q or decimal")

    b = sub.add_parser("build", help="build a graph and write it to the cache")
    b.add_argument("--kind", choices=("G", "H", "complex"), default="H")
    b.add_argument("--level", "-n", type=int, required=True)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    d = sub.add_parser("graph-diameter", help="diameter of G_n or H_n")
    d.add_argument("--kind", choices=("G", "H"), default="G")
    d.add_argument("--level", "-n", type=_ints, required=True, help="comma-separated levels")
    d.add_argument("--mode", choices=("exact", "bounds"), default="exact")
    d.add_argument("--max-bfs", type=int)
    d.add_argument("--no-cache", action="store_true")
    out_opts(d)
    d.set_defaults(func=cmd_graph_diameter)

    m = sub.add_parser("metric", help="bracket for d_mu(x, y)")
    mu_opt(m)
    m.add_argument("--depth", "-N", type=int, default=5)
    m.add_argument("--from", dest="from_", type=_point, required=True)
    m.add_argument("--to", type=_point, required=True)
    out_opts(m)
    m.set_defaults(func=cmd_metric)

    mm = sub.add_parser("metric-matrix", help="brackets for all pairs of a point set")
    mu_opt(mm)
    mm.add_argument("--depth", "-N", type=int, default=4)
    mm.add_argument("--k", type=int, default=0, help="use all vertices of V_k")
    mm.add_argument("--points", help="comma-separated point literals instead of V_k")
    out_opts(mm)
    mm.set_defaults(func=cmd_metric_matrix)

    ce = sub.add_parser("chain-experiment", help="theta-chain profile eps(n)")
    mu_opt(ce)
    ce.add_argument("--depth", "-N", type=int, default=6)
    ce.add_argument("--k", type=int, default=6)
    ce.add_argument("--from", dest="from_", type=_point, default=parse_point(":0"))
    ce.add_argument("--to", type=_point, default=parse_point("30:0"))
    ce.add_argument("--steps", type=_ints, default=[1, 2, 4, 8, 16, 32, 64, 128, 256])
    ce.add_argument("--theta", type=float, default=1.0)
    out_opts(ce)
    ce.set_defaults(func=cmd_chain_experiment)

    ed = sub.add_parser("exit-dist", help="corner / knight move exit distributions")
    ed.add_argument("--move", choices=("corner", "knight1", "knight2"), required=True)
    ed.add_argument("--base", type=_words, required=True, help="comma-separated base words, e.g. 0,1")
    ed.add_argument("--k", type=int, required=True)
    ed.add_argument("--orientation", type=int)
    ed.add_argument("--arith", choices=("auto", "exact", "float"), default="auto")
    ed.add_argument("--trials", type=int, default=0, help="add Monte Carlo frequencies")
    ed.add_argument("--seed", type=int, default=0)
    out_opts(ed)
    ed.set_defaults(func=cmd_exit_dist)

    hp = sub.add_parser("hit-prob", help="probability of hitting a path before leaving a cell")
    hp.add_argument("--cell", type=_word, default=(0,))
    hp.add_argument("--k", type=int, default=3)
    hp.add_argument("--samples", type=int, default=100)
    hp.add_argument("--geodesics", action="store_true")
    hp.add_argument("--seed", type=int, default=0)
    hp.add_argument("--float", action="store_true")
    out_opts(hp)
    hp.set_defaults(func=cmd_hit_prob)

    hn = sub.add_parser("harnack", help="empirical Harnack ratios")
    hn.add_argument("--level", "-n", type=_ints, required=True)
    hn.add_argument("--cell", type=_word, help="centre cell (default 0^n)")
    hn.add_argument("--j", type=_ints)
    hn.add_argument("--depth", "-N", type=int, help="metric depth (default n + offset)")
    hn.add_argument("--depth-offset", type=int, default=2)
    mu_opt(hn)
    out_opts(hn)
    hn.set_defaults(func=cmd_harnack)

    pl = sub.add_parser("plot", help="CSV table to SVG line plot")
    pl.add_argument("--in", dest="in_", required=True)
    pl.add_argument("--x")
    pl.add_argument("--y")
    pl.add_argument("--group")
    pl.add_argument("--out")
    pl.add_argument("--format", choices=("svg",), default="svg")
    pl.set_defaults(func=cmd_plot)
    return p


def run(argv=None) -> int:
    from .moves import InfeasibleConfiguration

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InfeasibleConfiguration as exc:
        print(f"hexalab: infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ResourceLimitError as exc:
        print(f"hexalab: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (SchemaError, UsageError, ValueError, OSError) as exc:
        print(f"hexalab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
