"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 internal inconsistency. Failures
print a one-line JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bounds import BoundParams, Observation, compare_report, theta_terms
from .config import ConfigError, load_config
from .exact import apply_rotation, find_generic_rotation
from .fileformat import dumps_collection, parse_collection
from .generators import GeneratorSpec
from .pipeline import (
    EXIT_INPUT,
    EXIT_INTERNAL,
    PipelineError,
    stage_errors,
    run_pipeline,
    write_artifacts,
)
from .tangency import common_point_triples, count_pairs_bruteforce, count_pairs_hashed, graph_to_csv


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _rotated(collection, policy: str):
    if policy == "identity":
        return collection
    return apply_rotation(collection, find_generic_rotation(collection))


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.kind, args.count, args.m, args.n, args.seed, args.coord_bound, args.mode)
    _emit(dumps_collection(spec.build()), args.output)
    return 0


def cmd_count(args) -> int:
    c = parse_collection(args.collection)
    fn = count_pairs_bruteforce if args.method == "brute" else count_pairs_hashed
    graph = fn(c, args.mode, workers=args.threads)
    _emit(graph_to_csv(graph, c.dimension), args.output)
    triples = common_point_triples(graph)
    print(
        f"edges {len(graph)} ordered {graph.ordered_count} triple_points {len(triples)}",
        file=sys.stderr,
    )
    return 0


def cmd_lift_check(args) -> int:
    from .lift import check_lifting

    c = _rotated(parse_collection(args.collection), args.rotation)
    check = check_lifting(c)
    _emit(check.to_text(), args.output)
    return 0 if check.passed else EXIT_INTERNAL


def cmd_classify(args) -> int:
    from .incidence import algebraic_chain, chain_text, classify_incidences, report_text
    from .partition import heuristic_partition
    from .polyalg import parse_poly, to_text

    c = _rotated(parse_collection(args.collection), args.rotation)
    if args.poly is not None:
        poly = parse_poly(args.poly, c.dimension)
    elif args.poly_file is not None:
        poly = parse_poly(Path(args.poly_file).read_text(), c.dimension)
    else:
        poly = heuristic_partition(c, args.heuristic)
    text = f"P {to_text(poly)}\n" + report_text(classify_incidences(c, poly))
    if not poly.is_zero():
        text += chain_text(algebraic_chain(c, poly))
    _emit(text, args.output)
    return 0


def cmd_audit(args) -> int:
    from .nondegeneracy import audit, verdict_text

    c = parse_collection(args.collection)
    v = audit(c, args.b, args.d, require_condition_i=not args.allow_triples)
    _emit(verdict_text(v), args.output)
    return 0


def cmd_bound(args) -> int:
    params = BoundParams(args.n, Fraction(args.epsilon), Fraction(args.c1), Fraction(args.c2))
    lines = [f"D {params.degree}", f"c3 {params.c3}", f"c4 {params.c4}"]
    if args.N is not None:
        b = args.b if args.b is not None else args.N
        k, t1, t2, t3 = theta_terms(b, args.N, params)
        lines += [f"k {k}", f"term1 {t1}", f"term2 {t2}", f"term3 {t3}", f"bound {t1 + t2 + t3}"]
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_report(args) -> int:
    observations = []
    dims = set()
    for path in args.collections:
        c = parse_collection(path)
        dims.add(c.dimension)
        graph = count_pairs_hashed(c, workers=args.threads)
        b = min(args.b or len(c), len(c))
        observations.append(
            Observation(Path(path).stem, b, len(c), graph.ordered_count, not common_point_triples(graph))
        )
    if len(dims) > 1:
        raise ValueError("all collections in a report must share a dimension")
    params = BoundParams(dims.pop(), Fraction(args.epsilon), Fraction(args.c1), Fraction(args.c2))
    rep = compare_report(observations, params)
    sys.stdout.write(rep.table())
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    if args.plot_data:
        Path(args.plot_data).write_text(rep.plot_data())
    return EXIT_INTERNAL if rep.inconsistent else 0


def cmd_pipeline(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        raise PipelineError("config", "invalid_config", str(exc), EXIT_INPUT) from None
    result = run_pipeline(config, Path(args.config).parent, threads=args.threads)
    out = args.output or config.output
    write_artifacts(result.artifacts, out)
    print(f"wrote {len(result.artifacts)} artifacts to {out}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sphere-tangency", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, collection=True):
        if collection:
            sp.add_argument("collection")
        sp.add_argument("-o", "--output")

    g = sub.add_parser("generate", help="write a generated collection")
    g.add_argument("kind", choices=["hawaiian", "complementary_conics", "zahl_grid", "random"])
    g.add_argument("--count", type=int, default=0)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--coord-bound", type=int, default=100)
    g.add_argument("--mode", choices=["signed", "unsigned"])
    common(g, collection=False)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("count", help="tangency graph as CSV")
    common(c)
    c.add_argument("--mode", choices=["signed", "unsigned"])
    c.add_argument("--method", choices=["hashed", "brute"], default="hashed")
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_count)

    lc = sub.add_parser("lift-check", help="tangency vs lift-intersection agreement")
    common(lc)
    lc.add_argument("--rotation", choices=["auto", "identity"], default="auto")
    lc.set_defaults(func=cmd_lift_check)

    cl = sub.add_parser("classify", help="I1/I3/I4 split and derivative chain for a polynomial")
    common(cl)
    src = cl.add_mutually_exclusive_group()
    src.add_argument("--poly")
    src.add_argument("--poly-file")
    cl.add_argument("--heuristic", type=int, default=4, help="degree for the median-split partition")
    cl.add_argument("--rotation", choices=["auto", "identity"], default="auto")
    cl.set_defaults(func=cmd_classify)

    a = sub.add_parser("audit", help="search for concentrated tangency points")
    common(a)
    a.add_argument("--b", type=int, required=True)
    a.add_argument("--d", type=int, default=1)
    a.add_argument("--allow-triples", action="store_true", help="skip the triple-point precondition")
    a.set_defaults(func=cmd_audit)

    b = sub.add_parser("bound", help="degree, recursion depth and bound terms")
    b.add_argument("--n", type=int, default=3)
    b.add_argument("--epsilon", default="1/10")
    b.add_argument("--c1", default="1")
    b.add_argument("--c2", default="1")
    b.add_argument("--b", type=int)
    b.add_argument("--N", type=int)
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_bound)

    r = sub.add_parser("report", help="observed counts against the bound for several collections")
    r.add_argument("collections", nargs="+")
    r.add_argument("--b", type=int)
    r.add_argument("--epsilon", default="1/10")
    r.add_argument("--c1", default="1")
    r.add_argument("--c2", default="1")
    r.add_argument("--csv")
    r.add_argument("--plot-data")
    r.add_argument("--threads", type=int, default=1)
    r.set_defaults(func=cmd_report)

    pl = sub.add_parser("pipeline", help="run a YAML-configured pipeline")
    pl.add_argument("config")
    pl.add_argument("-o", "--output", help="override the configured output directory")
    pl.add_argument("--threads", type=int, default=1)
    pl.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with stage_errors(args.command):
            return args.func(args)
    except PipelineError as exc:
        print(json.dumps(exc.record(), sort_keys=True), file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # a bug, not bad input
        err = PipelineError(args.command, "internal_error", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)
        print(json.dumps(err.record(), sort_keys=True), file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
