#!/usr/bin/env python
"""
hamdecomp - Hamilton decompositions of dense regular multigraphs.

Subcommands:

    gen             generate a regular test instance
    check-expander  certify or refute robust (out)expansion
    decompose       Hamilton-decompose a regular (multi)digraph or multigraph
    verify          check a decomposition or 1-factorisation independently
    one-factorise   split a regular graph on an even vertex set into perfect matchings
    stats           summarise a graph

Graphs are edge-list files (``digraph n`` / ``graph n`` header, then
``u v [m]`` lines). Every subcommand accepts ``--json``.

Exit codes: 0 success/accept/pass, 1 reject/fail/error, 2 indeterminate.

Usage:
    python -m hamdecomp gen complete-multi -n 5 --lam 2 -o k5x2.txt
    python -m hamdecomp check-expander k10.txt --nu 0.1 --tau 0.1 --mode exact
    python -m hamdecomp decompose k5x2.txt --r 2 --seed 7 --report run.json
    python -m hamdecomp verify k5x2.txt decomposition.json
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict

# Support both direct execution and package import
if __name__ == "__main__" and __package__ is None:
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent))
    from hamdecomp.colored_formatter import configure_logging
    from hamdecomp.config import PipelineConfig, load_config
    from hamdecomp.errors import HamDecompError, StageFailure
    from hamdecomp.expansion import DEFAULT_SAMPLES, ExpansionParams, certify
    from hamdecomp.generators import FAMILIES, GeneratorSpec, generate
    from hamdecomp.graph_io import (
        format_graph,
        read_cycles,
        read_graph,
        read_matchings,
        write_decomposition,
        write_graph,
        write_matchings,
    )
    from hamdecomp.pipeline import (
        decompose_min_degree_digraph,
        decompose_min_degree_graph,
        decompose_multidigraph,
        decompose_multigraph,
        one_factorise,
    )
    from hamdecomp.report import render_certificate, render_report
    from hamdecomp.utils import graph_stats
    from hamdecomp.verify import verify_decomposition, verify_one_factorisation
else:
    from .colored_formatter import configure_logging
    from .config import PipelineConfig, load_config
    from .errors import HamDecompError, StageFailure
    from .expansion import DEFAULT_SAMPLES, ExpansionParams, certify
    from .generators import FAMILIES, GeneratorSpec, generate
    from .graph_io import (
        format_graph,
        read_cycles,
        read_graph,
        read_matchings,
        write_decomposition,
        write_graph,
        write_matchings,
    )
    from .pipeline import (
        decompose_min_degree_digraph,
        decompose_min_degree_graph,
        decompose_multidigraph,
        decompose_multigraph,
        one_factorise,
    )
    from .report import render_certificate, render_report
    from .utils import graph_stats
    from .verify import verify_decomposition, verify_one_factorisation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INDETERMINATE = 2


def _emit(data: Dict[str, Any]) -> None:
    print(json.dumps(data, indent=2))


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    base = load_config(args.config) if args.config else PipelineConfig()
    return base.with_overrides(
        r=args.r,
        seed=args.seed,
        nu=args.nu,
        tau=args.tau,
        fallback=args.fallback,
        max_retries=args.max_retries,
        hamilton_budget=args.budget,
    )


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate an instance and write it as an edge list."""
    spec = GeneratorSpec(args.family, args.n, s=args.s, r=args.r, seed=args.seed, lam=args.lam)
    graph = generate(spec)
    if args.output:
        write_graph(graph, args.output)
        logger.info(f"Wrote {graph!r} to {args.output}")
    if args.json:
        _emit(graph_stats(graph))
    elif not args.output:
        sys.stdout.write(format_graph(graph))
    return EXIT_OK


def cmd_check_expander(args: argparse.Namespace) -> int:
    """Certify robust (out)expansion of a simple graph."""
    graph = read_graph(args.graph)
    params = ExpansionParams(nu=args.nu, tau=args.tau)
    certificate = certify(
        graph, params, args.mode, samples=args.samples, seed=args.seed, workers=args.workers
    )
    if args.json:
        _emit(certificate.to_dict())
    else:
        print(render_certificate(certificate, args.template))
    return EXIT_OK if certificate.passed else EXIT_FAIL


def _status_code(status: str) -> int:
    if status == "success":
        return EXIT_OK
    if status == "indeterminate":
        return EXIT_INDETERMINATE
    return EXIT_FAIL


def cmd_decompose(args: argparse.Namespace) -> int:
    """Run the decomposition pipeline."""
    graph = read_graph(args.graph)
    config = _pipeline_config(args)
    if args.dump_stages:
        Path(args.dump_stages).mkdir(parents=True, exist_ok=True)
    if args.eps is not None:
        entry = decompose_min_degree_digraph if graph.directed else decompose_min_degree_graph
        result = entry(graph, args.eps, config)
    elif graph.directed:
        result = decompose_multidigraph(graph, config, dump_dir=args.dump_stages)
    else:
        result = decompose_multigraph(graph, config, dump_dir=args.dump_stages)

    report = result.report
    if args.report:
        text = json.dumps(report.to_dict(), indent=2) + "\n"
        Path(args.report).write_text(text, encoding="utf-8")
        logger.info(f"Wrote report to {args.report}")
    if result.decomposition is not None and args.output:
        write_decomposition(result.decomposition, args.output)
        logger.info(f"Wrote {len(result.decomposition)} cycles to {args.output}")

    if args.json:
        payload = {"report": report.to_dict()}
        if result.decomposition is not None:
            payload["decomposition"] = result.decomposition.to_dict()
        _emit(payload)
    else:
        print(render_report(report, args.template))
        if result.decomposition is not None and not args.output:
            for cycle in result.decomposition.cycles:
                print(" ".join(str(v) for v in cycle.vertices))
    return _status_code(report.status)


def cmd_verify(args: argparse.Namespace) -> int:
    """Independently check a decomposition or 1-factorisation."""
    graph = read_graph(args.graph)
    if args.matchings:
        verdict = verify_one_factorisation(graph, read_matchings(args.candidate))
    else:
        cycles, directed = read_cycles(args.candidate)
        verdict = verify_decomposition(graph, cycles, directed=directed)
    if args.json:
        _emit(verdict.to_dict())
    else:
        print("accept" if verdict else f"reject [{verdict.clause}]: {verdict.message}")
    return EXIT_OK if verdict else EXIT_FAIL


def cmd_one_factorise(args: argparse.Namespace) -> int:
    """Split a regular graph into perfect matchings."""
    graph = read_graph(args.graph)
    if graph.directed:
        raise HamDecompError("one-factorise needs an undirected graph")
    config = _pipeline_config(args)
    try:
        matchings = one_factorise(graph, args.eps, config)
    except StageFailure as e:
        logger.error(f"Error: {e}")
        return _status_code(e.detail.get("status", "failed"))
    if args.output:
        write_matchings(matchings, args.output)
    if args.json:
        _emit({"matchings": [[list(edge) for edge in m] for m in matchings]})
    elif not args.output:
        for matching in matchings:
            print(" ".join(f"{u}-{v}" for u, v in matching))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    """Print graph statistics."""
    stats = graph_stats(read_graph(args.graph))
    if args.json:
        _emit(stats)
    else:
        for key, value in stats.items():
            print(f"{key}: {value}")
    return EXIT_OK


def _add_pipeline_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="YAML pipeline configuration")
    parser.add_argument("--r", type=int, help="Multiplicity bound / number of split parts")
    parser.add_argument("--seed", type=int, help="Parent RNG seed")
    parser.add_argument("--nu", type=float, help="Robust expansion parameter")
    parser.add_argument("--tau", type=float, help="Robust expansion band parameter")
    parser.add_argument(
        "--fallback", choices=("none", "exact"), help="Behaviour once attempts run out"
    )
    parser.add_argument("--max-retries", type=int, help="Resampled attempts after the first")
    parser.add_argument("--budget", type=int, help="Node budget of every search call")
    parser.add_argument("--eps", type=float, help="Enforce the degree bound rn/2 + eps*n")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        prog="hamdecomp",
        description="hamdecomp - Hamilton decompositions of dense regular multigraphs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s gen directed-complete -n 5 -o k5.txt
  %(prog)s decompose k5.txt --report run.json
  %(prog)s verify k5.txt decomposition.json
        """,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose output")
    parser.add_argument("--debug", action="store_true", help="Enable debug output")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="Generate a regular instance")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("-n", type=int, required=True, help="Number of vertices")
    gen.add_argument("-s", type=int, help="Degree (random families)")
    gen.add_argument("--r", type=int, default=1, help="Multiplicity cap")
    gen.add_argument("--lam", type=int, default=1, help="Multiplicity of complete families")
    gen.add_argument("--seed", type=int, default=0, help="RNG seed")
    gen.add_argument("-o", "--output", type=Path, help="Edge-list output file")
    gen.add_argument("--json", action="store_true", help="Print statistics as JSON")
    gen.set_defaults(handler=cmd_gen)

    check = commands.add_parser("check-expander", help="Certify robust expansion")
    check.add_argument("graph", type=Path)
    check.add_argument("--nu", type=float, default=0.05)
    check.add_argument("--tau", type=float, default=0.3)
    check.add_argument("--mode", choices=("exact", "sample"), default="exact")
    check.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--workers", type=int, default=1)
    check.add_argument("-t", "--template", type=Path, help="Custom Jinja2 template file")
    check.add_argument("--json", action="store_true")
    check.set_defaults(handler=cmd_check_expander)

    decompose = commands.add_parser("decompose", help="Hamilton-decompose a regular graph")
    decompose.add_argument("graph", type=Path)
    _add_pipeline_options(decompose)
    decompose.add_argument("-o", "--output", type=Path, help="Decomposition JSON output file")
    decompose.add_argument("--report", type=Path, help="Report JSON output file")
    decompose.add_argument("--dump-stages", type=Path, help="Directory for intermediate graphs")
    decompose.add_argument("-t", "--template", type=Path, help="Custom Jinja2 template file")
    decompose.add_argument("--json", action="store_true")
    decompose.set_defaults(handler=cmd_decompose)

    verify = commands.add_parser("verify", help="Check a decomposition")
    verify.add_argument("graph", type=Path)
    verify.add_argument("candidate", type=Path, help="Decomposition or matchings JSON")
    verify.add_argument("--matchings", action="store_true", help="Candidate is a 1-factorisation")
    verify.add_argument("--json", action="store_true")
    verify.set_defaults(handler=cmd_verify)

    factorise = commands.add_parser("one-factorise", help="Split into perfect matchings")
    factorise.add_argument("graph", type=Path)
    _add_pipeline_options(factorise)
    factorise.add_argument("-o", "--output", type=Path, help="Matchings JSON output file")
    factorise.add_argument("--json", action="store_true")
    factorise.set_defaults(handler=cmd_one_factorise)

    stats = commands.add_parser("stats", help="Summarise a graph")
    stats.add_argument("graph", type=Path)
    stats.add_argument("--json", action="store_true")
    stats.set_defaults(handler=cmd_stats)
    return parser


def main() -> None:
    """Main entry point for the hamdecomp command-line tool.

    Exits with 1 on rejection or error and 2 on an indeterminate search;
    returns normally on success.
    """
    parser = build_parser()
    args = parser.parse_args()

    level = logging.DEBUG if args.debug else logging.INFO if args.verbose else logging.WARNING
    configure_logging(level)

    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        code = handler(args)
    except HamDecompError as e:
        logger.error(f"Error: {e}")
        sys.exit(EXIT_FAIL)
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        if args.verbose or args.debug:
            import traceback

            traceback.print_exc()
        sys.exit(EXIT_FAIL)
    if code:
        sys.exit(code)


if __name__ == "__main__":
    main()
