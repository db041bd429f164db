#!/usr/bin/env python
"""Randomised Hamilton decomposition pipeline and its entry points.

Directed pipeline for an s-regular multidigraph ``D`` of multiplicity at
most ``r``:

1. ``split``: every edge with multiplicity ``m`` picks ``m`` of ``r`` simple
   parts uniformly; the split is kept only if every part is
   ``(1 ± ξ)s/r``-balanced.
2. ``expander-gate``: each part must pass sampled certification at
   ``(ν/2r, τ)``.
3. ``almost-decompose``: parts 2..r give up edge-disjoint Hamilton cycles
   until only a low-degree leftover remains.
4. ``assemble``: ``D′`` is part 1 plus all leftovers.
5. ``matchings``: the leftovers are split into small matchings.
6. ``absorption``: every matching is threaded into a short path of ``D′``.
7. ``completion``: every path is closed into a Hamilton cycle of ``D′``.
8. ``final-regular``: what remains of ``D′`` is decomposed exactly.

Stages 7 and 8 run as one backtracking search, so a closing path that
leaves an undecomposable remainder is replaced by the next one.

A failed stage makes the attempt fail; the next attempt reseeds. When all
attempts fail the configured fallback (exact search on ``D``) decides. Only
an exhausted exact search ever reports nonexistence.

The undirected entry point orients an even-regular multigraph into an
``s/2``-regular multidigraph and runs the directed pipeline on it.
"""

import logging
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import PipelineConfig
from .errors import DegreeError, GraphError, InfeasibleError, StageFailure
from .expansion import ExpansionParams, certify_orientation, certify_outexpander, min_semidegree
from .graph import (
    MultiDigraph,
    Multigraph,
    disjoint_union,
    forget_orientation,
    is_regular,
    subtract_edges,
    underlying_simple,
)
from .graph_io import write_graph
from .hamilton import (
    HamiltonCycle,
    HamiltonDecomposition,
    SearchStatus,
    absorb_matching,
    complete_and_decompose,
    decompose_regular,
    decompose_regular_graph,
    greedy_edge_disjoint_hamilton,
)
from .transforms import (
    balanced_orient,
    cycle_decompose_even,
    extract_factor,
    matching_decompose,
    orient_cycles,
    perfect_matching,
)
from .utils import derive_seed
from .verify import verify_decomposition, verify_one_factorisation

logger = logging.getLogger(__name__)

STAGES = (
    "split",
    "expander-gate",
    "almost-decompose",
    "assemble",
    "matchings",
    "absorption",
    "completion",
    "final-regular",
)


@dataclass
class StageRecord:
    """Outcome of one stage in one attempt: ok, failed, skipped or vacuous."""

    stage: str
    outcome: str
    attempt: int
    stats: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"stage": self.stage, "outcome": self.outcome, "attempt": self.attempt, **self.stats}


@dataclass
class PipelineReport:
    """Replay record of one pipeline run.

    Attributes:
        entry_point: Which entry point produced the report.
        input_digest: n, degree, multiplicity and edge count of the input.
        config: Full configuration used.
        stages: Stage records in execution order.
        seeds: Seed of every attempt.
        retry_count: Attempts after the first.
        fallback_used: Whether the exact fallback ran.
        status: ``success``, ``failed``, ``nonexistent`` or ``indeterminate``.
        cycle_count: Number of cycles returned.
        notes: Entry-point specific statistics.
    """

    entry_point: str
    input_digest: Dict[str, Any]
    config: Dict[str, Any]
    stages: List[StageRecord] = field(default_factory=list)
    seeds: List[int] = field(default_factory=list)
    retry_count: int = 0
    fallback_used: bool = False
    status: str = "failed"
    cycle_count: int = 0
    notes: Dict[str, Any] = field(default_factory=dict)

    def record(self, stage: str, outcome: str, attempt: int, **stats: Any) -> StageRecord:
        entry = StageRecord(stage, outcome, attempt, stats)
        self.stages.append(entry)
        level = logging.WARNING if outcome == "failed" else logging.INFO
        logger.log(level, f"{outcome} (attempt {attempt}) {stats or ''}", extra={"stage": stage})
        return entry

    @property
    def success(self) -> bool:
        return self.status == "success"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entry_point": self.entry_point,
            "status": self.status,
            "input": self.input_digest,
            "config": self.config,
            "seeds": self.seeds,
            "retry_count": self.retry_count,
            "fallback_used": self.fallback_used,
            "cycle_count": self.cycle_count,
            "stages": [s.to_dict() for s in self.stages],
            "notes": self.notes,
        }


@dataclass
class PipelineResult:
    """Decomposition (None unless the run succeeded) and its report."""

    decomposition: Optional[HamiltonDecomposition]
    report: PipelineReport

    @property
    def success(self) -> bool:
        return self.report.success


def _digest(graph: Any, s: Optional[int]) -> Dict[str, Any]:
    return {
        "directed": graph.directed,
        "n": graph.n,
        "s": s,
        "multiplicity": graph.multiplicity,
        "edges": graph.edge_count,
    }


def _dump(dump_dir: Optional[Path], name: str, graph: Any) -> None:
    if dump_dir is None:
        return
    write_graph(graph, Path(dump_dir) / f"{name}.txt")


def random_split(digraph: MultiDigraph, r: int, seed: int) -> List[MultiDigraph]:
    """Split a multidigraph into ``r`` simple digraphs.

    Every pair ``(u, v)`` of multiplicity ``m`` draws a uniform ``m``-subset
    ``X`` of the parts and puts one copy into each part of ``X``.

    Raises:
        GraphError: If the multiplicity exceeds ``r``.
    """
    if r < 1:
        raise GraphError(f"r must be at least 1, got {r}")
    if digraph.multiplicity > r:
        raise GraphError(f"Multiplicity {digraph.multiplicity} exceeds r={r}")
    rng = random.Random(seed)
    n = digraph.n
    parts = np.zeros((r, n, n), dtype=np.int64)
    for u, v, m in digraph.pairs():
        for i in rng.sample(range(r), m):
            parts[i, u, v] = 1
    return [MultiDigraph(n, parts[i]) for i in range(r)]


def split_balance_check(parts: Sequence[MultiDigraph], s: int, r: int, xi: float) -> bool:
    """True iff every degree in every part lies in ``[(1−ξ)s/r, (1+ξ)s/r]``."""
    low = (1 - xi) * s / r - 1e-9
    high = (1 + xi) * s / r + 1e-9
    for part in parts:
        for degrees in (part.out_degrees(), part.in_degrees()):
            if degrees.size and (degrees.min() < low or degrees.max() > high):
                return False
    return True


def _max_semidegree(graph: MultiDigraph) -> int:
    return int(max(graph.out_degrees().max(initial=0), graph.in_degrees().max(initial=0)))


def _subtract_cycles(graph: MultiDigraph, cycles: Sequence[Any]) -> MultiDigraph:
    edges = [edge for cycle in cycles for edge in cycle.edges]
    return subtract_edges(graph, edges) if edges else graph


def _attempt(
    digraph: MultiDigraph,
    s: int,
    config: PipelineConfig,
    seed: int,
    attempt: int,
    report: PipelineReport,
    dump_dir: Optional[Path],
) -> HamiltonDecomposition:
    """Run stages 1-8 once; raise StageFailure on the first failing stage."""
    r, n = config.r, digraph.n

    parts = random_split(digraph, r, derive_seed(seed, "split"))
    for i, part in enumerate(parts):
        _dump(dump_dir, f"attempt{attempt}-part{i + 1}", part)
    degrees = [
        (int(p.out_degrees().min(initial=0)), int(p.out_degrees().max(initial=0))) for p in parts
    ]
    if not split_balance_check(parts, s, r, config.xi):
        raise StageFailure("split", "Split is not balanced", detail={"part_out_degrees": degrees})
    report.record("split", "ok", attempt, part_out_degrees=degrees)

    if config.expander_gate == "sample":
        gate = ExpansionParams(nu=config.nu / (2 * r), tau=config.tau)
        for i, part in enumerate(parts):
            certificate = certify_outexpander(
                part,
                gate,
                "sample",
                samples=config.expander_samples,
                seed=derive_seed(seed, "gate", i),
            )
            if not certificate.passed:
                raise StageFailure(
                    "expander-gate",
                    f"Part {i + 1} is not a robust outexpander",
                    detail={"part": i + 1, "witness": list(certificate.witness or ())},
                )
        report.record("expander-gate", "ok", attempt, nu=gate.nu, tau=gate.tau)
    else:
        report.record("expander-gate", "skipped", attempt)

    extracted: List[HamiltonCycle] = []
    leftovers: List[MultiDigraph] = []
    for i, part in enumerate(parts[1:], start=2):
        target = max(0, min_semidegree(part) - config.leftover_cap)
        greedy = greedy_edge_disjoint_hamilton(part, target, config.hamilton_budget)
        if greedy.shortfall:
            raise StageFailure(
                "almost-decompose",
                f"Part {i} gave {len(greedy.cycles)} of {target} Hamilton cycles",
                detail={"part": i, "target": target, "found": len(greedy.cycles)},
            )
        extracted.extend(greedy.cycles)
        leftovers.append(greedy.leftover)
        _dump(dump_dir, f"attempt{attempt}-leftover{i}", greedy.leftover)
        logger.debug(
            f"Part {i}: {len(greedy.cycles)} cycles, leftover max degrees "
            f"{greedy.max_out_degree}/{greedy.max_in_degree}",
            extra={"stage": "almost-decompose"},
        )
    report.record(
        "almost-decompose",
        "ok" if r > 1 else "vacuous",
        attempt,
        cycles=len(extracted),
        leftover_max_degree=max(
            (_max_semidegree(g) for g in leftovers),
            default=0,
        ),
    )

    assembled = disjoint_union(parts[0], *leftovers)
    s_prime = is_regular(assembled)
    if s_prime != s - len(extracted):
        raise StageFailure(
            "assemble",
            "Assembled graph lost regularity",
            detail={"degree": s_prime, "expected": s - len(extracted)},
        )
    _dump(dump_dir, f"attempt{attempt}-assembled", assembled)
    report.record("assemble", "ok", attempt, degree=s_prime)

    matchings: List[List[Tuple[int, int]]] = []
    for leftover in leftovers:
        matchings.extend(matching_decompose(leftover, config.matching_size_cap))
    if len(matchings) > s_prime:
        raise StageFailure(
            "matchings",
            f"{len(matchings)} matchings exceed the {s_prime} cycles left to host them",
            detail={"matchings": len(matchings), "degree": s_prime},
        )
    report.record(
        "matchings", "ok" if matchings else "vacuous", attempt,
        count=len(matchings), largest=max((len(m) for m in matchings), default=0),
    )

    paths = []
    used = MultiDigraph(n)
    for j, matching in enumerate(matchings):
        later = [edge for m in matchings[j + 1 :] for edge in m]
        host = subtract_edges(subtract_edges(assembled, used), later)
        path = absorb_matching(
            matching, host, path_vertex_cap=config.path_vertex_cap, maxlen=config.connector_length
        )
        paths.append(path)
        used = disjoint_union(used, MultiDigraph.from_edges(n, path.edges))
    report.record(
        "absorption", "ok" if paths else "vacuous", attempt,
        longest_path=max((len(p.vertices) for p in paths), default=0),
    )

    search = complete_and_decompose(paths, assembled, config.hamilton_budget)
    if not search.found:
        stage = "completion" if paths else "final-regular"
        raise StageFailure(
            stage,
            f"Completing {len(paths)} paths and decomposing the rest: {search.status.value}",
            detail={"status": search.status.value, "nodes": search.nodes},
        )
    completed = search.value.cycles[: len(paths)]
    final = search.value.cycles[len(paths) :]
    report.record("completion", "ok" if completed else "vacuous", attempt, cycles=len(completed))

    _dump(dump_dir, f"attempt{attempt}-remainder", _subtract_cycles(assembled, completed))
    report.record("final-regular", "ok", attempt, cycles=len(final), nodes=search.nodes)

    return HamiltonDecomposition(tuple(extracted) + completed + final)


def _run_directed(
    digraph: MultiDigraph,
    s: int,
    config: PipelineConfig,
    report: PipelineReport,
    dump_dir: Optional[Path] = None,
) -> Optional[HamiltonDecomposition]:
    """Attempts with reseeding, then the fallback; sets ``report.status``."""
    # with one part nothing random happens, so one attempt settles it
    attempts = 1 if config.r == 1 else config.max_retries + 1
    for attempt in range(attempts):
        seed = config.seed if attempt == 0 else derive_seed(config.seed, "attempt", attempt)
        report.seeds.append(seed)
        report.retry_count = attempt
        try:
            decomposition = _attempt(digraph, s, config, seed, attempt, report, dump_dir)
        except StageFailure as failure:
            report.record(
                failure.stage, "failed", attempt, reason=failure.message, **failure.detail
            )
            continue
        verdict = verify_decomposition(digraph, decomposition)
        if not verdict:
            report.record(
                "verify", "failed", attempt, clause=verdict.clause, reason=verdict.message
            )
            continue
        report.status = "success"
        report.cycle_count = len(decomposition)
        return decomposition

    if config.fallback != "exact":
        report.status = "failed"
        return None

    report.fallback_used = True
    result = decompose_regular(digraph, config.hamilton_budget)
    report.record("fallback", result.status.value, attempts, nodes=result.nodes)
    if result.status is SearchStatus.FOUND and verify_decomposition(digraph, result.value):
        report.status = "success"
        report.cycle_count = len(result.value)
        return result.value
    report.status = {
        SearchStatus.ABSENT: "nonexistent",
        SearchStatus.INDETERMINATE: "indeterminate",
    }.get(result.status, "failed")
    return None


def _require_regular(graph: Any, config: PipelineConfig, even: bool = False) -> int:
    s = is_regular(graph) if graph.n else None
    if s is None or s < 1:
        raise DegreeError(f"Input must be regular of positive degree, got {s}")
    if even and s % 2:
        raise DegreeError(f"Degree must be even, got {s}", vertex=0)
    if graph.multiplicity > config.r:
        raise GraphError(f"Multiplicity {graph.multiplicity} exceeds r={config.r}")
    return s


def decompose_multidigraph(
    digraph: MultiDigraph,
    config: Optional[PipelineConfig] = None,
    *,
    dump_dir: Optional[Path] = None,
) -> PipelineResult:
    """Hamilton-decompose an s-regular multidigraph.

    Args:
        digraph: Regular multidigraph with multiplicity at most ``config.r``.
        config: Pipeline configuration (defaults if omitted).
        dump_dir: Directory receiving intermediate graphs.

    Returns:
        The verified decomposition (``s`` cycles) and the report; on failure
        the decomposition is None and ``report.status`` tells why.

    Raises:
        DegreeError: If the input is not regular.
        GraphError: If the multiplicity exceeds ``r``.
    """
    config = (config or PipelineConfig()).validate()
    s = _require_regular(digraph, config)
    report = PipelineReport("multidigraph", _digest(digraph, s), config.to_dict())
    logger.info(f"Decomposing {digraph!r}, s={s}, r={config.r}")
    decomposition = _run_directed(digraph, s, config, report, dump_dir)
    return PipelineResult(decomposition, report)


def orient_even_regular(
    graph: Multigraph, factor_size: int, seed: int
) -> Tuple[MultiDigraph, Dict[str, Any]]:
    """Orient an s-regular multigraph (s even) into an s/2-regular multidigraph.

    The underlying simple graph is orientated with all imbalances at most 1,
    a ``factor_size``-factor ``F`` of that orientation is kept, the rest of
    the multigraph (even degrees) is split into cycles and every cycle is
    oriented consistently. If no factor of the requested size exists the
    factor is empty.

    Returns:
        The orientation and statistics about the construction.
    """
    n = graph.n
    oriented = balanced_orient(underlying_simple(graph), seed)
    k = factor_size
    try:
        factor = extract_factor(oriented, k)
    except InfeasibleError as e:
        logger.warning(f"No {k}-factor in the orientation, continuing without one: {e.message}")
        factor, k = MultiDigraph(n), 0
    rest = subtract_edges(graph, forget_orientation(factor))
    cycles = cycle_decompose_even(rest, seed)
    orientation = disjoint_union(factor, orient_cycles(cycles, n))
    s = is_regular(graph)
    assert s is not None and is_regular(orientation) == s // 2
    stats = {
        "factor_size": k,
        "cycles": len(cycles),
        "two_cycles": sum(1 for c in cycles if len(c) == 2),
    }
    return orientation, stats


def decompose_multigraph(
    graph: Multigraph,
    config: Optional[PipelineConfig] = None,
    *,
    dump_dir: Optional[Path] = None,
) -> PipelineResult:
    """Hamilton-decompose an s-regular multigraph with s even into s/2 cycles.

    Each of ``config.orientation_attempts`` orientations is passed through
    the directed pipeline (with its own fallback on that orientation); the
    first success is returned with orientations dropped. If none succeeds
    and the fallback is exact, the multigraph itself is searched exactly.

    Raises:
        DegreeError: If the graph is not regular or its degree is odd.
        GraphError: If the multiplicity exceeds ``r``.
    """
    config = (config or PipelineConfig()).validate()
    s = _require_regular(graph, config, even=True)
    report = PipelineReport("multigraph", _digest(graph, s), config.to_dict())
    logger.info(f"Decomposing {graph!r}, s={s}, r={config.r}")

    statuses = []
    for attempt in range(config.orientation_attempts):
        oseed = derive_seed(config.seed, "orientation", attempt)
        orientation, stats = orient_even_regular(graph, config.factor_size_for(graph.n), oseed)
        _dump(dump_dir, f"orientation{attempt}", orientation)
        certificate = certify_orientation(
            orientation, config.expansion, samples=config.expander_samples, seed=oseed
        )
        report.record(
            "orientation", "ok", attempt, certified=certificate.verdict.value, **stats
        )
        inner = replace(config, seed=derive_seed(config.seed, "pipeline", attempt))
        decomposition = _run_directed(orientation, s // 2, inner, report, dump_dir)
        statuses.append(report.status)
        if decomposition is not None:
            undirected = decomposition.undirected()
            if verify_decomposition(graph, undirected):
                report.status = "success"
                report.cycle_count = len(undirected)
                return PipelineResult(undirected, report)

    report.notes["orientation_statuses"] = statuses
    if config.fallback != "exact":
        report.status = "failed"
        return PipelineResult(None, report)
    report.fallback_used = True
    result = decompose_regular_graph(graph, config.hamilton_budget)
    report.record("fallback", result.status.value, config.orientation_attempts, nodes=result.nodes)
    if result.found and verify_decomposition(graph, result.value):
        report.status = "success"
        report.cycle_count = len(result.value)
        return PipelineResult(result.value, report)
    report.status = "nonexistent" if result.status is SearchStatus.ABSENT else "indeterminate"
    return PipelineResult(None, report)


def min_degree_threshold(n: int, r: int, eps: float) -> float:
    """Degree ``rn/2 + εn`` above which the min-degree entry points apply."""
    return r * n / 2 + eps * n


def simple_degree_threshold(n: int, r: int, eps: float) -> float:
    """Semi-degree ``(1/2 + ε/r)n`` the underlying simple graph then has."""
    return (0.5 + eps / r) * n


def _check_min_degree(graph: Any, s: int, eps: float, r: int) -> Dict[str, Any]:
    n = graph.n
    threshold = min_degree_threshold(n, r, eps)
    simple = underlying_simple(graph)
    if graph.directed:
        per_vertex = np.minimum(simple.out_degrees(), simple.in_degrees())
    else:
        per_vertex = simple.degrees()
    if s < threshold - 1e-9:
        vertex = int(np.argmin(per_vertex))
        raise DegreeError(f"Degree {s} is below rn/2 + eps*n = {threshold:g}", vertex=vertex)
    simple_threshold = simple_degree_threshold(n, r, eps)
    low = int(np.argmin(per_vertex))
    # follows from s >= threshold and multiplicity <= r
    assert per_vertex[low] >= simple_threshold - 1e-9, f"vertex {low} below the simple bound"
    return {
        "degree_threshold": threshold,
        "simple_threshold": simple_threshold,
        "simple_min_degree": int(per_vertex[low]),
    }


def decompose_min_degree_digraph(
    digraph: MultiDigraph, eps: float, config: Optional[PipelineConfig] = None
) -> PipelineResult:
    """Decompose an s-regular multidigraph with ``s ≥ rn/2 + εn``.

    Raises:
        DegreeError: If the degree bound fails, naming a vertex.
    """
    config = (config or PipelineConfig()).validate()
    s = _require_regular(digraph, config)
    notes = _check_min_degree(digraph, s, eps, config.r)
    result = decompose_multidigraph(digraph, config)
    result.report.entry_point = "min-degree-digraph"
    result.report.notes.update(notes)
    return result


def decompose_min_degree_graph(
    graph: Multigraph, eps: float, config: Optional[PipelineConfig] = None
) -> PipelineResult:
    """Undirected analogue of :func:`decompose_min_degree_digraph` (s even)."""
    config = (config or PipelineConfig()).validate()
    s = _require_regular(graph, config, even=True)
    notes = _check_min_degree(graph, s, eps, config.r)
    result = decompose_multigraph(graph, config)
    result.report.entry_point = "min-degree-graph"
    result.report.notes.update(notes)
    return result


def _alternate(cycle: HamiltonCycle) -> List[List[Tuple[int, int]]]:
    edges = [(min(u, v), max(u, v)) for u, v in cycle.edges]
    return [sorted(edges[0::2]), sorted(edges[1::2])]


def one_factorise(
    graph: Multigraph, eps: Optional[float] = None, config: Optional[PipelineConfig] = None
) -> List[List[Tuple[int, int]]]:
    """Partition the edges of a regular multigraph into perfect matchings (n even).

    For odd degree a perfect matching is removed first. The even-regular
    rest is Hamilton-decomposed and every cycle (of even length n) is split
    into its two alternating perfect matchings.

    Args:
        graph: s-regular multigraph, n even.
        eps: When given, ``s ≥ rn/2 + εn`` is enforced.
        config: Pipeline configuration.

    Returns:
        ``s`` perfect matchings, each a sorted list of pairs ``(u, v)``, u < v.

    Raises:
        GraphError: If n is odd.
        StageFailure: ``perfect-matching`` or ``one-factorisation`` when a
            step fails; ``detail["status"]`` carries the decomposition status.
    """
    config = (config or PipelineConfig()).validate()
    if graph.n % 2:
        raise GraphError(f"A 1-factorisation needs an even vertex count, got {graph.n}")
    s = _require_regular(graph, config)
    if eps is not None:
        _check_min_degree(graph, s, eps, config.r)

    classes: List[List[Tuple[int, int]]] = []
    rest = graph
    if s % 2:
        try:
            matching = perfect_matching(graph)
        except InfeasibleError as e:
            raise StageFailure(
                "perfect-matching", e.message, detail={"status": "failed", **e.witness}
            ) from e
        classes.append(matching)
        rest = subtract_edges(graph, matching)
        logger.info(
            f"Removed a perfect matching, {s - 1}-regular rest",
            extra={"stage": "perfect-matching"},
        )

    if s > 1:
        result = decompose_multigraph(rest, config)
        if not result.success:
            raise StageFailure(
                "one-factorisation",
                "Even-regular rest could not be Hamilton-decomposed",
                detail={"status": result.report.status},
            )
        for cycle in result.decomposition.cycles:
            classes.extend(_alternate(cycle))

    verdict = verify_one_factorisation(graph, classes)
    assert verdict, verdict.message
    return classes
