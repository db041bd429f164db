#!/usr/bin/env python
"""Plain-text edge lists and JSON artifacts.

Edge-list format::

    # comments start with '#'
    digraph 4          (or: graph 4)
    0 1                 one copy of (0, 1)
    1 2 3               three copies of (1, 2)

Repeated lines accumulate. Writing lists every present pair once in row
order, so ``parse_graph(format_graph(g)) == g``.

Decompositions are stored as ``{"directed": bool, "cycles": [[v, ...], ...]}``
and 1-factorisations as ``{"matchings": [[[u, v], ...], ...]}``.
"""

import json
import logging
from pathlib import Path
from typing import IO, Any, Dict, List, Sequence, Tuple, Union

from .errors import GraphError, GraphParseError
from .graph import AnyGraph, GraphBuilder
from .hamilton import HamiltonCycle, HamiltonDecomposition

logger = logging.getLogger(__name__)

PathOrStream = Union[str, Path, IO[str]]


def parse_graph(text: str) -> AnyGraph:
    """Parse an edge list.

    Args:
        text: Edge-list document.

    Returns:
        A :class:`MultiDigraph` for ``digraph n``, a :class:`Multigraph` for
        ``graph n``.

    Raises:
        GraphParseError: On the first malformed line, naming it.
    """
    builder = None
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if builder is None:
            if len(tokens) != 2 or tokens[0] not in ("digraph", "graph"):
                raise GraphParseError(
                    f"Expected 'digraph n' or 'graph n', got {line!r}", line_number
                )
            try:
                n = int(tokens[1])
                builder = GraphBuilder(n, directed=tokens[0] == "digraph")
            except (ValueError, GraphError) as e:
                raise GraphParseError(f"Invalid vertex count {tokens[1]!r}", line_number) from e
            continue
        if len(tokens) not in (2, 3):
            raise GraphParseError(f"Expected 'u v [m]', got {line!r}", line_number)
        try:
            u, v = int(tokens[0]), int(tokens[1])
            m = int(tokens[2]) if len(tokens) == 3 else 1
        except ValueError as e:
            raise GraphParseError(f"Non-integer token in {line!r}", line_number) from e
        if m < 0:
            raise GraphParseError(f"Negative multiplicity {m}", line_number)
        try:
            builder.add_edge(u, v, m)
        except GraphError as e:
            raise GraphParseError(e.message, line_number) from e
    if builder is None:
        raise GraphParseError("Missing 'digraph n' or 'graph n' header", 1)
    return builder.build()


def format_graph(graph: AnyGraph) -> str:
    """Serialise a graph as an edge list."""
    lines = [f"{'digraph' if graph.directed else 'graph'} {graph.n}"]
    for u, v, m in graph.pairs():
        lines.append(f"{u} {v}" if m == 1 else f"{u} {v} {m}")
    return "\n".join(lines) + "\n"


def _read_text(source: PathOrStream) -> str:
    try:
        if isinstance(source, (str, Path)):
            return Path(source).read_text(encoding="utf-8")
        return source.read()
    except UnicodeDecodeError as e:
        raise GraphParseError(f"Input is not valid UTF-8: {e.reason}", 1) from e


def _write_text(target: PathOrStream, text: str) -> None:
    if isinstance(target, (str, Path)):
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        target.write(text)


def read_graph(source: PathOrStream) -> AnyGraph:
    """Read an edge-list file or stream."""
    graph = parse_graph(_read_text(source))
    logger.debug(f"Read {graph!r}")
    return graph


def write_graph(graph: AnyGraph, target: PathOrStream) -> None:
    """Write an edge list to a file (parents created) or stream."""
    _write_text(target, format_graph(graph))


def decomposition_from_dict(data: Dict[str, Any]) -> HamiltonDecomposition:
    """Rebuild a decomposition from its JSON form.

    Raises:
        GraphError: If the document lacks ``cycles`` or a cycle is invalid.
    """
    if not isinstance(data, dict) or "cycles" not in data:
        raise GraphError("Decomposition JSON needs a 'cycles' list")
    cycles = tuple(HamiltonCycle(tuple(int(v) for v in c)) for c in data["cycles"])
    return HamiltonDecomposition(cycles, directed=bool(data.get("directed", True)))


def read_decomposition(source: PathOrStream) -> HamiltonDecomposition:
    """Read a decomposition JSON file or stream."""
    try:
        data = json.loads(_read_text(source))
    except json.JSONDecodeError as e:
        raise GraphError(f"Invalid decomposition JSON: {e}") from e
    return decomposition_from_dict(data)


def read_cycles(source: PathOrStream) -> Tuple[List[List[int]], Union[bool, None]]:
    """Read raw cycles without validating them, for the verifier.

    Returns:
        The vertex lists and the ``directed`` flag if present.
    """
    try:
        data = json.loads(_read_text(source))
    except json.JSONDecodeError as e:
        raise GraphError(f"Invalid decomposition JSON: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("cycles"), list):
        raise GraphError("Decomposition JSON needs a 'cycles' list")
    return [[int(v) for v in c] for c in data["cycles"]], data.get("directed")


def write_decomposition(decomposition: HamiltonDecomposition, target: PathOrStream) -> None:
    """Write a decomposition as JSON."""
    _write_text(target, json.dumps(decomposition.to_dict(), indent=2) + "\n")


def write_matchings(matchings: Sequence[Sequence[Tuple[int, int]]], target: PathOrStream) -> None:
    """Write a 1-factorisation as JSON."""
    data = {"matchings": [[list(edge) for edge in m] for m in matchings]}
    _write_text(target, json.dumps(data, indent=2) + "\n")


def read_matchings(source: PathOrStream) -> List[List[Tuple[int, int]]]:
    """Read a 1-factorisation JSON file or stream."""
    try:
        data = json.loads(_read_text(source))
    except json.JSONDecodeError as e:
        raise GraphError(f"Invalid matchings JSON: {e}") from e
    if not isinstance(data, dict) or not isinstance(data.get("matchings"), list):
        raise GraphError("Matchings JSON needs a 'matchings' list")
    return [[(int(e[0]), int(e[1])) for e in m] for m in data["matchings"]]
