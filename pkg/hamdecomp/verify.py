#!/usr/bin/env python
"""Independent checkers for decompositions and 1-factorisations.

Both checkers recount edge usage from the candidate alone into a fresh
matrix and compare it with the host's multiplicities; nothing computed by
the pipeline is trusted.
"""

import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Tuple, Union

import numpy as np

from .graph import AnyGraph, Multigraph
from .hamilton import HamiltonDecomposition

logger = logging.getLogger(__name__)

CycleLike = Sequence[int]


@dataclass(frozen=True)
class Verdict:
    """Accept/reject with the first violated clause and where it happened."""

    accepted: bool
    clause: Optional[str] = None
    message: str = ""
    location: Optional[Any] = None

    def __bool__(self) -> bool:
        return self.accepted

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "clause": self.clause,
            "message": self.message,
            "location": self.location,
        }


ACCEPT = Verdict(True, message="accepted")


def _first_mismatch(usage: np.ndarray, host: AnyGraph) -> Optional[Tuple[int, int]]:
    diff = np.argwhere(usage != host.mult)
    if diff.size == 0:
        return None
    u, v = (int(x) for x in diff[0])
    return (u, v) if host.directed or u < v else (v, u)


def verify_decomposition(
    host: AnyGraph,
    candidate: Union[HamiltonDecomposition, Sequence[CycleLike]],
    directed: Optional[bool] = None,
) -> Verdict:
    """Check that the candidate cycles form a Hamilton decomposition of the host.

    Clauses, checked in order:

    - ``kind``: the candidate's orientation matches the host's.
    - ``spanning``: every part lists each vertex exactly once.
    - ``edge``: every consecutive pair (cyclically) is an edge of the host.
    - ``partition``: per-pair usage equals the host multiplicity exactly.

    Args:
        host: Multidigraph or multigraph.
        candidate: A decomposition or raw vertex sequences.
        directed: Orientation of raw sequences (default: the host's).

    Returns:
        The verdict; rejections name the first violation.
    """
    if isinstance(candidate, HamiltonDecomposition):
        cycles = [c.vertices for c in candidate.cycles]
        kind = candidate.directed
    else:
        cycles = [tuple(c) for c in candidate]
        kind = host.directed if directed is None else directed
    if kind != host.directed:
        return Verdict(False, "kind", "Candidate and host differ in orientation")

    n = host.n
    usage = np.zeros((n, n), dtype=np.int64)
    for index, cycle in enumerate(cycles):
        if len(cycle) != n or sorted(cycle) != list(range(n)) or n < 2:
            return Verdict(
                False, "spanning", f"Part {index} is not a spanning cycle", location=index
            )
        for i, u in enumerate(cycle):
            v = cycle[(i + 1) % n]
            if host.m(u, v) == 0:
                return Verdict(
                    False, "edge", f"Part {index} uses ({u}, {v}), absent from the host",
                    location=[index, u, v],
                )
            usage[u, v] += 1
            if not host.directed:
                usage[v, u] += 1

    mismatch = _first_mismatch(usage, host)
    if mismatch is not None:
        u, v = mismatch
        return Verdict(
            False,
            "partition",
            f"Pair ({u}, {v}) used {int(usage[u, v])} times, multiplicity {host.m(u, v)}",
            location=[u, v],
        )
    logger.debug(f"Verified {len(cycles)} Hamilton cycles on {n} vertices")
    return ACCEPT


def verify_one_factorisation(
    graph: Multigraph, classes: Sequence[Sequence[Sequence[int]]]
) -> Verdict:
    """Check that the classes are perfect matchings partitioning ``E(G)``.

    Clauses: ``perfect`` (class size n/2), ``matching`` (no shared vertex),
    ``edge`` (pair absent from G), ``partition`` (usage equals multiplicity).
    """
    n = graph.n
    usage = np.zeros((n, n), dtype=np.int64)
    for index, matching in enumerate(classes):
        if 2 * len(matching) != n:
            return Verdict(
                False, "perfect", f"Class {index} has {len(matching)} edges, need {n // 2}",
                location=index,
            )
        covered = set()
        for edge in matching:
            u, v = int(edge[0]), int(edge[1])
            if u in covered or v in covered or u == v:
                return Verdict(
                    False, "matching", f"Class {index} reuses a vertex at ({u}, {v})",
                    location=[index, u, v],
                )
            covered.update((u, v))
            if not (0 <= u < n and 0 <= v < n) or graph.m(u, v) == 0:
                return Verdict(
                    False, "edge", f"Class {index} uses ({u}, {v}), absent from the graph",
                    location=[index, u, v],
                )
            usage[u, v] += 1
            usage[v, u] += 1

    mismatch = _first_mismatch(usage, graph)
    if mismatch is not None:
        u, v = mismatch
        return Verdict(
            False,
            "partition",
            f"Pair ({u}, {v}) used {int(usage[u, v])} times, multiplicity {graph.m(u, v)}",
            location=[u, v],
        )
    return ACCEPT
