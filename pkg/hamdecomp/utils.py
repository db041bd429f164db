#!/usr/bin/env python
"""Utility functions for hamdecomp.

Rounding helpers used wherever a real-valued bound (νn, τn, (1 ± ξ)s/r) is
compared against an integer count, seed derivation for the staged RNG
stream, and graph summary statistics.
"""

import hashlib
import math
from typing import TYPE_CHECKING, Any, Dict, Tuple, Union

if TYPE_CHECKING:
    from .graph import MultiDigraph, Multigraph

# products like 0.3 * 10 come out as 3.0000000000000004
_EPS = 1e-9


def ceil_tol(value: float) -> int:
    """Ceiling that ignores floating point noise just above an integer.

    Args:
        value: Real value.

    Returns:
        The smallest integer not below ``value`` (up to 1e-9).
    """
    return math.ceil(value - _EPS)


def floor_tol(value: float) -> int:
    """Floor that ignores floating point noise just below an integer.

    Args:
        value: Real value.

    Returns:
        The largest integer not above ``value`` (up to 1e-9).
    """
    return math.floor(value + _EPS)


def size_band(n: int, tau: float) -> Tuple[int, int]:
    """Subset-size band ``ceil(τn) ≤ |S| ≤ floor((1−τ)n)``.

    Args:
        n: Number of vertices.
        tau: Band parameter in (0, 1).

    Returns:
        Inclusive ``(low, high)``; empty when ``low > high``.
    """
    return max(1, ceil_tol(tau * n)), floor_tol((1.0 - tau) * n)


def robust_threshold(n: int, nu: float) -> int:
    """In-neighbour count ``ceil(νn)`` a vertex needs to be robustly reached.

    Args:
        n: Number of vertices.
        nu: Robustness parameter in (0, 1).

    Returns:
        The integer threshold, at least 1.
    """
    return max(1, ceil_tol(nu * n))


def derive_seed(seed: int, *labels: Union[int, str]) -> int:
    """Derive an independent child seed from a parent seed and labels.

    The derivation is stable across processes and Python versions, so a
    pipeline run can be replayed from the parent seed alone.

    Args:
        seed: Parent seed.
        *labels: Stage names, part indices, attempt numbers.

    Returns:
        A 63-bit non-negative integer seed.
    """
    text = ":".join([str(seed)] + [str(label) for label in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def graph_stats(graph: Union["MultiDigraph", "Multigraph"]) -> Dict[str, Any]:
    """Summarise a graph by pure recounting.

    Args:
        graph: A multidigraph or multigraph.

    Returns:
        Dictionary with ``directed``, ``n``, ``edges`` (with multiplicity),
        ``distinct_pairs``, ``multiplicity``, ``regular`` (degree or None),
        ``min_degree`` (δ⁰ for digraphs, δ for graphs) and ``density`` of the
        underlying simple graph.
    """
    from .graph import is_regular

    n = graph.n
    directed = graph.directed
    if n == 0:
        return {
            "directed": directed,
            "n": 0,
            "edges": 0,
            "distinct_pairs": 0,
            "multiplicity": 0,
            "regular": 0,
            "min_degree": 0,
            "density": 0.0,
        }
    pairs = graph.distinct_pair_count()
    possible = n * (n - 1) if directed else n * (n - 1) // 2
    if directed:
        min_degree = int(min(graph.out_degrees().min(), graph.in_degrees().min()))
    else:
        min_degree = int(graph.degrees().min())
    return {
        "directed": directed,
        "n": n,
        "edges": graph.edge_count,
        "distinct_pairs": pairs,
        "multiplicity": graph.multiplicity,
        "regular": is_regular(graph),
        "min_degree": min_degree,
        "density": pairs / possible if possible else 0.0,
    }
