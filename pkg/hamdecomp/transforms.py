#!/usr/bin/env python
"""Deterministic graph surgery used by the reductions.

- Eulerian orientation of even multigraphs (exactly balanced) and a
  near-balanced orientation of arbitrary graphs.
- Cycle decomposition of even multigraphs, 2-cycles allowed, and
  consistent orientation of the cycles.
- k-factor extraction through a degree-constrained max-flow.
- Perfect matching by maximum-cardinality matching.
- Vizing edge colouring (Misra–Gries fan recolouring) and the resulting
  decomposition of a leftover digraph into small matchings.

Every function accepts an optional ``seed`` where a traversal order matters;
without one the order is the natural vertex order.
"""

import logging
import math
import random
from typing import Dict, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from .errors import DegreeError, GraphError, InfeasibleError
from .graph import MultiDigraph, Multigraph, is_regular

logger = logging.getLogger(__name__)

Cycle = Tuple[int, ...]
DirectedEdge = Tuple[int, int]


def _euler_circuits(
    n: int, edges: Sequence[Tuple[int, int]], rng: Optional[random.Random] = None
) -> Tuple[List[DirectedEdge], List[List[int]]]:
    """Hierholzer's algorithm on every component of an even multigraph.

    Args:
        n: Number of vertices.
        edges: Undirected edge instances (parallel copies listed repeatedly).
        rng: Optional source of randomness for start and neighbour order.

    Returns:
        ``(oriented, circuits)``: every edge instance in its traversal
        direction, and one closed walk ``[v0, ..., v0]`` per component.
    """
    adjacency: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
    for eid, (u, v) in enumerate(edges):
        adjacency[u].append((v, eid))
        adjacency[v].append((u, eid))
    starts = list(range(n))
    if rng is not None:
        for neighbours in adjacency:
            rng.shuffle(neighbours)
        rng.shuffle(starts)

    used = [False] * len(edges)
    pointer = [0] * n
    oriented: List[DirectedEdge] = []
    circuits: List[List[int]] = []

    def advance(v: int) -> Optional[Tuple[int, int]]:
        neighbours = adjacency[v]
        while pointer[v] < len(neighbours) and used[neighbours[pointer[v]][1]]:
            pointer[v] += 1
        return neighbours[pointer[v]] if pointer[v] < len(neighbours) else None

    for start in starts:
        if advance(start) is None:
            continue
        stack: List[Tuple[int, Optional[DirectedEdge]]] = [(start, None)]
        circuit: List[int] = []
        while stack:
            v, via = stack[-1]
            step = advance(v)
            if step is not None:
                w, eid = step
                used[eid] = True
                pointer[v] += 1
                stack.append((w, (v, w)))
            else:
                stack.pop()
                circuit.append(v)
                if via is not None:
                    oriented.append(via)
        circuit.reverse()
        circuits.append(circuit)
    return oriented, circuits


def _edge_list(graph: Multigraph) -> List[Tuple[int, int]]:
    return [(e.tail, e.head) for e in graph.edge_instances()]


def _require_even(graph: Multigraph) -> None:
    odd = np.flatnonzero(graph.degrees() % 2)
    if odd.size:
        vertex = int(odd[0])
        raise DegreeError(
            f"Vertex {vertex} has odd degree {int(graph.degrees()[vertex])}", vertex=vertex
        )


def eulerian_orient(graph: Multigraph, seed: Optional[int] = None) -> MultiDigraph:
    """Orient every edge instance so that ``d⁺(v) = d⁻(v) = d(v)/2``.

    Each connected component is oriented along one of its Euler circuits.

    Args:
        graph: Multigraph with all degrees even (may be disconnected).
        seed: Optional seed randomising the circuits.

    Returns:
        Exactly balanced orientation with the same underlying edge multiset.

    Raises:
        DegreeError: Naming the first odd-degree vertex.
    """
    _require_even(graph)
    rng = random.Random(seed) if seed is not None else None
    oriented, _ = _euler_circuits(graph.n, _edge_list(graph), rng)
    digraph = MultiDigraph.from_edges(graph.n, oriented)
    assert np.array_equal(digraph.out_degrees() * 2, graph.degrees())
    assert np.array_equal(digraph.in_degrees() * 2, graph.degrees())
    return digraph


def balanced_orient(graph: Multigraph, seed: Optional[int] = None) -> MultiDigraph:
    """Orient any multigraph with ``|d⁺(v) − d⁻(v)| ≤ 1`` everywhere.

    Odd-degree vertices are joined to an auxiliary vertex, the result is
    oriented along Euler circuits and the auxiliary edges are dropped.
    """
    n = graph.n
    degrees = graph.degrees()
    edges = _edge_list(graph)
    odd = np.flatnonzero(degrees % 2).tolist()
    edges.extend((v, n) for v in odd)
    rng = random.Random(seed) if seed is not None else None
    oriented, _ = _euler_circuits(n + 1, edges, rng)
    kept = [(u, v) for u, v in oriented if u != n and v != n]
    digraph = MultiDigraph.from_edges(n, kept)
    assert int(np.abs(digraph.out_degrees() - digraph.in_degrees()).max(initial=0)) <= 1
    return digraph


def cycle_decompose_even(graph: Multigraph, seed: Optional[int] = None) -> List[Cycle]:
    """Partition the edge instances of an even multigraph into cycles.

    Cycles have length at least 2; a 2-cycle ``(u, v)`` consumes two parallel
    copies of ``{u, v}``. Each cycle is listed in a consistent traversal
    direction, so :func:`orient_cycles` can orient it directly.

    Raises:
        DegreeError: On an odd-degree vertex.
    """
    _require_even(graph)
    rng = random.Random(seed) if seed is not None else None
    _, circuits = _euler_circuits(graph.n, _edge_list(graph), rng)
    cycles: List[Cycle] = []
    for circuit in circuits:
        stack: List[int] = []
        position: Dict[int, int] = {}
        for x in circuit:
            if x in position:
                idx = position[x]
                cycles.append(tuple(stack[idx:]))
                for y in stack[idx + 1 :]:
                    del position[y]
                del stack[idx + 1 :]
            else:
                position[x] = len(stack)
                stack.append(x)
    logger.debug(f"Decomposed {graph.edge_count} edges into {len(cycles)} cycles")
    return cycles


def orient_cycles(cycles: Sequence[Sequence[int]], n: int) -> MultiDigraph:
    """Turn each cycle ``(v0, …, vk−1)`` into the directed cycle ``v0 → … → v0``."""
    edges: List[DirectedEdge] = []
    for cycle in cycles:
        if len(cycle) < 2:
            raise GraphError(f"Cycle {tuple(cycle)} is shorter than 2")
        k = len(cycle)
        edges.extend((cycle[i], cycle[(i + 1) % k]) for i in range(k))
    return MultiDigraph.from_edges(n, edges)


def extract_factor(digraph: MultiDigraph, k: int) -> MultiDigraph:
    """Find a spanning k-regular subdigraph by max-flow.

    Vertex ``u`` is split into an out-copy (capacity ``k`` from the source)
    and an in-copy (capacity ``k`` to the sink); every pair ``(u, v)`` gives
    an arc of capacity ``mult(u, v)``. A k-factor exists iff the maximum flow
    saturates all ``nk`` source arcs.

    Raises:
        InfeasibleError: With a minimum cut as witness when no factor exists.
    """
    if k < 0:
        raise GraphError(f"Factor degree must be non-negative, got {k}")
    n = digraph.n
    if k == 0:
        return MultiDigraph(n)
    network = nx.DiGraph()
    network.add_node("source")
    network.add_node("sink")
    for v in range(n):
        network.add_edge("source", ("out", v), capacity=k)
        network.add_edge(("in", v), "sink", capacity=k)
    for u, v, m in digraph.pairs():
        network.add_edge(("out", u), ("in", v), capacity=m)
    value, flows = nx.maximum_flow(network, "source", "sink")
    if value < n * k:
        cut_value, (source_side, _) = nx.minimum_cut(network, "source", "sink")
        witness = {
            "required": n * k,
            "max_flow": int(value),
            "cut_value": int(cut_value),
            "source_side_out": sorted(v for kind, v in _typed(source_side) if kind == "out"),
            "source_side_in": sorted(v for kind, v in _typed(source_side) if kind == "in"),
        }
        raise InfeasibleError(f"No {k}-factor exists", witness=witness)
    edges = []
    for u in range(n):
        for node, amount in flows[("out", u)].items():
            if amount > 0:
                edges.append((u, node[1], int(amount)))
    factor = MultiDigraph.from_edges(n, edges)
    assert is_regular(factor) == k
    return factor


def _typed(nodes: Set) -> List[Tuple[str, int]]:
    return [node for node in nodes if isinstance(node, tuple)]


def perfect_matching(graph: Multigraph) -> List[Tuple[int, int]]:
    """Find ``n/2`` pairwise-disjoint edges covering every vertex.

    Returns:
        Sorted pairs ``(u, v)`` with ``u < v``; one copy of each is used.

    Raises:
        GraphError: If ``n`` is odd.
        InfeasibleError: Listing unmatched vertices of a maximum matching.
    """
    n = graph.n
    if n % 2:
        raise GraphError(f"A perfect matching needs an even vertex count, got {n}")
    simple = nx.Graph()
    simple.add_nodes_from(range(n))
    simple.add_edges_from((u, v) for u, v, _ in graph.pairs())
    matching = nx.max_weight_matching(simple, maxcardinality=True)
    pairs = sorted((min(u, v), max(u, v)) for u, v in matching)
    if 2 * len(pairs) < n:
        covered = {v for pair in pairs for v in pair}
        raise InfeasibleError(
            "No perfect matching exists",
            witness={
                "maximum_matching_size": len(pairs),
                "unmatched": [v for v in range(n) if v not in covered],
            },
        )
    return pairs


def vizing_color(graph: Multigraph) -> Dict[Tuple[int, int], int]:
    """Properly edge-colour a simple graph with at most ``Δ + 1`` colours.

    Edges are processed in sorted order. An edge whose endpoints share a
    free colour takes the smallest such colour; otherwise a maximal fan at
    one endpoint is built, a two-coloured path is inverted and the fan is
    rotated (Misra–Gries).

    Returns:
        Colour ``0..Δ`` for every edge ``(u, v)`` with ``u < v``.
    """
    if graph.multiplicity > 1:
        raise GraphError("Vizing colouring needs a simple graph")
    n = graph.n
    delta = int(graph.degrees().max(initial=0))
    palette = range(delta + 1)
    at: List[Dict[int, int]] = [{} for _ in range(n)]
    colour: Dict[Tuple[int, int], int] = {}

    def key(a: int, b: int) -> Tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def free(v: int) -> int:
        return next(c for c in palette if c not in at[v])

    def is_free(c: int, v: int) -> bool:
        return c not in at[v]

    def uncolour(a: int, b: int) -> None:
        c = colour.pop(key(a, b), None)
        if c is not None:
            del at[a][c]
            del at[b][c]

    def paint(a: int, b: int, c: int) -> None:
        uncolour(a, b)
        colour[key(a, b)] = c
        at[a][c] = b
        at[b][c] = a

    neighbours = [graph.neighbours(v) for v in range(n)]
    for u, v, _ in graph.pairs():
        common = next((c for c in palette if c not in at[u] and c not in at[v]), None)
        if common is not None:
            paint(u, v, common)
            continue

        fan = [v]
        in_fan = {v}
        extended = True
        while extended:
            extended = False
            last = fan[-1]
            for w in neighbours[u]:
                c = colour.get(key(u, w))
                if w not in in_fan and c is not None and is_free(c, last):
                    fan.append(w)
                    in_fan.add(w)
                    extended = True
                    break

        c = free(u)
        d = free(fan[-1])

        # invert the maximal path from u alternating colours d, c
        path_edges: List[Tuple[int, int]] = []
        x, want, other = u, d, c
        while want in at[x]:
            y = at[x][want]
            path_edges.append((x, y))
            x, want, other = y, other, want
        flipped = [(a, b, c if colour[key(a, b)] == d else d) for a, b in path_edges]
        for a, b, _ in flipped:
            uncolour(a, b)
        for a, b, new in flipped:
            paint(a, b, new)

        # first fan vertex w with d free whose prefix is still a fan
        end = None
        for i, w in enumerate(fan):
            if i > 0:
                previous = colour.get(key(u, w))
                if previous is None or not is_free(previous, fan[i - 1]):
                    break
            if is_free(d, w):
                end = i
                break
        if end is None:
            raise AssertionError(f"Misra-Gries fan rotation failed at edge ({u}, {v})")
        for i in range(end):
            shifted = colour[key(u, fan[i + 1])]
            uncolour(u, fan[i + 1])
            paint(u, fan[i], shifted)
        paint(u, fan[end], d)

    assert all(c <= delta for c in colour.values())
    return colour


def oriented_halves(digraph: MultiDigraph) -> List[MultiDigraph]:
    """Split a multidigraph into oriented graphs with simple underlying graphs.

    The copies of ``(u, v)`` and ``(v, u)`` with ``u < v`` are dealt out in
    that order to halves ``0, 1, 2, ...``, so each half holds at most one
    edge between any two vertices. One-way edges of a simple digraph all
    stay in half 0 and only antiparallel pairs reach half 1.
    """
    mult = digraph.mult
    layers = max(1, int((mult + mult.T).max(initial=0)))
    halves = [np.zeros((digraph.n, digraph.n), dtype=np.int64) for _ in range(layers)]
    for u in range(digraph.n):
        for v in range(u + 1, digraph.n):
            forward, backward = int(mult[u, v]), int(mult[v, u])
            for copy in range(forward):
                halves[copy][u, v] = 1
            for copy in range(forward, forward + backward):
                halves[copy][v, u] = 1
    return [MultiDigraph(digraph.n, half) for half in halves]


def color_classes(digraph: MultiDigraph) -> List[List[DirectedEdge]]:
    """Matchings of a digraph from Vizing colourings of its oriented halves.

    No two edges of a class share any endpoint, heads and tails alike.
    """
    classes: List[List[DirectedEdge]] = []
    for half in oriented_halves(digraph):
        if half.edge_count == 0:
            continue
        direction = {(min(u, v), max(u, v)): (u, v) for u, v, _ in half.pairs()}
        underlying = Multigraph(half.n, half.mult + half.mult.T)
        grouped: Dict[int, List[DirectedEdge]] = {}
        for pair, c in sorted(vizing_color(underlying).items()):
            grouped.setdefault(c, []).append(direction[pair])
        classes.extend(grouped[c] for c in sorted(grouped))
    return classes


def split_matching(matching: Sequence[DirectedEdge], size_cap: int) -> List[List[DirectedEdge]]:
    """Split a matching into ``ceil(len/cap)`` pieces of as equal size as possible."""
    if size_cap < 1:
        raise GraphError(f"Matching size cap must be at least 1, got {size_cap}")
    if len(matching) <= size_cap:
        return [list(matching)]
    pieces = math.ceil(len(matching) / size_cap)
    base, extra = divmod(len(matching), pieces)
    result = []
    start = 0
    for i in range(pieces):
        size = base + (1 if i < extra else 0)
        result.append(list(matching[start : start + size]))
        start += size
    return result


def matching_decompose(digraph: MultiDigraph, size_cap: int) -> List[List[DirectedEdge]]:
    """Partition a leftover digraph into matchings of at most ``size_cap`` edges.

    Raises:
        GraphError: If ``size_cap < 1``.
    """
    if size_cap < 1:
        raise GraphError(f"Matching size cap must be at least 1, got {size_cap}")
    matchings: List[List[DirectedEdge]] = []
    for matching in color_classes(digraph):
        matchings.extend(split_matching(matching, size_cap))
    logger.debug(f"Decomposed {digraph.edge_count} leftover edges into {len(matchings)} matchings")
    return matchings


def matching_class_bound(digraph: MultiDigraph) -> int:
    """Upper bound ``Σ 2(Δ̃ᵢ + 1)`` on the classes produced before cap splitting."""
    total = 0
    for half in oriented_halves(digraph):
        underlying = half.mult + half.mult.T
        total += 2 * (int(underlying.sum(axis=1).max(initial=0)) + 1)
    return total
