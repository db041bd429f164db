#!/usr/bin/env python
"""Hamilton path, cycle and decomposition search at desk scale.

All searches share one backtracking engine that works on a mutable
``available[u][v]`` multiplicity table restricted to a vertex subset. It
extends the current path toward the candidate with the fewest remaining
onward edges and prunes a branch when

- an unvisited vertex has no usable out-edge or in-edge left, or
- some unvisited vertex is unreachable from the path end through
  unvisited vertices.

Budgets count search-tree nodes. Running out of budget gives
:attr:`SearchStatus.INDETERMINATE`, which is never confused with
:attr:`SearchStatus.ABSENT` (search tree exhausted).
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import (
    Any,
    Dict,
    Generic,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    TypeVar,
)

import numpy as np

from .errors import DegreeError, GraphError, StageFailure
from .graph import AnyGraph, MultiDigraph, Multigraph, is_regular

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 5_000_000
PREFERRED_CANDIDATES = 64

Table = List[List[int]]
T = TypeVar("T")


class SearchStatus(str, Enum):
    """Outcome of a budgeted exact search."""

    FOUND = "found"
    ABSENT = "absent"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class DirectedPath:
    """A path of distinct vertices; ``edges`` are the consecutive pairs."""

    vertices: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.vertices:
            raise GraphError("A path needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("A path may not repeat vertices", context=str(self.vertices))

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return list(zip(self.vertices, self.vertices[1:]))

    @property
    def first(self) -> int:
        return self.vertices[0]

    @property
    def last(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        """Number of edges."""
        return len(self.vertices) - 1


@dataclass(frozen=True)
class HamiltonCycle:
    """A cyclic vertex sequence; ``edges`` include the closing pair."""

    vertices: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 2:
            raise GraphError("A cycle needs at least two vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("A cycle may not repeat vertices", context=str(self.vertices))

    @property
    def edges(self) -> List[Tuple[int, int]]:
        k = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % k]) for i in range(k)]

    def __len__(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class HamiltonDecomposition:
    """Hamilton cycles that jointly partition an edge multiset.

    For an undirected decomposition each cycle's edges are read as
    unordered pairs.
    """

    cycles: Tuple[HamiltonCycle, ...]
    directed: bool = True

    def usage(self, n: int) -> np.ndarray:
        """Per-pair count of edge instances used by the cycles."""
        matrix = np.zeros((n, n), dtype=np.int64)
        for cycle in self.cycles:
            for u, v in cycle.edges:
                matrix[u, v] += 1
                if not self.directed:
                    matrix[v, u] += 1
        return matrix

    def undirected(self) -> "HamiltonDecomposition":
        """Drop the orientation of every cycle."""
        return HamiltonDecomposition(self.cycles, directed=False)

    def to_dict(self) -> Dict[str, Any]:
        return {"directed": self.directed, "cycles": [list(c.vertices) for c in self.cycles]}

    def __len__(self) -> int:
        return len(self.cycles)


@dataclass
class SearchResult(Generic[T]):
    """Status of a budgeted search, its value when found and the nodes spent."""

    status: SearchStatus
    value: Optional[T] = None
    nodes: int = 0
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status is SearchStatus.FOUND


class _BudgetExhausted(Exception):
    pass


class _Budget:
    """Node counter shared by one search call."""

    def __init__(self, limit: Optional[int]):
        self.limit = limit
        self.nodes = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.limit is not None and self.nodes > self.limit:
            raise _BudgetExhausted()


def _table(graph: AnyGraph) -> Table:
    return graph.mult.tolist()


def _walks(
    available: Table,
    allowed: Iterable[int],
    prefix: Sequence[int],
    end: Optional[int],
    budget: _Budget,
    undirected: bool = False,
) -> Iterator[List[int]]:
    """Yield every Hamilton path of ``allowed`` extending ``prefix``.

    With ``end`` set, paths must finish at ``end``; with ``end=None`` the
    last vertex must close back to ``prefix[0]`` and the yielded lists are
    cycles. Callers may change ``available`` between yields as long as they
    restore it before resuming.
    """
    start = prefix[0]
    close = end is None
    path = list(prefix)
    unvisited: Set[int] = set(allowed) - set(prefix)
    size = len(unvisited) + len(prefix)

    def closes(cur: int) -> bool:
        # an undirected 2-cycle consumes both parallel copies
        if undirected and size == 2:
            return available[cur][start] >= 2
        return available[cur][start] > 0

    def pruned(cur: int) -> bool:
        for w in unvisited:
            row = available[w]
            if w != end and not any(row[z] > 0 for z in unvisited if z != w):
                if not (close and row[start] > 0):
                    return True
            if available[cur][w] == 0 and not any(
                available[z][w] > 0 for z in unvisited if z != w
            ):
                return True
        if close and not any(available[z][start] > 0 for z in unvisited):
            return True
        seen = {cur}
        frontier = [cur]
        while frontier:
            a = frontier.pop()
            row = available[a]
            for b in unvisited:
                if b not in seen and row[b] > 0:
                    seen.add(b)
                    frontier.append(b)
        return len(seen) - 1 < len(unvisited)

    def onward(v: int) -> int:
        row = available[v]
        return sum(1 for z in unvisited if z != v and row[z] > 0)

    def walk(cur: int) -> Iterator[List[int]]:
        budget.tick()
        if not unvisited:
            if (close and closes(cur)) or (not close and cur == end):
                yield list(path)
            return
        if pruned(cur):
            return
        row = available[cur]
        candidates = [
            v
            for v in unvisited
            if row[v] > 0 and (close or v != end or len(unvisited) == 1)
        ]
        candidates.sort(key=lambda v: (onward(v), v))
        for v in candidates:
            unvisited.discard(v)
            path.append(v)
            yield from walk(v)
            path.pop()
            unvisited.add(v)

    yield from walk(path[-1])


def _first(walks: Iterator[List[int]], budget: _Budget) -> SearchResult[List[int]]:
    try:
        found = next(walks, None)
    except _BudgetExhausted:
        return SearchResult(SearchStatus.INDETERMINATE, nodes=budget.nodes)
    if found is None:
        return SearchResult(SearchStatus.ABSENT, nodes=budget.nodes)
    return SearchResult(SearchStatus.FOUND, found, budget.nodes)


def hamilton_path(
    digraph: MultiDigraph,
    x: int,
    y: int,
    budget: Optional[int] = DEFAULT_BUDGET,
    vertices: Optional[Iterable[int]] = None,
) -> SearchResult[DirectedPath]:
    """Search for a Hamilton path from ``x`` to ``y``.

    Args:
        digraph: Host multidigraph.
        x: First vertex.
        y: Last vertex, distinct from ``x``.
        budget: Node limit; None searches exhaustively.
        vertices: Vertex subset to span (default: all vertices).

    Returns:
        FOUND with the path, ABSENT when no path exists, or INDETERMINATE
        when the budget ran out first.
    """
    if x == y:
        raise GraphError(f"Hamilton path endpoints must differ, got {x} twice")
    allowed = list(range(digraph.n)) if vertices is None else sorted(set(vertices))
    if x not in allowed or y not in allowed:
        raise GraphError(f"Endpoints ({x}, {y}) must lie in the spanned vertex set")
    counter = _Budget(budget)
    result = _first(_walks(_table(digraph), allowed, [x], y, counter), counter)
    if result.found:
        return SearchResult(SearchStatus.FOUND, DirectedPath(tuple(result.value)), result.nodes)
    return SearchResult(result.status, nodes=result.nodes)


def hamilton_cycle(
    digraph: MultiDigraph, budget: Optional[int] = DEFAULT_BUDGET
) -> SearchResult[HamiltonCycle]:
    """Search for a directed Hamilton cycle (n ≥ 2) starting at vertex 0."""
    if digraph.n < 2:
        raise GraphError(f"A Hamilton cycle needs at least two vertices, got {digraph.n}")
    counter = _Budget(budget)
    result = _first(_walks(_table(digraph), range(digraph.n), [0], None, counter), counter)
    if result.found:
        return SearchResult(SearchStatus.FOUND, HamiltonCycle(tuple(result.value)), result.nodes)
    return SearchResult(result.status, nodes=result.nodes)


@dataclass
class GreedyExtraction:
    """Cycles taken one at a time and what is left of the host."""

    cycles: List[HamiltonCycle]
    leftover: MultiDigraph
    target: int
    stopped: SearchStatus

    @property
    def max_out_degree(self) -> int:
        return int(self.leftover.out_degrees().max(initial=0))

    @property
    def max_in_degree(self) -> int:
        return int(self.leftover.in_degrees().max(initial=0))

    @property
    def shortfall(self) -> int:
        return max(0, self.target - len(self.cycles))


def greedy_edge_disjoint_hamilton(
    digraph: MultiDigraph, target: int, budget: Optional[int] = DEFAULT_BUDGET
) -> GreedyExtraction:
    """Extract up to ``target`` edge-disjoint Hamilton cycles one at a time.

    While more cycles are still wanted after the current one, the first of
    up to ``PREFERRED_CANDIDATES`` cycles whose removal keeps the remainder
    strongly connected (or edgeless) is taken; otherwise the first cycle
    found is. The extraction stops at the target or at the first search that
    finds no cycle; a shortfall is reported, not raised.

    Args:
        digraph: Host multidigraph.
        target: Number of cycles wanted.
        budget: Node limit for each cycle search.
    """
    n = digraph.n
    available = _table(digraph)
    cycles: List[HamiltonCycle] = []
    stopped = SearchStatus.FOUND
    while len(cycles) < target and n >= 2:
        counter = _Budget(budget)
        last_wanted = len(cycles) == target - 1
        first: Optional[List[int]] = None
        chosen: Optional[List[int]] = None
        exhausted = False
        try:
            for seen, walk in enumerate(_walks(available, range(n), [0], None, counter), 1):
                if first is None:
                    first = walk
                if last_wanted:
                    break
                _apply(available, walk, -1)
                keeps = _edgeless(available) or _connected(available, n)
                _apply(available, walk, +1)
                if keeps:
                    chosen = walk
                    break
                if seen >= PREFERRED_CANDIDATES:
                    break
        except _BudgetExhausted:
            exhausted = True
        if chosen is None:
            chosen = first
        if chosen is None:
            stopped = SearchStatus.INDETERMINATE if exhausted else SearchStatus.ABSENT
            break
        _apply(available, chosen, -1)
        cycles.append(HamiltonCycle(tuple(chosen)))
    leftover = MultiDigraph(n, np.array(available, dtype=np.int64).reshape(n, n))
    extraction = GreedyExtraction(cycles, leftover, target, stopped)
    logger.debug(
        f"Extracted {len(cycles)}/{target} Hamilton cycles; leftover "
        f"max out/in degree {extraction.max_out_degree}/{extraction.max_in_degree}"
    )
    return extraction


def short_path(
    digraph: MultiDigraph,
    x: int,
    y: int,
    maxlen: int,
    forbidden_vertices: Iterable[int] = (),
    forbidden_edges: Iterable[Tuple[int, int]] = (),
) -> Optional[DirectedPath]:
    """Breadth-first shortest path from ``x`` to ``y`` avoiding forbidden sets.

    Returns:
        The path when its length is at most ``maxlen``, otherwise None.

    Raises:
        GraphError: If ``x == y`` or an endpoint is forbidden.
    """
    blocked = set(forbidden_vertices)
    if x == y:
        raise GraphError(f"short_path endpoints must differ, got {x} twice")
    if x in blocked or y in blocked:
        raise GraphError(f"Endpoints ({x}, {y}) may not be forbidden")
    banned = set(forbidden_edges)
    parent: Dict[int, int] = {x: x}
    depth = {x: 0}
    queue = deque([x])
    mult = digraph.mult
    while queue:
        u = queue.popleft()
        if depth[u] >= maxlen:
            continue
        for v in np.flatnonzero(mult[u]).tolist():
            if v in parent or v in blocked or (u, v) in banned:
                continue
            parent[v] = u
            depth[v] = depth[u] + 1
            if v == y:
                route = [y]
                while route[-1] != x:
                    route.append(parent[route[-1]])
                return DirectedPath(tuple(reversed(route)))
            queue.append(v)
    return None


def absorb_matching(
    matching: Sequence[Tuple[int, int]],
    host: MultiDigraph,
    reserved: Optional[MultiDigraph] = None,
    *,
    path_vertex_cap: int,
    maxlen: int,
) -> DirectedPath:
    """Thread the edges ``(u₁, v₁), …, (u_m, v_m)`` of a matching into one path.

    ``Q₁`` is the edge ``(u₁, v₁)``. ``Q_j`` appends a shortest connector
    from ``v_{j−1}`` to ``u_j`` and then ``(u_j, v_j)``. The connector may
    not touch ``v_j``, any later matched vertex or any vertex of ``Q_{j−1}``
    other than ``v_{j−1}``.

    Args:
        matching: Endpoint-disjoint edges, absorbed in the given order.
        host: Graph the connectors are routed in.
        reserved: Edges of the host that connectors may not use.
        path_vertex_cap: Maximum vertex count of the finished path.
        maxlen: Maximum connector length.

    Raises:
        StageFailure: ``absorption`` with the failing step ``j`` and pair.
    """
    if not matching:
        raise GraphError("Cannot absorb an empty matching")
    endpoints = [v for edge in matching for v in edge]
    if len(set(endpoints)) != len(endpoints):
        raise GraphError("Absorbed edges must be endpoint-disjoint", context=str(list(matching)))
    if reserved is not None:
        host = MultiDigraph(host.n, host.mult - np.minimum(host.mult, reserved.mult))
    for u, v in matching:
        if not host.has_edge(u, v):
            raise StageFailure("absorption", f"Matching edge ({u}, {v}) is not in the host")

    vertices = [matching[0][0], matching[0][1]]
    for j in range(1, len(matching)):
        u_j, v_j = matching[j]
        later = {w for edge in matching[j + 1 :] for w in edge}
        forbidden = (set(vertices) - {vertices[-1]}) | {v_j} | later
        connector = short_path(host, vertices[-1], u_j, maxlen, forbidden)
        if connector is None:
            raise StageFailure(
                "absorption",
                f"No connector of length <= {maxlen} from {vertices[-1]} to {u_j}",
                detail={"j": j + 1, "pair": [vertices[-1], u_j]},
            )
        vertices.extend(connector.vertices[1:])
        vertices.append(v_j)
    if len(vertices) > path_vertex_cap:
        raise StageFailure(
            "absorption",
            f"Absorbing path has {len(vertices)} vertices, cap is {path_vertex_cap}",
            detail={"vertices": len(vertices), "cap": path_vertex_cap},
        )
    return DirectedPath(tuple(vertices))


def complete_to_hamilton(
    path: DirectedPath,
    host: MultiDigraph,
    reserved: Optional[MultiDigraph] = None,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> HamiltonCycle:
    """Close a path ``x … y`` into a Hamilton cycle of the host.

    The interior of the path is deleted and a Hamilton path from ``y`` to
    ``x`` through all remaining vertices is searched for; together with the
    path it forms the cycle.

    Raises:
        StageFailure: ``completion`` when no closing path is found.
    """
    if reserved is not None:
        host = MultiDigraph(host.n, host.mult - np.minimum(host.mult, reserved.mult))
    x, y = path.first, path.last
    if len(path.vertices) == host.n:
        if host.n >= 2 and host.has_edge(y, x):
            return HamiltonCycle(path.vertices)
        raise StageFailure(
            "completion",
            f"Spanning path cannot be closed: edge ({y}, {x}) is unavailable",
            detail={"pair": [y, x]},
        )
    on_path = set(path.vertices)
    allowed = [v for v in range(host.n) if v not in on_path or v in (x, y)]
    result = hamilton_path(host, y, x, budget, vertices=allowed)
    if not result.found:
        raise StageFailure(
            "completion",
            f"No Hamilton path from {y} to {x} in the reduced host ({result.status.value})",
            detail={"status": result.status.value, "nodes": result.nodes},
        )
    closing = result.value.vertices[1:-1]
    return HamiltonCycle(path.vertices + closing)


def complete_and_decompose(
    paths: Sequence[DirectedPath],
    host: MultiDigraph,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> SearchResult[HamiltonDecomposition]:
    """Close every path into its own Hamilton cycle and decompose the rest.

    Unlike repeated :func:`complete_to_hamilton` calls, a closing path is
    undone when the later paths or the remainder cannot be finished with
    what it leaves. All searches share one node budget.

    Args:
        paths: Edge-disjoint paths of the host, one per wanted cycle.
        host: s-regular multidigraph containing every path.
        budget: Node limit for the whole search.

    Returns:
        FOUND with the completed cycles first (in path order) followed by
        the cycles of the remainder; ABSENT or INDETERMINATE otherwise.

    Raises:
        DegreeError: If the host is not regular.
        GraphError: If there are more paths than the degree or the paths
            are not edge-disjoint in the host.
    """
    s = is_regular(host)
    if s is None:
        raise DegreeError("Completion needs a regular host")
    if len(paths) > s:
        raise GraphError(f"{len(paths)} paths cannot lie on {s} edge-disjoint cycles")
    n = host.n
    available = _table(host)
    for path in paths:
        _apply_path(available, path.vertices, -1)
    if any(value < 0 for row in available for value in row):
        raise GraphError("Paths are not edge-disjoint in the host")

    counter = _Budget(budget)
    closed: List[Tuple[int, ...]] = []
    found: List[List[int]] = []

    def close(i: int) -> bool:
        if i == len(paths):
            return s == len(paths) or _decompose(
                available, n, s - len(paths), counter, False, found
            )
        path = paths[i]
        interior = set(path.vertices[1:-1])
        allowed = [v for v in range(n) if v not in interior]
        for closing in _walks(available, allowed, [path.last], path.first, counter):
            _apply_path(available, closing, -1)
            closed.append(path.vertices + tuple(closing[1:-1]))
            if close(i + 1):
                return True
            closed.pop()
            _apply_path(available, closing, +1)
        return False

    try:
        success = close(0)
    except _BudgetExhausted:
        logger.info(f"Completion search hit its budget after {counter.nodes} nodes")
        return SearchResult(SearchStatus.INDETERMINATE, nodes=counter.nodes)
    if not success:
        return SearchResult(SearchStatus.ABSENT, nodes=counter.nodes)
    cycles = tuple(HamiltonCycle(c) for c in closed) + tuple(
        HamiltonCycle(tuple(c)) for c in found
    )
    return SearchResult(SearchStatus.FOUND, HamiltonDecomposition(cycles), counter.nodes)


def _apply_path(available: Table, path: Sequence[int], delta: int) -> None:
    for a, b in zip(path, path[1:]):
        available[a][b] += delta


def _apply(available: Table, cycle: Sequence[int], delta: int, undirected: bool = False) -> None:
    k = len(cycle)
    for i in range(k):
        a, b = cycle[i], cycle[(i + 1) % k]
        available[a][b] += delta
        if undirected:
            available[b][a] += delta


def _edgeless(available: Table) -> bool:
    return not any(any(row) for row in available)


def _reach(available: Table, n: int, reverse: bool) -> int:
    seen = [False] * n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        a = stack.pop()
        for b in range(n):
            edge = available[b][a] if reverse else available[a][b]
            if edge > 0 and not seen[b]:
                seen[b] = True
                count += 1
                stack.append(b)
    return count


def _connected(available: Table, n: int) -> bool:
    """Strong connectivity (plain connectivity for symmetric tables)."""
    return _reach(available, n, False) == n and _reach(available, n, True) == n


def _decompose(
    available: Table,
    n: int,
    remaining: int,
    counter: _Budget,
    undirected: bool,
    found: List[List[int]],
) -> bool:
    if remaining == 0:
        return True
    # the lowest edge at vertex 0 lies on some cycle of every decomposition
    v = next(w for w in range(n) if available[0][w] > 0)
    for cycle in _walks(available, range(n), [0, v], None, counter, undirected):
        _apply(available, cycle, -1, undirected)
        if remaining == 1 or _connected(available, n):
            found.append(cycle)
            if _decompose(available, n, remaining - 1, counter, undirected, found):
                return True
            found.pop()
        _apply(available, cycle, +1, undirected)
    return False


def _exact_decomposition(
    graph: AnyGraph, cycle_count: int, budget: Optional[int]
) -> SearchResult[HamiltonDecomposition]:
    counter = _Budget(budget)
    found: List[List[int]] = []
    undirected = not graph.directed
    try:
        success = graph.n >= 2 and _decompose(
            _table(graph), graph.n, cycle_count, counter, undirected, found
        )
    except _BudgetExhausted:
        logger.info(f"Exact decomposition search hit its budget after {counter.nodes} nodes")
        return SearchResult(SearchStatus.INDETERMINATE, nodes=counter.nodes)
    if not success:
        return SearchResult(SearchStatus.ABSENT, nodes=counter.nodes)
    cycles = tuple(HamiltonCycle(tuple(c)) for c in found)
    return SearchResult(
        SearchStatus.FOUND, HamiltonDecomposition(cycles, directed=graph.directed), counter.nodes
    )


def decompose_regular(
    digraph: MultiDigraph, budget: Optional[int] = DEFAULT_BUDGET
) -> SearchResult[HamiltonDecomposition]:
    """Exact Hamilton decomposition of an s-regular multidigraph.

    Cycles are extracted recursively; the first edge of each new cycle is
    fixed to the lowest remaining out-edge of vertex 0, and a cycle is
    undone when the remainder cannot be finished. A remainder that is not
    strongly connected is abandoned immediately.

    Returns:
        FOUND with ``s`` cycles, ABSENT after exhausting the search tree,
        or INDETERMINATE when the budget ran out.

    Raises:
        DegreeError: If the digraph is not regular.
    """
    s = is_regular(digraph)
    if s is None:
        raise DegreeError("Exact decomposition needs a regular digraph")
    if s == 0:
        return SearchResult(SearchStatus.FOUND, HamiltonDecomposition(()), 0)
    return _exact_decomposition(digraph, s, budget)


def decompose_regular_graph(
    graph: Multigraph, budget: Optional[int] = DEFAULT_BUDGET
) -> SearchResult[HamiltonDecomposition]:
    """Exact Hamilton decomposition of an s-regular multigraph into s/2 cycles.

    An odd degree makes a decomposition impossible and gives ABSENT without
    searching.
    """
    s = is_regular(graph)
    if s is None:
        raise DegreeError("Exact decomposition needs a regular graph")
    if s == 0:
        return SearchResult(SearchStatus.FOUND, HamiltonDecomposition((), directed=False), 0)
    if s % 2:
        return SearchResult(SearchStatus.ABSENT, detail={"reason": f"degree {s} is odd"})
    return _exact_decomposition(graph, s // 2, budget)
