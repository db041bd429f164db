#!/usr/bin/env python
"""Multigraph and multidigraph value types.

Vertices are the integers ``0..n-1``. Multiplicities live in a dense
``n × n`` integer matrix (symmetric for undirected graphs) that is frozen
after construction: graph values are immutable and can be shared freely
between pipeline stages and worker processes. Use :class:`GraphBuilder` to
assemble a graph edge by edge.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import GraphError

logger = logging.getLogger(__name__)

PairLike = Union[Tuple[int, int], Tuple[int, int, int], "EdgeInstance"]


class EdgeInstance(NamedTuple):
    """One copy of an edge: ``copy`` ranges over ``0..mult(tail, head)-1``."""

    tail: int
    head: int
    copy: int = 0

    def normalized(self) -> "EdgeInstance":
        """Return the undirected form with ``tail < head``."""
        if self.tail <= self.head:
            return self
        return EdgeInstance(self.head, self.tail, self.copy)


class _BaseGraph:
    """Shared storage and accounting for both graph kinds."""

    directed: bool = True

    def __init__(self, n: int, mult: Optional[Union[np.ndarray, Sequence[Sequence[int]]]] = None):
        """Create an immutable graph.

        Args:
            n: Number of vertices.
            mult: Optional ``n × n`` multiplicity matrix (copied).

        Raises:
            GraphError: On negative ``n``, wrong shape, negative entries,
                loops, or an asymmetric matrix for an undirected graph.
        """
        if n < 0:
            raise GraphError(f"Vertex count must be non-negative, got {n}")
        if mult is None:
            matrix = np.zeros((n, n), dtype=np.int64)
        else:
            matrix = np.array(mult, dtype=np.int64)
            if n == 0 and matrix.size == 0:
                matrix = np.zeros((0, 0), dtype=np.int64)
        if matrix.shape != (n, n):
            raise GraphError(f"Multiplicity matrix must be {n}x{n}, got {matrix.shape}")
        if n and matrix.min() < 0:
            raise GraphError("Multiplicities must be non-negative")
        if n and np.any(np.diagonal(matrix)):
            loop = int(np.flatnonzero(np.diagonal(matrix))[0])
            raise GraphError("Loops are not allowed", context=f"vertex {loop}")
        if not self.directed and not np.array_equal(matrix, matrix.T):
            raise GraphError("Undirected multiplicity matrix must be symmetric")
        matrix.setflags(write=False)
        self._n = n
        self._mult = matrix

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[PairLike]):
        """Build a graph from ``(u, v)`` or ``(u, v, m)`` tuples.

        Repeated pairs accumulate.

        Args:
            n: Number of vertices.
            edges: Edge tuples or :class:`EdgeInstance` values.

        Returns:
            The frozen graph.
        """
        builder = GraphBuilder(n, directed=cls.directed)
        for edge in edges:
            if isinstance(edge, EdgeInstance):
                builder.add_edge(edge.tail, edge.head)
            elif len(edge) == 3:
                builder.add_edge(edge[0], edge[1], edge[2])  # type: ignore[misc]
            else:
                builder.add_edge(edge[0], edge[1])
        return builder.build()

    @property
    def n(self) -> int:
        """Number of vertices."""
        return self._n

    @property
    def mult(self) -> np.ndarray:
        """Read-only multiplicity matrix."""
        return self._mult

    def matrix(self) -> np.ndarray:
        """Return a writable copy of the multiplicity matrix."""
        return np.array(self._mult, copy=True)

    @property
    def multiplicity(self) -> int:
        """Maximum multiplicity over all pairs (0 for the empty graph)."""
        return int(self._mult.max()) if self._n else 0

    @property
    def edge_count(self) -> int:
        """Number of edges counted with multiplicity."""
        total = int(self._mult.sum())
        return total if self.directed else total // 2

    def m(self, u: int, v: int) -> int:
        """Multiplicity of the pair ``(u, v)``."""
        return int(self._mult[u, v])

    def has_edge(self, u: int, v: int) -> bool:
        """Check whether at least one copy of ``(u, v)`` is present."""
        return bool(self._mult[u, v] > 0)

    def distinct_pair_count(self) -> int:
        """Number of pairs with non-zero multiplicity."""
        count = int(np.count_nonzero(self._mult))
        return count if self.directed else count // 2

    def pairs(self) -> Iterator[Tuple[int, int, int]]:
        """Iterate ``(u, v, m)`` over present pairs (``u < v`` if undirected)."""
        rows, cols = np.nonzero(self._mult)
        for u, v in zip(rows.tolist(), cols.tolist()):
            if self.directed or u < v:
                yield u, v, int(self._mult[u, v])

    def edge_instances(self) -> Iterator[EdgeInstance]:
        """Iterate every edge copy once."""
        for u, v, m in self.pairs():
            for copy in range(m):
                yield EdgeInstance(u, v, copy)

    def to_builder(self) -> "GraphBuilder":
        """Return a builder pre-loaded with this graph's edges."""
        builder = GraphBuilder(self._n, directed=self.directed)
        builder._mult = self.matrix()
        return builder

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self._n:
            raise GraphError(f"Vertex {v} out of range for n={self._n}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, _BaseGraph) or other.directed != self.directed:
            return NotImplemented
        return self._n == other._n and bool(np.array_equal(self._mult, other._mult))

    def __hash__(self) -> int:
        return hash((self.directed, self._n, self._mult.tobytes()))

    def __repr__(self) -> str:
        kind = "MultiDigraph" if self.directed else "Multigraph"
        return f"{kind}(n={self._n}, edges={self.edge_count}, multiplicity={self.multiplicity})"


class MultiDigraph(_BaseGraph):
    """Directed multigraph without loops."""

    directed = True

    def out_degrees(self) -> np.ndarray:
        """Out-degree of every vertex, with multiplicity."""
        return self._mult.sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        """In-degree of every vertex, with multiplicity."""
        return self._mult.sum(axis=0)

    def out_neighbours(self, u: int) -> List[int]:
        """Heads of edges leaving ``u``."""
        self._check_vertex(u)
        return np.flatnonzero(self._mult[u]).tolist()

    def in_neighbours(self, v: int) -> List[int]:
        """Tails of edges entering ``v``."""
        self._check_vertex(v)
        return np.flatnonzero(self._mult[:, v]).tolist()


class Multigraph(_BaseGraph):
    """Undirected multigraph without loops; ``mult(u, v) == mult(v, u)``."""

    directed = False

    def degrees(self) -> np.ndarray:
        """Degree of every vertex, with multiplicity."""
        return self._mult.sum(axis=1)

    def neighbours(self, u: int) -> List[int]:
        """Vertices adjacent to ``u``."""
        self._check_vertex(u)
        return np.flatnonzero(self._mult[u]).tolist()


AnyGraph = Union[MultiDigraph, Multigraph]


class GraphBuilder:
    """Single-owner mutable builder producing immutable graph values."""

    def __init__(self, n: int, directed: bool = True):
        """Start an empty graph.

        Args:
            n: Number of vertices.
            directed: Build a :class:`MultiDigraph` when True, else a
                :class:`Multigraph`.
        """
        if n < 0:
            raise GraphError(f"Vertex count must be non-negative, got {n}")
        self.n = n
        self.directed = directed
        self._mult = np.zeros((n, n), dtype=np.int64)

    def _check(self, u: int, v: int) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise GraphError(f"Edge ({u}, {v}) out of range for n={self.n}")
        if u == v:
            raise GraphError("Loops are not allowed", context=f"vertex {u}")

    def add_edge(self, u: int, v: int, m: int = 1) -> "GraphBuilder":
        """Add ``m`` copies of ``(u, v)``."""
        self._check(u, v)
        if m < 0:
            raise GraphError(f"Multiplicity must be non-negative, got {m}")
        self._mult[u, v] += m
        if not self.directed:
            self._mult[v, u] += m
        return self

    def remove_edge(self, u: int, v: int, m: int = 1) -> "GraphBuilder":
        """Remove ``m`` copies of ``(u, v)``.

        Raises:
            GraphError: If fewer than ``m`` copies are present.
        """
        self._check(u, v)
        if self._mult[u, v] < m:
            raise GraphError(
                f"Cannot remove {m} copies of ({u}, {v})",
                context=f"only {int(self._mult[u, v])} present",
            )
        self._mult[u, v] -= m
        if not self.directed:
            self._mult[v, u] -= m
        return self

    def count(self, u: int, v: int) -> int:
        """Current multiplicity of ``(u, v)``."""
        return int(self._mult[u, v])

    def build(self) -> AnyGraph:
        """Freeze the current state into a graph value."""
        if self.directed:
            return MultiDigraph(self.n, self._mult)
        return Multigraph(self.n, self._mult)


@dataclass(frozen=True)
class DegreeProfile:
    """Per-vertex degrees with multiplicity.

    For digraphs ``out_degree``/``in_degree`` are set; for graphs ``degree``.
    """

    directed: bool
    out_degree: Tuple[int, ...] = ()
    in_degree: Tuple[int, ...] = ()
    degree: Tuple[int, ...] = ()


def underlying_simple(graph: AnyGraph) -> AnyGraph:
    """Collapse every repeated edge to a single copy.

    Args:
        graph: Any graph.

    Returns:
        Graph of the same kind with ``mult' = min(1, mult)``.
    """
    simple = np.minimum(graph.mult, 1)
    return type(graph)(graph.n, simple)


def is_regular(graph: AnyGraph) -> Optional[int]:
    """Return ``s`` if every vertex has degree ``s`` (in and out), else None.

    Args:
        graph: Graph with at least one vertex.

    Raises:
        GraphError: For the vertexless graph.
    """
    if graph.n < 1:
        raise GraphError("Regularity is undefined for a graph without vertices")
    if isinstance(graph, MultiDigraph):
        degrees = np.concatenate([graph.out_degrees(), graph.in_degrees()])
    else:
        degrees = graph.degrees()
    s = int(degrees[0])
    return s if bool(np.all(degrees == s)) else None


def degree_profile(graph: AnyGraph) -> DegreeProfile:
    """Exact per-vertex degree counts with multiplicity."""
    if isinstance(graph, MultiDigraph):
        return DegreeProfile(
            directed=True,
            out_degree=tuple(int(d) for d in graph.out_degrees()),
            in_degree=tuple(int(d) for d in graph.in_degrees()),
        )
    return DegreeProfile(directed=False, degree=tuple(int(d) for d in graph.degrees()))


def _same_shape(graphs: Sequence[AnyGraph]) -> None:
    first = graphs[0]
    for other in graphs[1:]:
        if other.n != first.n or other.directed != first.directed:
            raise GraphError(
                "Graphs must share vertex count and kind",
                context=f"{first!r} vs {other!r}",
            )


def disjoint_union(*graphs: AnyGraph) -> AnyGraph:
    """Edge-disjoint union on a shared vertex set: multiplicities add.

    Raises:
        GraphError: With no graphs or mismatched vertex counts/kinds.
    """
    if not graphs:
        raise GraphError("disjoint_union needs at least one graph")
    _same_shape(graphs)
    total = np.zeros_like(graphs[0].mult)
    for graph in graphs:
        total = total + graph.mult
    return type(graphs[0])(graphs[0].n, total)


def subtract_edges(graph: AnyGraph, edges: Union[AnyGraph, Iterable[PairLike]]) -> AnyGraph:
    """Remove an edge multiset from a graph.

    Args:
        graph: The host graph.
        edges: A graph of the same kind, or ``(u, v)`` / ``(u, v, m)`` /
            :class:`EdgeInstance` items (each removes one copy, or ``m``).

    Returns:
        New graph with pointwise-subtracted multiplicities.

    Raises:
        GraphError: If some pair would go below zero.
    """
    if isinstance(edges, _BaseGraph):
        _same_shape([graph, edges])
        removal = edges.mult
    else:
        removal_graph = type(graph).from_edges(graph.n, edges)
        removal = removal_graph.mult
    result = graph.mult - removal
    if graph.n and result.min() < 0:
        u, v = (int(x) for x in np.argwhere(result < 0)[0])
        raise GraphError(
            f"Cannot subtract absent copies of ({u}, {v})",
            context=f"present {graph.m(u, v)}, requested {int(removal[u, v])}",
        )
    return type(graph)(graph.n, result)


def forget_orientation(digraph: MultiDigraph) -> Multigraph:
    """Drop orientations: ``mult{u, v} = mult(u, v) + mult(v, u)``."""
    return Multigraph(digraph.n, digraph.mult + digraph.mult.T)


def complete_digraph(n: int, lam: int = 1) -> MultiDigraph:
    """Every ordered pair of distinct vertices ``lam`` times."""
    matrix = np.full((n, n), lam, dtype=np.int64)
    np.fill_diagonal(matrix, 0)
    return MultiDigraph(n, matrix)


def complete_graph(n: int, lam: int = 1) -> Multigraph:
    """The complete multigraph ``λK_n``."""
    matrix = np.full((n, n), lam, dtype=np.int64)
    np.fill_diagonal(matrix, 0)
    return Multigraph(n, matrix)


def directed_cycle(n: int) -> MultiDigraph:
    """The directed cycle ``0 → 1 → … → n−1 → 0``."""
    return MultiDigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def cycle_graph(n: int) -> Multigraph:
    """The undirected cycle on ``n ≥ 2`` vertices (a double edge when n=2)."""
    return Multigraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
