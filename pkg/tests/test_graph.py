"""Tests for the multigraph and multidigraph value types."""

import random

import numpy as np
import pytest

from hamdecomp.errors import GraphError
from hamdecomp.graph import (
    EdgeInstance,
    GraphBuilder,
    MultiDigraph,
    Multigraph,
    complete_digraph,
    complete_graph,
    cycle_graph,
    degree_profile,
    directed_cycle,
    disjoint_union,
    forget_orientation,
    is_regular,
    subtract_edges,
    underlying_simple,
)


def _random_pair(n: int, seed: int):
    rng = np.random.default_rng(seed)
    first = rng.integers(0, 3, size=(n, n))
    second = rng.integers(0, 3, size=(n, n))
    np.fill_diagonal(first, 0)
    np.fill_diagonal(second, 0)
    return first, second


def _permutation_digraph(n: int, rng: random.Random) -> MultiDigraph:
    while True:
        perm = list(range(n))
        rng.shuffle(perm)
        if all(perm[i] != i for i in range(n)):
            return MultiDigraph.from_edges(n, [(i, perm[i]) for i in range(n)])


class TestConstruction:
    """Test graph construction and validation."""

    def test_empty_graph(self):
        """Test a graph without vertices."""
        graph = MultiDigraph(0)
        assert graph.n == 0
        assert graph.edge_count == 0
        assert graph.multiplicity == 0

    def test_from_edges_accumulates(self):
        """Test repeated pairs add up."""
        graph = MultiDigraph.from_edges(3, [(0, 1), (0, 1), (1, 2, 3)])
        assert graph.m(0, 1) == 2
        assert graph.m(1, 2) == 3
        assert graph.m(1, 0) == 0
        assert graph.edge_count == 5

    def test_from_edge_instances(self):
        """Test building from EdgeInstance values."""
        graph = MultiDigraph.from_edges(2, [EdgeInstance(0, 1, 0), EdgeInstance(0, 1, 1)])
        assert graph.m(0, 1) == 2

    def test_undirected_symmetry(self):
        """Test undirected edges are stored in both directions."""
        graph = Multigraph.from_edges(2, [(0, 1, 2)])
        assert graph.m(0, 1) == graph.m(1, 0) == 2
        assert graph.edge_count == 2
        assert list(graph.degrees()) == [2, 2]

    def test_loop_rejected(self):
        """Test loops are refused."""
        with pytest.raises(GraphError, match="Loops"):
            MultiDigraph.from_edges(2, [(1, 1)])

    def test_loop_in_matrix_rejected(self):
        """Test loops on the diagonal of a matrix are refused."""
        with pytest.raises(GraphError):
            MultiDigraph(2, [[1, 0], [0, 0]])

    def test_out_of_range(self):
        """Test edges outside 0..n-1 are refused."""
        with pytest.raises(GraphError, match="out of range"):
            GraphBuilder(3).add_edge(0, 3)

    def test_negative_multiplicity(self):
        """Test negative matrix entries are refused."""
        with pytest.raises(GraphError):
            MultiDigraph(2, [[0, -1], [0, 0]])

    def test_asymmetric_undirected_matrix(self):
        """Test an undirected graph needs a symmetric matrix."""
        with pytest.raises(GraphError, match="symmetric"):
            Multigraph(2, [[0, 1], [0, 0]])

    def test_wrong_shape(self):
        """Test the matrix shape must match n."""
        with pytest.raises(GraphError, match="3x3"):
            MultiDigraph(3, np.zeros((2, 2)))

    def test_immutable(self):
        """Test the multiplicity matrix is read-only."""
        graph = directed_cycle(3)
        with pytest.raises(ValueError):
            graph.mult[0, 1] = 5

    def test_equality_and_hash(self):
        """Test value semantics."""
        a = complete_digraph(4)
        b = MultiDigraph(4, a.matrix())
        assert a == b
        assert hash(a) == hash(b)
        assert a != directed_cycle(4)


class TestBuilder:
    """Test GraphBuilder."""

    def test_add_and_remove(self):
        """Test the builder tracks counts."""
        builder = GraphBuilder(3)
        builder.add_edge(0, 1, 2).remove_edge(0, 1)
        assert builder.count(0, 1) == 1
        assert builder.build().edge_count == 1

    def test_remove_too_many(self):
        """Test removing absent copies fails."""
        with pytest.raises(GraphError, match="Cannot remove"):
            GraphBuilder(3).add_edge(0, 1).remove_edge(0, 1, 2)

    def test_to_builder_round_trip(self):
        """Test a graph can be extended through its builder."""
        graph = directed_cycle(3)
        extended = graph.to_builder().add_edge(1, 0).build()
        assert extended.m(1, 0) == 1
        assert graph.m(1, 0) == 0


class TestUnderlyingSimple:
    """Test underlying_simple."""

    def test_empty(self):
        """Test the empty graph is its own underlying graph."""
        assert underlying_simple(MultiDigraph(0)) == MultiDigraph(0)

    def test_collapse(self):
        """Test a triple edge collapses to one copy."""
        graph = MultiDigraph.from_edges(2, [(0, 1, 3)])
        assert underlying_simple(graph).m(0, 1) == 1

    def test_union_of_permutations(self):
        """Test shared edges of two permutation digraphs are counted once."""
        rng = random.Random(3)
        first, second = _permutation_digraph(8, rng), _permutation_digraph(8, rng)
        shared = sum(1 for u, v, _ in first.pairs() if second.has_edge(u, v))
        union = disjoint_union(first, second)
        assert underlying_simple(union).edge_count == 16 - shared

    @pytest.mark.parametrize("seed", range(10))
    def test_idempotent(self, seed):
        """Test collapsing twice equals collapsing once."""
        first, second = _random_pair(7, seed)
        for graph in (MultiDigraph(7, first), Multigraph(7, np.triu(second) + np.triu(second).T)):
            once = underlying_simple(graph)
            assert underlying_simple(once) == once
            assert once.multiplicity <= 1


class TestRegularity:
    """Test is_regular and degree_profile."""

    def test_directed_cycle(self):
        """Test a directed cycle is 1-regular."""
        assert is_regular(directed_cycle(7)) == 1

    def test_complete_digraph(self):
        """Test the complete digraph is (n-1)-regular."""
        assert is_regular(complete_digraph(6)) == 5

    def test_imbalance(self):
        """Test a directed triangle plus one edge is not regular."""
        graph = directed_cycle(3).to_builder().add_edge(1, 0).build()
        assert is_regular(graph) is None

    def test_vertexless(self):
        """Test regularity is undefined without vertices."""
        with pytest.raises(GraphError):
            is_regular(MultiDigraph(0))

    def test_double_edge_profile(self):
        """Test degrees count multiplicity."""
        profile = degree_profile(Multigraph.from_edges(2, [(0, 1, 2)]))
        assert profile.degree == (2, 2)
        assert profile.directed is False

    def test_complete_multigraph_profile(self):
        """Test 2K5 has all degrees 8."""
        assert degree_profile(complete_graph(5, 2)).degree == (8,) * 5

    def test_directed_profile_recount(self):
        """Test the profile matches a recount over edge instances."""
        graph = MultiDigraph.from_edges(4, [(0, 1, 2), (1, 2), (2, 0), (3, 0, 3)])
        out_count = [0] * 4
        in_count = [0] * 4
        for edge in graph.edge_instances():
            out_count[edge.tail] += 1
            in_count[edge.head] += 1
        profile = degree_profile(graph)
        assert profile.out_degree == tuple(out_count)
        assert profile.in_degree == tuple(in_count)


class TestUnionAndSubtraction:
    """Test disjoint_union and subtract_edges."""

    def test_union_with_empty(self):
        """Test D plus the empty graph is D."""
        graph = complete_digraph(4)
        assert disjoint_union(graph, MultiDigraph(4)) == graph

    def test_subtract_one_copy(self):
        """Test removing one of two copies leaves one."""
        graph = MultiDigraph.from_edges(2, [(0, 1, 2)])
        assert subtract_edges(graph, [(0, 1)]).m(0, 1) == 1

    def test_subtract_graph(self):
        """Test subtracting a subgraph."""
        graph = complete_digraph(3)
        assert subtract_edges(graph, directed_cycle(3)).edge_count == 3

    def test_subtract_underflow(self):
        """Test removing absent copies fails."""
        with pytest.raises(GraphError, match="absent"):
            subtract_edges(directed_cycle(3), [(1, 0)])

    def test_mismatched_union(self):
        """Test graphs of different size cannot be combined."""
        with pytest.raises(GraphError):
            disjoint_union(directed_cycle(3), directed_cycle(4))

    def test_union_needs_graphs(self):
        """Test the union of nothing is an error."""
        with pytest.raises(GraphError):
            disjoint_union()

    def test_forget_orientation(self):
        """Test antiparallel edges become a double edge."""
        graph = forget_orientation(complete_digraph(3))
        assert graph == complete_graph(3, 2)

    @pytest.mark.parametrize("seed", range(10))
    def test_subtract_undoes_union(self, seed):
        """Test removing B from the union of A and B gives back A."""
        first, second = _random_pair(6, seed)
        a, b = MultiDigraph(6, first), MultiDigraph(6, second)
        assert subtract_edges(disjoint_union(a, b), b) == a
        a, b = Multigraph(6, first + first.T), Multigraph(6, second + second.T)
        assert subtract_edges(disjoint_union(a, b), b) == a

    def test_pairs_undirected_once(self):
        """Test undirected pairs are listed with u < v."""
        assert list(cycle_graph(3).pairs()) == [(0, 1, 1), (0, 2, 1), (1, 2, 1)]


class TestHandshake:
    """Test degree sums against edge counts."""

    @pytest.mark.parametrize("seed", range(10))
    def test_directed(self, seed):
        """Test out- and in-degrees both sum to the edge count."""
        graph = MultiDigraph(8, _random_pair(8, seed)[0])
        assert int(graph.out_degrees().sum()) == graph.edge_count
        assert int(graph.in_degrees().sum()) == graph.edge_count

    @pytest.mark.parametrize("seed", range(10))
    def test_undirected(self, seed):
        """Test degrees sum to twice the edge count."""
        mult = _random_pair(8, seed)[0]
        graph = Multigraph(8, mult + mult.T)
        assert int(graph.degrees().sum()) == 2 * graph.edge_count
