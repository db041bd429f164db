"""Tests for edge-list parsing and JSON artifacts."""

import io
import json
from pathlib import Path

import numpy as np
import pytest

from hamdecomp.errors import GraphError, GraphParseError
from hamdecomp.graph import MultiDigraph, Multigraph, complete_digraph, complete_graph
from hamdecomp.graph_io import (
    decomposition_from_dict,
    format_graph,
    parse_graph,
    read_cycles,
    read_decomposition,
    read_graph,
    read_matchings,
    write_decomposition,
    write_graph,
    write_matchings,
)
from hamdecomp.hamilton import HamiltonCycle, HamiltonDecomposition


class TestParseGraph:
    """Test parse_graph."""

    def test_digraph_with_comments(self):
        """Test comments and blank lines are skipped."""
        graph = parse_graph("# header\n\ndigraph 3\n0 1  # first\n1 2 2\n")
        assert isinstance(graph, MultiDigraph)
        assert graph.m(0, 1) == 1
        assert graph.m(1, 2) == 2

    def test_repeated_lines_accumulate(self):
        """Test repeated pairs add up."""
        graph = parse_graph("graph 2\n0 1\n1 0\n")
        assert isinstance(graph, Multigraph)
        assert graph.m(0, 1) == 2

    def test_k5_file(self, k5_file: Path):
        """Test reading the complete digraph fixture."""
        assert read_graph(k5_file) == complete_digraph(5)

    def test_missing_header(self):
        """Test an edge before the header is refused."""
        with pytest.raises(GraphParseError) as exc_info:
            parse_graph("0 1\n")
        assert exc_info.value.line_number == 1

    def test_empty_document(self):
        """Test an empty document has no header."""
        with pytest.raises(GraphParseError, match="Missing"):
            parse_graph("# nothing\n")

    def test_bad_vertex_count(self):
        """Test a non-integer vertex count is reported."""
        with pytest.raises(GraphParseError, match="vertex count"):
            parse_graph("digraph many\n")

    def test_bad_token_line_number(self):
        """Test the offending line is named."""
        with pytest.raises(GraphParseError) as exc_info:
            parse_graph("digraph 3\n0 1\n1 x\n")
        assert exc_info.value.line_number == 3
        assert "line 3" in str(exc_info.value)

    def test_wrong_arity(self):
        """Test lines need two or three tokens."""
        with pytest.raises(GraphParseError, match="u v"):
            parse_graph("digraph 3\n0 1 2 3\n")

    def test_loop(self):
        """Test loops surface as parse errors on their line."""
        with pytest.raises(GraphParseError) as exc_info:
            parse_graph("digraph 3\n\n2 2\n")
        assert exc_info.value.line_number == 3

    def test_invalid_utf8(self, temp_dir: Path):
        """Test undecodable bytes are reported as a parse error."""
        path = temp_dir / "bad.txt"
        path.write_bytes(b"digraph 2\n0 1 \xff\n")
        with pytest.raises(GraphParseError, match="UTF-8"):
            read_graph(path)

    def test_negative_multiplicity(self):
        """Test negative multiplicities are refused."""
        with pytest.raises(GraphParseError, match="Negative"):
            parse_graph("graph 3\n0 1 -1\n")


class TestFormatGraph:
    """Test format_graph and write_graph."""

    def test_format_multiplicity(self):
        """Test pairs with multiplicity above 1 carry a count."""
        text = format_graph(MultiDigraph.from_edges(3, [(0, 1), (2, 1, 3)]))
        assert text == "digraph 3\n0 1\n2 1 3\n"

    def test_undirected_pairs_once(self):
        """Test undirected pairs are written once."""
        assert format_graph(complete_graph(3, 2)) == "graph 3\n0 1 2\n0 2 2\n1 2 2\n"

    def test_write_creates_parents(self, temp_dir: Path):
        """Test writing into a missing directory."""
        target = temp_dir / "deep" / "graph.txt"
        write_graph(complete_graph(4), target)
        assert read_graph(target) == complete_graph(4)

    def test_write_stream(self):
        """Test writing to a stream."""
        buffer = io.StringIO()
        write_graph(complete_digraph(2), buffer)
        assert buffer.getvalue() == "digraph 2\n0 1\n1 0\n"

    @pytest.mark.parametrize("seed", range(50))
    def test_parse_inverts_format(self, seed):
        """Test random directed and undirected multigraphs survive a write and a read."""
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 12))
        mult = rng.integers(0, 4, size=(n, n))
        np.fill_diagonal(mult, 0)
        directed = MultiDigraph(n, mult)
        undirected = Multigraph(n, np.triu(mult) + np.triu(mult).T)
        assert parse_graph(format_graph(directed)) == directed
        assert parse_graph(format_graph(undirected)) == undirected


class TestDecompositionFiles:
    """Test decomposition and matching JSON files."""

    def test_write_and_read_decomposition(self, temp_dir: Path):
        """Test a decomposition survives a file."""
        decomposition = HamiltonDecomposition(
            (HamiltonCycle((0, 1, 2, 3, 4)), HamiltonCycle((0, 2, 4, 1, 3))), directed=False
        )
        path = temp_dir / "out.json"
        write_decomposition(decomposition, path)
        assert json.loads(path.read_text(encoding="utf-8"))["directed"] is False
        assert read_decomposition(path) == decomposition

    def test_from_dict_defaults_directed(self):
        """Test the directed flag defaults to True."""
        assert decomposition_from_dict({"cycles": [[0, 1]]}).directed

    def test_from_dict_needs_cycles(self):
        """Test a document without cycles is refused."""
        with pytest.raises(GraphError, match="cycles"):
            decomposition_from_dict({"paths": []})

    def test_invalid_json(self):
        """Test broken JSON is reported."""
        with pytest.raises(GraphError, match="Invalid"):
            read_decomposition(io.StringIO("{"))

    def test_read_cycles_keeps_invalid_cycles(self):
        """Test raw cycles are returned unvalidated."""
        cycles, directed = read_cycles(io.StringIO('{"cycles": [[0, 0, 1]]}'))
        assert cycles == [[0, 0, 1]]
        assert directed is None

    def test_matchings(self, temp_dir: Path):
        """Test matchings survive a file as tuples."""
        classes = [[(0, 1), (2, 3)], [(0, 2), (1, 3)]]
        path = temp_dir / "matchings.json"
        write_matchings(classes, path)
        assert read_matchings(path) == classes

    def test_matchings_need_list(self):
        """Test a document without matchings is refused."""
        with pytest.raises(GraphError, match="matchings"):
            read_matchings(io.StringIO('{"cycles": []}'))
