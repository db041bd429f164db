"""Tests for the decomposition pipeline and its entry points."""

import math
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from hamdecomp.config import PipelineConfig
from hamdecomp.errors import DegreeError, GraphError, InfeasibleError, StageFailure
from hamdecomp.generators import GeneratorSpec, generate
from hamdecomp.graph import (
    MultiDigraph,
    Multigraph,
    complete_digraph,
    complete_graph,
    cycle_graph,
    directed_cycle,
    disjoint_union,
    is_regular,
)
from hamdecomp.pipeline import (
    STAGES,
    decompose_min_degree_digraph,
    decompose_min_degree_graph,
    decompose_multidigraph,
    decompose_multigraph,
    min_degree_threshold,
    one_factorise,
    orient_even_regular,
    random_split,
    split_balance_check,
)
from hamdecomp.verify import verify_decomposition, verify_one_factorisation


def _cycle_and_reverse(n: int) -> MultiDigraph:
    forward = directed_cycle(n)
    return disjoint_union(forward, MultiDigraph(n, forward.mult.T))


class TestRandomSplit:
    """Test random_split and split_balance_check."""

    def test_r1_identity(self):
        """Test a single part is the input itself."""
        graph = complete_digraph(5)
        assert random_split(graph, 1, 3) == [graph]

    def test_double_edge_in_both_parts(self):
        """Test an edge of multiplicity 2 lands in both of 2 parts."""
        graph = MultiDigraph.from_edges(2, [(0, 1, 2)])
        parts = random_split(graph, 2, 0)
        assert all(part.m(0, 1) == 1 for part in parts)

    @pytest.mark.parametrize("seed", range(20))
    def test_union_identity(self, seed):
        """Test the parts add back up to the input exactly."""
        graph = generate(GeneratorSpec("union-of-permutations", 10, s=6, r=3, seed=seed))
        parts = random_split(graph, 3, seed)
        assert all(part.multiplicity <= 1 for part in parts)
        assert disjoint_union(*parts) == graph

    def test_deterministic(self):
        """Test the same seed gives the same split."""
        graph = complete_digraph(6, 2)
        assert random_split(graph, 3, 9) == random_split(graph, 3, 9)

    def test_multiplicity_above_r(self):
        """Test multiplicity above r is refused."""
        with pytest.raises(GraphError, match="exceeds"):
            random_split(complete_digraph(4, 3), 2, 0)

    def test_mean_degree_concentrates(self):
        """Test the mean part out-degree over 200 seeds is close to s/r."""
        graph = generate(
            GeneratorSpec("random-regular-multidigraph", 20, s=12, r=2, seed=1)
        )
        samples = np.array(
            [[part.out_degrees() for part in random_split(graph, 2, seed)] for seed in range(200)]
        )
        mean = samples.mean(axis=0)
        spread = samples.var(axis=0, ddof=1)
        assert np.all(np.abs(mean - 6) <= 4 * np.sqrt(spread / 200) + 1e-9)

    def test_balance_r1_always_passes(self):
        """Test a single part of a regular graph is balanced."""
        graph = complete_digraph(5)
        assert split_balance_check(random_split(graph, 1, 0), 4, 1, 0.1)

    def test_balance_both_outcomes(self):
        """Test both balanced and unbalanced splits of a doubled cycle occur."""
        graph = _cycle_and_reverse(4)
        outcomes = {
            split_balance_check(random_split(graph, 2, seed), 2, 2, 0.5) for seed in range(1000)
        }
        assert outcomes == {True, False}

    def test_balance_means_one_regular(self):
        """Test a balanced split of a 2-regular digraph has 1-regular parts."""
        graph = _cycle_and_reverse(4)
        for seed in range(200):
            parts = random_split(graph, 2, seed)
            if split_balance_check(parts, 2, 2, 0.5):
                assert all(is_regular(part) == 1 for part in parts)


class TestDecomposeMultidigraph:
    """Test the directed pipeline."""

    def test_directed_cycle_stages_vacuous(self):
        """Test a directed cycle passes with the gate off and no fallback."""
        config = PipelineConfig(expander_gate="off", fallback="none")
        result = decompose_multidigraph(directed_cycle(6), config)
        assert result.success
        assert [c.vertices for c in result.decomposition.cycles] == [tuple(range(6))]
        outcomes = {s.stage: s.outcome for s in result.report.stages}
        assert outcomes["expander-gate"] == "skipped"
        for stage in ("almost-decompose", "matchings", "absorption", "completion"):
            assert outcomes[stage] == "vacuous"
        assert not result.report.fallback_used

    def test_directed_cycle_with_gate(self, fast_config: PipelineConfig):
        """Test a directed cycle fails the gate and is rescued by the fallback."""
        result = decompose_multidigraph(directed_cycle(6), fast_config)
        assert result.success
        assert result.report.fallback_used
        assert verify_decomposition(directed_cycle(6), result.decomposition)

    def test_gate_failure_without_fallback(self):
        """Test a failed run without fallback reports failure and no cycles."""
        config = PipelineConfig(fallback="none", expander_samples=100)
        result = decompose_multidigraph(directed_cycle(6), config)
        assert not result.success
        assert result.decomposition is None
        assert result.report.status == "failed"
        failed = [s.stage for s in result.report.stages if s.outcome == "failed"]
        assert "expander-gate" in failed

    def test_k5(self, k5_digraph: MultiDigraph, fast_config: PipelineConfig):
        """Test K*5 gives 4 verified cycles without the fallback."""
        result = decompose_multidigraph(k5_digraph, fast_config)
        assert result.success
        assert len(result.decomposition) == 4
        assert verify_decomposition(k5_digraph, result.decomposition)
        assert not result.report.fallback_used
        assert result.report.cycle_count == 4

    def test_doubled_k5(self, doubled_k5_digraph: MultiDigraph, fast_config: PipelineConfig):
        """Test the doubled complete digraph on 5 vertices gives 8 cycles over 40 instances."""
        config = fast_config.with_overrides(r=2, seed=3)
        result = decompose_multidigraph(doubled_k5_digraph, config)
        assert result.success
        assert len(result.decomposition) == 8
        assert verify_decomposition(doubled_k5_digraph, result.decomposition)
        assert sum(len(c) for c in result.decomposition.cycles) == 40

    def test_doubled_k4_runs_every_stage(self):
        """Test the doubled complete digraph on 4 vertices is absorbed without the fallback."""
        graph = complete_digraph(4, 2)
        config = PipelineConfig(r=2, fallback="none", max_retries=0)
        result = decompose_multidigraph(graph, config)
        assert result.success
        assert not result.report.fallback_used
        assert result.report.retry_count == 0
        assert len(result.decomposition) == 6
        assert verify_decomposition(graph, result.decomposition)
        records = {s.stage: s for s in result.report.stages}
        for stage in STAGES:
            assert records[stage].outcome == "ok"
        assert records["almost-decompose"].stats["cycles"] == 2
        assert records["matchings"].stats["count"] == 2
        assert records["completion"].stats["cycles"] == 2
        assert records["final-regular"].stats["cycles"] == 2

    def test_k4_nonexistent(self, fast_config: PipelineConfig):
        """Test K*4 is reported as having no decomposition."""
        result = decompose_multidigraph(complete_digraph(4), fast_config)
        assert result.decomposition is None
        assert result.report.status == "nonexistent"
        assert result.report.fallback_used

    def test_indeterminate(self):
        """Test an exhausted budget is indeterminate, not nonexistent."""
        config = PipelineConfig(hamilton_budget=3, expander_gate="off")
        result = decompose_multidigraph(complete_digraph(5), config)
        assert result.report.status == "indeterminate"
        assert result.decomposition is None

    def test_replay_determinism(self, doubled_k5_digraph, fast_config: PipelineConfig):
        """Test the same input and seed reproduce output and report."""
        config = fast_config.with_overrides(r=2, seed=5)
        first = decompose_multidigraph(doubled_k5_digraph, config)
        second = decompose_multidigraph(doubled_k5_digraph, config)
        assert first.decomposition == second.decomposition
        assert first.report.to_dict() == second.report.to_dict()

    def test_report_contents(self, k5_digraph, fast_config: PipelineConfig):
        """Test the report records input, seeds and every stage."""
        data = decompose_multidigraph(k5_digraph, fast_config).report.to_dict()
        assert data["entry_point"] == "multidigraph"
        assert data["input"] == {
            "directed": True, "n": 5, "s": 4, "multiplicity": 1, "edges": 20
        }
        assert data["seeds"] == [fast_config.seed]
        assert data["config"]["r"] == 1
        assert [s["stage"] for s in data["stages"]] == list(STAGES)

    def test_dump_stages(self, k5_digraph, fast_config, temp_dir: Path):
        """Test intermediate graphs are written when requested."""
        decompose_multidigraph(k5_digraph, fast_config, dump_dir=temp_dir)
        assert (temp_dir / "attempt0-part1.txt").exists()
        assert (temp_dir / "attempt0-remainder.txt").exists()

    def test_not_regular(self):
        """Test non-regular input is refused."""
        with pytest.raises(DegreeError):
            decompose_multidigraph(MultiDigraph.from_edges(3, [(0, 1), (1, 2)]))

    def test_multiplicity_above_r(self):
        """Test multiplicity above r is refused."""
        with pytest.raises(GraphError):
            decompose_multidigraph(complete_digraph(5, 2))


class TestDecomposeMultigraph:
    """Test the undirected reduction."""

    def test_cycle(self, fast_config: PipelineConfig):
        """Test an undirected cycle decomposes into itself."""
        result = decompose_multigraph(cycle_graph(5), fast_config)
        assert result.success
        assert len(result.decomposition) == 1
        assert not result.decomposition.directed

    def test_k5(self, k5_graph: Multigraph, fast_config: PipelineConfig):
        """Test K5 gives 2 undirected Hamilton cycles."""
        result = decompose_multigraph(k5_graph, fast_config)
        assert result.success
        assert len(result.decomposition) == 2
        assert verify_decomposition(k5_graph, result.decomposition)

    def test_doubled_k5(self, doubled_k5_graph: Multigraph, fast_config: PipelineConfig):
        """Test 2K5 gives 4 cycles over 20 edge instances."""
        result = decompose_multigraph(doubled_k5_graph, fast_config.with_overrides(r=2))
        assert result.success
        assert len(result.decomposition) == 4
        assert sum(len(c) for c in result.decomposition.cycles) == 20
        assert verify_decomposition(doubled_k5_graph, result.decomposition)

    def test_orientation_recorded(self, k5_graph, fast_config: PipelineConfig):
        """Test each orientation attempt is recorded with its statistics."""
        report = decompose_multigraph(k5_graph, fast_config).report
        orientation = [s for s in report.stages if s.stage == "orientation"]
        assert orientation
        assert "factor_size" in orientation[0].stats
        assert "certified" in orientation[0].stats

    def test_odd_degree_rejected(self):
        """Test odd degree is refused."""
        with pytest.raises(DegreeError):
            decompose_multigraph(complete_graph(4))

    @pytest.mark.parametrize("seed", range(4))
    def test_orientation_is_half_regular(self, seed):
        """Test the orientation of an s-regular multigraph is s/2-regular."""
        graph = generate(GeneratorSpec("random-regular-multigraph", 10, s=6, r=2, seed=seed))
        orientation, stats = orient_even_regular(graph, 1, seed)
        assert is_regular(orientation) == 3
        assert Multigraph(10, orientation.mult + orientation.mult.T) == graph
        assert stats["factor_size"] in (0, 1)

    def test_orientation_without_factor(self):
        """Test a missing factor is replaced by the empty one."""
        orientation, stats = orient_even_regular(cycle_graph(4), 5, 0)
        assert stats["factor_size"] == 0
        assert is_regular(orientation) == 1


class TestMinDegreeEntryPoints:
    """Test the minimum degree entry points."""

    def test_threshold(self):
        """Test the degree bound rn/2 + eps n."""
        assert min_degree_threshold(10, 2, 0.1) == pytest.approx(11)

    def test_digraph_k5(self, k5_digraph, fast_config):
        """Test K*5 meets the bound with eps=0.2."""
        result = decompose_min_degree_digraph(k5_digraph, 0.2, fast_config)
        assert len(result.decomposition) == 4
        assert result.report.entry_point == "min-degree-digraph"
        assert result.report.notes["simple_min_degree"] == 4

    def test_digraph_doubled(self, doubled_k5_digraph, fast_config):
        """Test the doubled complete digraph with r=2."""
        result = decompose_min_degree_digraph(
            doubled_k5_digraph, 0.2, fast_config.with_overrides(r=2)
        )
        assert len(result.decomposition) == 8

    def test_digraph_cycle_rejected(self):
        """Test a directed 10-cycle fails the bound."""
        with pytest.raises(DegreeError) as exc_info:
            decompose_min_degree_digraph(directed_cycle(10), 0.1)
        assert exc_info.value.vertex == 0

    def test_graph_k5(self, k5_graph, fast_config):
        """Test K5 with eps=0.2 gives 2 cycles."""
        result = decompose_min_degree_graph(k5_graph, 0.2, fast_config)
        assert len(result.decomposition) == 2
        assert result.report.entry_point == "min-degree-graph"

    def test_graph_doubled(self, doubled_k5_graph, fast_config):
        """Test 2K5 with r=2 gives 4 cycles."""
        result = decompose_min_degree_graph(
            doubled_k5_graph, 0.2, fast_config.with_overrides(r=2)
        )
        assert len(result.decomposition) == 4

    def test_graph_odd_rejected(self):
        """Test odd degree is refused."""
        with pytest.raises(DegreeError):
            decompose_min_degree_graph(complete_graph(6), 0.1)


class TestOneFactorise:
    """Test one_factorise."""

    def test_k4(self, fast_config):
        """Test K4 splits into 3 perfect matchings."""
        classes = one_factorise(complete_graph(4), config=fast_config)
        assert len(classes) == 3
        assert verify_one_factorisation(complete_graph(4), classes)

    def test_k6(self, fast_config):
        """Test K6 splits into 5 perfect matchings."""
        classes = one_factorise(complete_graph(6), config=fast_config)
        assert len(classes) == 5
        assert all(len(c) == 3 for c in classes)
        assert verify_one_factorisation(complete_graph(6), classes)

    def test_six_cycle(self, fast_config):
        """Test a 6-cycle splits into its two alternating matchings."""
        classes = one_factorise(cycle_graph(6), config=fast_config)
        assert sorted(classes) == [[(0, 1), (2, 3), (4, 5)], [(0, 5), (1, 2), (3, 4)]]

    def test_odd_vertex_count(self):
        """Test an odd vertex count is refused."""
        with pytest.raises(GraphError):
            one_factorise(complete_graph(5))

    def test_degree_bound_enforced(self):
        """Test eps enforces the minimum degree bound."""
        with pytest.raises(DegreeError):
            one_factorise(cycle_graph(6), eps=0.1)

    def test_missing_perfect_matching(self, fast_config):
        """Test a failed matching step is a stage failure."""
        error = InfeasibleError("No perfect matching exists", witness={"unmatched": [0, 1]})
        with patch("hamdecomp.pipeline.perfect_matching", side_effect=error):
            with pytest.raises(StageFailure) as exc_info:
                one_factorise(complete_graph(4), config=fast_config)
        assert exc_info.value.stage == "perfect-matching"
        assert exc_info.value.detail["unmatched"] == [0, 1]

    def test_class_count_equals_degree(self, fast_config):
        """Test the class count equals the degree of a random regular graph."""
        graph = generate(GeneratorSpec("random-regular-multigraph", 8, s=5, r=1, seed=2))
        classes = one_factorise(graph, config=fast_config)
        assert len(classes) == 5
        assert verify_one_factorisation(graph, classes)
        assert math.isclose(sum(len(c) for c in classes), graph.edge_count)
