"""Tests for the hamdecomp command-line interface."""

import json
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

from hamdecomp import main
from hamdecomp.graph import complete_digraph, complete_graph, directed_cycle
from hamdecomp.graph_io import read_decomposition, read_graph, read_matchings, write_graph


def _run(*args: str) -> None:
    with patch.object(sys, "argv", ["hamdecomp", *args]):
        main()


def _exit_code(*args: str) -> int:
    with pytest.raises(SystemExit) as exc_info:
        _run(*args)
    return exc_info.value.code


@pytest.fixture
def c10_file(temp_dir: Path) -> Path:
    """Edge-list file holding the directed 10-cycle."""
    path = temp_dir / "c10.txt"
    write_graph(directed_cycle(10), path)
    return path


@pytest.fixture
def k4_graph_file(temp_dir: Path) -> Path:
    """Edge-list file holding K4."""
    path = temp_dir / "k4.txt"
    write_graph(complete_graph(4), path)
    return path


class TestGen:
    """Test the gen subcommand."""

    def test_stdout(self, capsys):
        """Test the edge list goes to stdout without -o."""
        _run("gen", "directed-complete", "-n", "3")
        assert capsys.readouterr().out == "digraph 3\n0 1\n0 2\n1 0\n1 2\n2 0\n2 1\n"

    def test_output_file(self, temp_dir: Path):
        """Test writing a random instance to a file."""
        target = temp_dir / "g.txt"
        _run(
            "gen", "union-of-permutations", "-n", "8", "-s", "3", "--r", "2", "--seed", "4",
            "-o", str(target),
        )
        graph = read_graph(target)
        assert graph.n == 8
        assert graph.multiplicity <= 2

    def test_json_stats(self, capsys):
        """Test --json prints statistics."""
        _run("gen", "complete-multi", "-n", "5", "--lam", "2", "--json")
        stats = json.loads(capsys.readouterr().out)
        assert stats["regular"] == 8
        assert stats["multiplicity"] == 2
        assert stats["directed"] is False

    def test_infeasible_parameters(self):
        """Test infeasible parameters exit with 1."""
        assert _exit_code("gen", "random-regular-multigraph", "-n", "5", "-s", "3") == 1


class TestCheckExpander:
    """Test the check-expander subcommand."""

    def test_cycle_refuted(self, c10_file: Path, capsys):
        """Test the directed 10-cycle fails with exit code 1."""
        code = _exit_code("check-expander", str(c10_file), "--nu", "0.1", "--tau", "0.1", "--json")
        assert code == 1
        data = json.loads(capsys.readouterr().out)
        assert data["verdict"] == "fail"
        assert data["witness"] == [0]

    def test_complete_passes(self, k5_file: Path, capsys):
        """Test K*5 passes and the text certificate is printed."""
        _run("check-expander", str(k5_file), "--nu", "0.1", "--tau", "0.3")
        assert "Verdict:      pass" in capsys.readouterr().out

    def test_sampled(self, k5_file: Path, capsys):
        """Test sampled mode reports a sampled pass."""
        _run("check-expander", str(k5_file), "--mode", "sample", "--samples", "50", "--json")
        assert json.loads(capsys.readouterr().out)["verdict"] == "pass-sampled"


class TestDecompose:
    """Test the decompose and verify subcommands."""

    def test_decompose_and_verify(self, k5_file: Path, temp_dir: Path, capsys):
        """Test a written decomposition is accepted by verify."""
        output = temp_dir / "cycles.json"
        report = temp_dir / "report.json"
        _run("decompose", str(k5_file), "-o", str(output), "--report", str(report), "--seed", "3")
        assert len(read_decomposition(output)) == 4
        assert json.loads(report.read_text(encoding="utf-8"))["status"] == "success"
        assert "Status:   success" in capsys.readouterr().out

        _run("verify", str(k5_file), str(output))
        assert capsys.readouterr().out.strip() == "accept"

    def test_cycles_printed(self, k5_file: Path, capsys):
        """Test cycles go to stdout without -o."""
        _run("decompose", str(k5_file))
        lines = capsys.readouterr().out.strip().splitlines()
        cycles = [line for line in lines if line.startswith("0 ")]
        assert len(cycles) == 4

    def test_json(self, k5_file: Path, capsys):
        """Test --json prints report and decomposition."""
        _run("decompose", str(k5_file), "--json")
        data = json.loads(capsys.readouterr().out)
        assert data["report"]["cycle_count"] == 4
        assert len(data["decomposition"]["cycles"]) == 4

    def test_nonexistent(self, temp_dir: Path, capsys):
        """Test K*4 exits with 1 and no decomposition."""
        path = temp_dir / "k4.txt"
        write_graph(complete_digraph(4), path)
        assert _exit_code("decompose", str(path), "--json") == 1
        data = json.loads(capsys.readouterr().out)
        assert data["report"]["status"] == "nonexistent"
        assert "decomposition" not in data

    def test_indeterminate(self, k5_file: Path):
        """Test an exhausted budget exits with 2."""
        assert _exit_code("decompose", str(k5_file), "--budget", "3") == 2

    def test_undirected(self, temp_dir: Path):
        """Test an undirected input gives undirected cycles."""
        path = temp_dir / "k5.txt"
        output = temp_dir / "out.json"
        write_graph(complete_graph(5), path)
        _run("decompose", str(path), "-o", str(output))
        decomposition = read_decomposition(output)
        assert not decomposition.directed
        assert len(decomposition) == 2

    def test_eps_bound(self, c10_file: Path):
        """Test a failed degree bound exits with 1."""
        assert _exit_code("decompose", str(c10_file), "--eps", "0.1") == 1

    def test_config_file(self, k5_file: Path, sample_include_config: Path, temp_dir: Path):
        """Test options are read from a configuration file."""
        report = temp_dir / "report.json"
        _run(
            "decompose", str(k5_file), "--config", str(sample_include_config),
            "--report", str(report),
        )
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["config"]["seed"] == 11
        assert data["config"]["fallback"] == "none"

    def test_dump_stages(self, k5_file: Path, temp_dir: Path):
        """Test intermediate graphs are dumped."""
        dump = temp_dir / "stages"
        _run("decompose", str(k5_file), "--dump-stages", str(dump))
        assert (dump / "attempt0-part1.txt").exists()

    def test_verify_reject(self, k5_file: Path, temp_dir: Path, capsys):
        """Test a wrong candidate is rejected with its clause."""
        candidate = temp_dir / "bad.json"
        candidate.write_text('{"cycles": [[0, 1, 2, 3, 4]]}', encoding="utf-8")
        assert _exit_code("verify", str(k5_file), str(candidate)) == 1
        assert capsys.readouterr().out.startswith("reject [partition]")

    def test_verify_json(self, k5_file: Path, temp_dir: Path, capsys):
        """Test --json prints the verdict."""
        candidate = temp_dir / "bad.json"
        candidate.write_text('{"cycles": [[0, 0, 1, 2, 3]]}', encoding="utf-8")
        assert _exit_code("verify", str(k5_file), str(candidate), "--json") == 1
        assert json.loads(capsys.readouterr().out)["clause"] == "spanning"

    def test_missing_input(self, temp_dir: Path):
        """Test a missing input file exits with 1."""
        assert _exit_code("decompose", str(temp_dir / "missing.txt")) == 1


class TestOneFactorise:
    """Test the one-factorise subcommand."""

    def test_k4(self, k4_graph_file: Path, capsys):
        """Test K4 prints three perfect matchings."""
        _run("one-factorise", str(k4_graph_file))
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 3
        assert all(len(line.split()) == 2 for line in lines)

    def test_output_and_verify(self, k4_graph_file: Path, temp_dir: Path, capsys):
        """Test written matchings are accepted by verify --matchings."""
        output = temp_dir / "matchings.json"
        _run("one-factorise", str(k4_graph_file), "-o", str(output))
        assert len(read_matchings(output)) == 3
        _run("verify", str(k4_graph_file), str(output), "--matchings")
        assert capsys.readouterr().out.strip() == "accept"

    def test_json(self, k4_graph_file: Path, capsys):
        """Test --json prints the matchings."""
        _run("one-factorise", str(k4_graph_file), "--json")
        assert len(json.loads(capsys.readouterr().out)["matchings"]) == 3

    def test_directed_refused(self, k5_file: Path):
        """Test a digraph is refused."""
        assert _exit_code("one-factorise", str(k5_file)) == 1


class TestStats:
    """Test the stats subcommand."""

    def test_text(self, k5_file: Path, capsys):
        """Test the text listing."""
        _run("stats", str(k5_file))
        out = capsys.readouterr().out
        assert "n: 5" in out
        assert "regular: 4" in out

    def test_json(self, k5_file: Path, capsys):
        """Test the JSON listing."""
        _run("stats", str(k5_file), "--json")
        stats = json.loads(capsys.readouterr().out)
        assert stats["edges"] == 20
        assert stats["density"] == 1.0

    def test_verbose_logging(self, k5_file: Path):
        """Test -v and --debug are accepted before the subcommand."""
        _run("-v", "stats", str(k5_file))
        _run("--debug", "stats", str(k5_file))

    def test_parse_error(self, temp_dir: Path):
        """Test a malformed graph exits with 1."""
        path = temp_dir / "bad.txt"
        path.write_text("digraph 3\n0 0\n", encoding="utf-8")
        assert _exit_code("stats", str(path)) == 1

    def test_no_command(self):
        """Test argparse exits with 2 without a subcommand."""
        assert _exit_code() == 2
