"""Pytest configuration and fixtures for hamdecomp tests."""

import tempfile
from pathlib import Path
from typing import Generator

import pytest

from hamdecomp.config import PipelineConfig
from hamdecomp.graph import (
    MultiDigraph,
    Multigraph,
    complete_digraph,
    complete_graph,
    directed_cycle,
)


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def k5_digraph() -> MultiDigraph:
    """Complete digraph on 5 vertices (4-regular)."""
    return complete_digraph(5)


@pytest.fixture
def doubled_k5_digraph() -> MultiDigraph:
    """Every ordered pair on 5 vertices twice (8-regular, multiplicity 2)."""
    return complete_digraph(5, 2)


@pytest.fixture
def c6_digraph() -> MultiDigraph:
    """Directed cycle 0 -> 1 -> ... -> 5 -> 0."""
    return directed_cycle(6)


@pytest.fixture
def k5_graph() -> Multigraph:
    """Complete graph K5 (4-regular)."""
    return complete_graph(5)


@pytest.fixture
def doubled_k5_graph() -> Multigraph:
    """Complete multigraph 2K5 (8-regular, multiplicity 2)."""
    return complete_graph(5, 2)


@pytest.fixture
def fast_config() -> PipelineConfig:
    """Pipeline configuration with few retries for quick tests."""
    return PipelineConfig(max_retries=2, expander_samples=200, orientation_attempts=2)


@pytest.fixture
def k5_file(temp_dir: Path) -> Path:
    """Edge-list file holding the complete digraph on 5 vertices."""
    path = temp_dir / "k5.txt"
    lines = ["digraph 5"] + [f"{u} {v}" for u in range(5) for v in range(5) if u != v]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def sample_yaml_config(temp_dir: Path) -> Path:
    """Create a pipeline configuration using nested sections."""
    config_file = temp_dir / "config.yaml"
    config_file.write_text(
        """
r: 2
seed: 7
expansion:
  nu: 0.1
  tau: 0.3
budgets:
  hamilton_budget: 100000
max_retries: 3
""",
        encoding="utf-8",
    )
    return config_file


@pytest.fixture
def sample_include_config(temp_dir: Path) -> Path:
    """Create configuration files with !include directive."""
    included_file = temp_dir / "expansion.yaml"
    included_file.write_text("nu: 0.02\ntau: 0.25\n", encoding="utf-8")

    main_config = temp_dir / "main.yaml"
    main_config.write_text(
        "seed: 11\nexpansion: !include expansion.yaml\nfallback: none\n", encoding="utf-8"
    )
    return main_config
