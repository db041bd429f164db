#!/usr/bin/env python
"""
hamdecomp - Hamilton decompositions of dense regular multigraphs and multidigraphs.

The package runs the randomised split / almost-decompose / absorb / complete
pipeline on regular multidigraphs that are robust outexpanders, reduces
even-regular multigraphs to it by orientation, and derives 1-factorisations
from it. Every stage has an explicit gate and an exact fallback, and every
returned decomposition is checked by an independent verifier.
"""

# Try to import version from setuptools_scm generated file, fallback to default
try:
    from hamdecomp._version import __version__
except ImportError:
    # Fallback version when not installed from git (e.g., development mode)
    __version__ = "0.0.0.dev0"

__license__ = "Apache-2.0"

from hamdecomp.__main__ import main
from hamdecomp.config import IncludeLoader, PipelineConfig, include_constructor, load_config
from hamdecomp.errors import (
    ConfigError,
    DegreeError,
    GraphError,
    GraphParseError,
    HamDecompError,
    InfeasibleError,
    StageFailure,
)
from hamdecomp.expansion import (
    ExpanderCertificate,
    ExpansionParams,
    ExpansionVerdict,
    certify_expander,
    certify_outexpander,
    min_degree,
    min_semidegree,
    robust_neighbourhood,
    robust_outneighbourhood,
)
from hamdecomp.generators import GeneratorSpec, generate
from hamdecomp.graph import (
    EdgeInstance,
    GraphBuilder,
    MultiDigraph,
    Multigraph,
    degree_profile,
    disjoint_union,
    is_regular,
    subtract_edges,
    underlying_simple,
)
from hamdecomp.graph_io import parse_graph, read_graph, write_graph
from hamdecomp.hamilton import (
    DirectedPath,
    HamiltonCycle,
    HamiltonDecomposition,
    SearchStatus,
    decompose_regular,
    hamilton_cycle,
    hamilton_path,
)
from hamdecomp.pipeline import (
    PipelineReport,
    PipelineResult,
    decompose_min_degree_digraph,
    decompose_min_degree_graph,
    decompose_multidigraph,
    decompose_multigraph,
    one_factorise,
    random_split,
)
from hamdecomp.utils import graph_stats
from hamdecomp.verify import Verdict, verify_decomposition, verify_one_factorisation

__all__ = [
    "MultiDigraph",
    "Multigraph",
    "EdgeInstance",
    "GraphBuilder",
    "underlying_simple",
    "is_regular",
    "degree_profile",
    "disjoint_union",
    "subtract_edges",
    "ExpansionParams",
    "ExpansionVerdict",
    "ExpanderCertificate",
    "robust_outneighbourhood",
    "robust_neighbourhood",
    "certify_outexpander",
    "certify_expander",
    "min_semidegree",
    "min_degree",
    "DirectedPath",
    "HamiltonCycle",
    "HamiltonDecomposition",
    "SearchStatus",
    "hamilton_path",
    "hamilton_cycle",
    "decompose_regular",
    "PipelineConfig",
    "PipelineReport",
    "PipelineResult",
    "random_split",
    "decompose_multidigraph",
    "decompose_multigraph",
    "decompose_min_degree_digraph",
    "decompose_min_degree_graph",
    "one_factorise",
    "GeneratorSpec",
    "generate",
    "Verdict",
    "verify_decomposition",
    "verify_one_factorisation",
    "parse_graph",
    "read_graph",
    "write_graph",
    "graph_stats",
    "load_config",
    "IncludeLoader",
    "include_constructor",
    "HamDecompError",
    "GraphError",
    "GraphParseError",
    "DegreeError",
    "InfeasibleError",
    "StageFailure",
    "ConfigError",
    "main",
    "__version__",
]
