#!/usr/bin/env python
"""Pipeline configuration and YAML loading with ``!include`` support.

A configuration file is a YAML mapping of :class:`PipelineConfig` fields::

    r: 2
    seed: 7
    expansion: !include expansion.yaml   # nested mapping with nu/tau

Included files resolve relative to the file that includes them. Mappings
nested under ``expansion`` or ``budgets`` are flattened into the top level.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union, cast

import yaml

from .errors import ConfigError
from .expansion import ExpansionParams

logger = logging.getLogger(__name__)

FALLBACKS = ("none", "exact")
EXPANDER_GATES = ("sample", "off")


class IncludeLoader(yaml.SafeLoader):
    """SafeLoader that understands ``!include path/to/file.yaml``.

    Paths are resolved relative to the directory of the including file.
    """

    def __init__(self, stream):
        """Initialize the loader with file path tracking.

        Args:
            stream: YAML input stream, typically a file object.
        """
        self.root_dir = Path.cwd()
        if hasattr(stream, "name"):
            self.root_dir = Path(stream.name).resolve().parent
        super().__init__(stream)


def include_constructor(loader: IncludeLoader, node: Any) -> Any:
    """Load the YAML file named by an ``!include`` node.

    Args:
        loader: The active loader.
        node: Scalar node holding the include path.

    Returns:
        Parsed content of the included file.

    Raises:
        ConfigError: If the file is missing or not valid YAML.
    """
    include_path = loader.construct_scalar(cast(yaml.ScalarNode, node))
    full_path = (loader.root_dir / include_path).resolve()
    if not full_path.exists():
        raise ConfigError(f"Include file not found: {full_path}")

    logger.debug(f"  Including: {full_path}")
    try:
        with open(full_path, encoding="utf-8") as f:
            return yaml.load(f, Loader=IncludeLoader)  # nosec B506
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in included file {full_path}: {e}") from e


yaml.add_constructor("!include", include_constructor, IncludeLoader)


@dataclass
class PipelineConfig:
    """Explicit stand-ins for the asymptotic constants of the construction.

    Attributes:
        r: Largest multiplicity the pipeline accepts; number of split parts.
        seed: Parent seed of every random choice.
        nu: Robust expansion parameter ν.
        tau: Robust expansion band parameter τ.
        xi: Relative tolerance of the split balance gate.
        path_vertex_cap: Largest vertex count of an absorbing path.
        matching_size_cap: Largest size of a leftover matching.
        leftover_cap: Degree left behind by greedy cycle extraction.
        factor_size: Size of the factor kept by the undirected reduction;
            None means ``max(1, n // 20)``.
        max_retries: Resampled attempts after the first one.
        fallback: ``"exact"`` to finish with exact search, ``"none"`` to
            report failure.
        hamilton_budget: Node budget of every search call.
        short_path_maxlen: Connector length bound; None means ``ceil(1/ν)``.
        expander_samples: Sets drawn by the sampled expansion gate.
        expander_gate: ``"sample"`` or ``"off"``.
        orientation_attempts: Orientations tried by the undirected reduction.
        workers: Processes used by exact certification.
    """

    r: int = 1
    seed: int = 0
    nu: float = 0.05
    tau: float = 0.3
    xi: float = 0.5
    path_vertex_cap: int = 12
    matching_size_cap: int = 4
    leftover_cap: int = 1
    factor_size: Optional[int] = None
    max_retries: int = 20
    fallback: str = "exact"
    hamilton_budget: int = 5_000_000
    short_path_maxlen: Optional[int] = None
    expander_samples: int = 2_000
    expander_gate: str = "sample"
    orientation_attempts: int = 5
    workers: int = 1

    def validate(self) -> "PipelineConfig":
        """Check every field; return self for chaining.

        Raises:
            ConfigError: Naming the first invalid field.
        """
        if self.r < 1:
            raise ConfigError(f"r must be at least 1, got {self.r}")
        if self.matching_size_cap < 1 or self.path_vertex_cap < 1:
            raise ConfigError("Path and matching caps must be at least 1")
        if self.path_vertex_cap < 2 * self.matching_size_cap:
            raise ConfigError(
                "path_vertex_cap must be at least twice matching_size_cap",
                context=f"path_vertex_cap={self.path_vertex_cap}, "
                f"matching_size_cap={self.matching_size_cap}",
            )
        self.expansion.require_certifiable()
        if not 0 < self.xi < 1:
            raise ConfigError(f"xi must lie in (0, 1), got {self.xi}")
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be non-negative, got {self.max_retries}")
        if self.fallback not in FALLBACKS:
            raise ConfigError(f"fallback must be one of {FALLBACKS}, got {self.fallback!r}")
        if self.expander_gate not in EXPANDER_GATES:
            raise ConfigError(
                f"expander_gate must be one of {EXPANDER_GATES}, got {self.expander_gate!r}"
            )
        if self.leftover_cap < 0:
            raise ConfigError(f"leftover_cap must be non-negative, got {self.leftover_cap}")
        if self.factor_size is not None and self.factor_size < 0:
            raise ConfigError(f"factor_size must be non-negative, got {self.factor_size}")
        if self.hamilton_budget < 1 or self.expander_samples < 1:
            raise ConfigError("Search budget and sample count must be positive")
        if self.short_path_maxlen is not None and self.short_path_maxlen < 1:
            raise ConfigError(f"short_path_maxlen must be positive, got {self.short_path_maxlen}")
        if self.orientation_attempts < 1 or self.workers < 1:
            raise ConfigError("orientation_attempts and workers must be at least 1")
        return self

    @property
    def expansion(self) -> ExpansionParams:
        """The (ν, τ) pair as expansion parameters."""
        return ExpansionParams(nu=self.nu, tau=self.tau)

    @property
    def connector_length(self) -> int:
        """Connector length bound, ``ceil(1/ν)`` unless overridden."""
        if self.short_path_maxlen is not None:
            return self.short_path_maxlen
        return math.ceil(1 / self.nu - 1e-9)

    def factor_size_for(self, n: int) -> int:
        """Factor size used for an ``n``-vertex graph."""
        if self.factor_size is not None:
            return self.factor_size
        return max(1, n // 20)

    def with_overrides(self, **overrides: Any) -> "PipelineConfig":
        """Return a validated copy with the non-None overrides applied."""
        present = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(present) - {f.name for f in fields(self)}
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {sorted(unknown)}")
        return replace(self, **present).validate()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _flatten(data: Dict[str, Any]) -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        if key in ("expansion", "budgets") and isinstance(value, dict):
            flat.update(value)
        else:
            flat[key] = value
    return flat


def config_from_dict(data: Dict[str, Any]) -> PipelineConfig:
    """Build and validate a configuration from a (possibly nested) mapping.

    Raises:
        ConfigError: On unknown keys or invalid values.
    """
    flat = _flatten(data)
    known = {f.name for f in fields(PipelineConfig)}
    unknown = sorted(set(flat) - known)
    if unknown:
        raise ConfigError(f"Unknown configuration keys: {unknown}")
    try:
        config = PipelineConfig(**flat)
    except TypeError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e
    return config.validate()


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Load a pipeline configuration from a YAML file.

    Args:
        path: YAML file, possibly using ``!include``.

    Returns:
        Validated configuration.

    Raises:
        ConfigError: If the file is missing, unreadable or invalid.
    """
    config_file = Path(path)
    if not config_file.exists():
        raise ConfigError(f"Configuration file not found: {config_file}")
    try:
        with open(config_file, encoding="utf-8") as f:
            data = yaml.load(f, Loader=IncludeLoader)  # nosec B506
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {config_file}: {e}") from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"Configuration in {config_file} must be a mapping")
    logger.info(f"Loaded configuration from {config_file}")
    return config_from_dict(data)
