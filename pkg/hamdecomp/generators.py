#!/usr/bin/env python
"""Seeded generators of regular test instances.

Families:

- ``complete``: ``K_n``.
- ``complete-multi``: ``λK_n``.
- ``directed-complete``: every ordered pair ``λ`` times.
- ``union-of-permutations``: ``s`` fixed-point-free permutation digraphs;
  a permutation pushing some pair above multiplicity ``r`` is repaired by
  random swaps, and redrawn if repair does not converge.
- ``random-regular-multidigraph``: random pairing of ``s`` out-stubs with
  ``s`` in-stubs per vertex; rejected pairs (loops, pairs at the cap) are
  reshuffled and re-paired.
- ``random-regular-multigraph``: ``⌊s/2⌋`` random Hamilton cycles plus, for
  odd ``s``, a random perfect matching, each redrawn while it would push a
  pair above ``r``. A construction that gets stuck starts over, up to
  ``MAX_RESTARTS`` times.

Every instance is checked after generation for regularity and the
multiplicity cap.
"""

import logging
import random
from dataclasses import dataclass
from typing import Callable, List, Optional, TypeVar

import numpy as np

from .errors import ConfigError, GraphError, InfeasibleError
from .graph import AnyGraph, MultiDigraph, Multigraph, complete_digraph, complete_graph, is_regular

logger = logging.getLogger(__name__)

FAMILIES = (
    "complete",
    "complete-multi",
    "directed-complete",
    "union-of-permutations",
    "random-regular-multidigraph",
    "random-regular-multigraph",
)
DIRECTED_FAMILIES = ("directed-complete", "union-of-permutations", "random-regular-multidigraph")
MAX_DRAWS = 1_000
MAX_REPAIR_PASSES = 100
MAX_RESTARTS = 20

G = TypeVar("G", MultiDigraph, Multigraph)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one generated instance.

    Attributes:
        family: One of :data:`FAMILIES`.
        n: Number of vertices.
        s: Degree (ignored by the complete families, which imply it).
        r: Multiplicity cap of the random families.
        seed: RNG seed.
        lam: Multiplicity of the complete families.
    """

    family: str
    n: int
    s: Optional[int] = None
    r: int = 1
    seed: int = 0
    lam: int = 1

    @property
    def directed(self) -> bool:
        return self.family in DIRECTED_FAMILIES

    @property
    def degree(self) -> int:
        """Degree the generated instance will have."""
        if self.family in ("complete", "complete-multi", "directed-complete"):
            lam = 1 if self.family == "complete" else self.lam
            return lam * (self.n - 1)
        if self.s is None:
            raise ConfigError(f"Family {self.family!r} needs a degree s")
        return self.s

    @property
    def cap(self) -> int:
        """Multiplicity cap the instance respects."""
        if self.family == "complete":
            return 1
        if self.family in ("complete-multi", "directed-complete"):
            return self.lam
        return self.r

    def validate(self) -> None:
        """Reject infeasible parameter combinations.

        Raises:
            ConfigError: Naming the violated condition.
        """
        if self.family not in FAMILIES:
            raise ConfigError(f"Unknown family {self.family!r}", context=f"choose from {FAMILIES}")
        if self.n < 1:
            raise ConfigError(f"n must be at least 1, got {self.n}")
        if self.r < 1 or self.lam < 1:
            raise ConfigError("r and lam must be at least 1")
        s = self.degree
        if s < 0:
            raise ConfigError(f"Degree must be non-negative, got {s}")
        if s > self.cap * (self.n - 1):
            raise ConfigError(f"Degree {s} exceeds r(n-1) = {self.cap * (self.n - 1)}")
        if not self.directed and (self.n * s) % 2:
            raise ConfigError(f"n*s must be even for a regular graph, got n={self.n}, s={s}")


def _derangement_repaired(rng: random.Random, counts: np.ndarray, r: int) -> Optional[List[int]]:
    """A permutation with no fixed point whose pairs all stay below ``r``."""
    n = counts.shape[0]
    perm = list(range(n))
    rng.shuffle(perm)
    for _ in range(MAX_REPAIR_PASSES):
        bad = 0
        offset = rng.randrange(n)
        for step in range(n):
            i = (step + offset) % n
            if perm[i] == i or counts[i, perm[i]] >= r:
                j = rng.randrange(n)
                perm[i], perm[j] = perm[j], perm[i]
                bad += 1
        if bad == 0:
            return perm
    return None


def _union_of_permutations(spec: GeneratorSpec, rng: random.Random) -> MultiDigraph:
    n, s = spec.n, spec.degree
    counts = np.zeros((n, n), dtype=np.int64)
    for index in range(s):
        for _ in range(MAX_DRAWS):
            perm = _derangement_repaired(rng, counts, spec.r)
            if perm is not None:
                break
        else:
            raise InfeasibleError(
                "Could not draw a compatible permutation",
                witness={"index": index, "n": n, "r": spec.r},
            )
        counts[np.arange(n), perm] += 1
    return MultiDigraph(n, counts)


def _stub_pairing(spec: GeneratorSpec, rng: random.Random) -> Optional[MultiDigraph]:
    n, s, r = spec.n, spec.degree, spec.r
    counts = np.zeros((n, n), dtype=np.int64)
    tails = [v for v in range(n) for _ in range(s)]
    heads = list(tails)
    stale = 0
    while tails:
        rng.shuffle(heads)
        rejected_tails, rejected_heads = [], []
        for u, v in zip(tails, heads):
            if u != v and counts[u, v] < r:
                counts[u, v] += 1
            else:
                rejected_tails.append(u)
                rejected_heads.append(v)
        stale = stale + 1 if len(rejected_tails) == len(tails) else 0
        if stale > 20:
            return None
        tails, heads = rejected_tails, rejected_heads
    return MultiDigraph(n, counts)


def _random_regular_multigraph(spec: GeneratorSpec, rng: random.Random) -> Multigraph:
    n, s, r = spec.n, spec.degree, spec.r
    counts = np.zeros((n, n), dtype=np.int64)

    def place(pairs: List[tuple]) -> bool:
        trial = counts.copy()
        for u, v in pairs:
            trial[u, v] += 1
            trial[v, u] += 1
        if trial.max(initial=0) > r:
            return False
        counts[:] = trial
        return True

    for _ in range(s // 2):
        for _ in range(MAX_DRAWS):
            order = list(range(n))
            rng.shuffle(order)
            if place([(order[i], order[(i + 1) % n]) for i in range(n)]):
                break
        else:
            raise InfeasibleError(
                "Could not draw a compatible Hamilton cycle", witness={"n": n, "r": r}
            )
    if s % 2:
        for _ in range(MAX_DRAWS):
            order = list(range(n))
            rng.shuffle(order)
            if place([(order[i], order[i + 1]) for i in range(0, n, 2)]):
                break
        else:
            raise InfeasibleError(
                "Could not draw a compatible perfect matching", witness={"n": n, "r": r}
            )
    return Multigraph(n, counts)


def _restarting(
    build: Callable[[GeneratorSpec, random.Random], G], spec: GeneratorSpec, rng: random.Random
) -> G:
    for _ in range(MAX_RESTARTS - 1):
        try:
            return build(spec, rng)
        except InfeasibleError as e:
            logger.debug(f"Restarting {spec.family}: {e.message}")
    return build(spec, rng)


def generate(spec: GeneratorSpec) -> AnyGraph:
    """Generate one instance.

    Args:
        spec: Family and parameters.

    Returns:
        A regular graph of degree ``spec.degree`` and multiplicity at most
        ``spec.cap``.

    Raises:
        ConfigError: For infeasible parameters.
        InfeasibleError: When the random construction keeps failing.
        GraphError: If the result misses its degree or multiplicity target.
    """
    spec.validate()
    rng = random.Random(spec.seed)
    graph: AnyGraph
    if spec.family == "complete":
        graph = complete_graph(spec.n)
    elif spec.family == "complete-multi":
        graph = complete_graph(spec.n, spec.lam)
    elif spec.family == "directed-complete":
        graph = complete_digraph(spec.n, spec.lam)
    elif spec.family == "union-of-permutations":
        graph = _restarting(_union_of_permutations, spec, rng)
    elif spec.family == "random-regular-multidigraph":
        for _ in range(MAX_DRAWS):
            pairing = _stub_pairing(spec, rng)
            if pairing is not None:
                graph = pairing
                break
        else:
            raise InfeasibleError(
                "Stub pairing kept getting stuck", witness={"n": spec.n, "s": spec.s}
            )
    else:
        graph = _restarting(_random_regular_multigraph, spec, rng)

    _check_generated(spec, graph)
    logger.info(f"Generated {spec.family} instance: {graph!r}")
    return graph


def _check_generated(spec: GeneratorSpec, graph: AnyGraph) -> None:
    """Reject a construction that missed its degree or multiplicity target.

    Raises:
        GraphError: If ``graph`` is not ``spec.degree``-regular or exceeds ``spec.cap``.
    """
    degree = is_regular(graph)
    if spec.n >= 1 and degree != spec.degree:
        raise GraphError(
            f"{spec.family} produced a graph that is not {spec.degree}-regular",
            context=f"degree {degree}",
        )
    if graph.multiplicity > spec.cap:
        raise GraphError(
            f"{spec.family} exceeded multiplicity {spec.cap}",
            context=f"multiplicity {graph.multiplicity}",
        )
