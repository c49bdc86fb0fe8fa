"""Two-step evidential label propagation from the selected centers.

1. Centers get a categorical mass on their own community; everything else
   starts vacuous.
2. One-round expansion: a node adjacent to centers gets a simple mass on the
   community (or set of communities) of those centers, weighted by its
   distance to them.
3. Diffusion: the remaining nodes are labeled one at a time, most labeled
   neighbourhood first, by fusing the masses of their labeled neighbours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .belief import (
    OUTLIER,
    RELIABILITY_RULES,
    MassFunction,
    combine_neighbor_evidence,
    decide,
    members,
    singleton,
)
from .density import CenterSet, NodeStats, local_density, node_stats, select_centers
from .dissimilarity import DEFAULT_T_STEPS, DissimilarityMatrix, graph_dissimilarity
from .graph_io import Graph


@dataclass(frozen=True)
class PropagationParams:
    """Tunable parameters of the pipeline.

    ``gamma=None`` derives the distance scale from the median squared
    neighbour distance.
    """

    beta: float = 2.0
    gamma: float | None = None
    t_steps: int = DEFAULT_T_STEPS
    reliability: str = "max_normalized"
    normalize_influence: bool = False

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if int(self.t_steps) != self.t_steps or self.t_steps < 1:
            raise ValueError(f"t_steps must be a positive integer, got {self.t_steps!r}")
        if self.reliability not in RELIABILITY_RULES:
            raise ValueError(f"reliability must be one of {RELIABILITY_RULES}")


@dataclass(frozen=True)
class CredalPartition:
    masses: tuple[MassFunction, ...]
    centers: CenterSet
    stats: NodeStats | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def c(self) -> int:
        return self.centers.c

    @property
    def labeled(self) -> tuple[bool, ...]:
        return tuple(not m.is_vacuous for m in self.masses)

    def hard_labels(self, mode: str = "singletons_only") -> list[int]:
        return [decide(m, mode) for m in self.masses]

    def with_masses(self, masses: Sequence[MassFunction]) -> "CredalPartition":
        return replace(self, masses=tuple(masses))


def _dense(d) -> np.ndarray:
    return np.asarray(getattr(d, "values", d), dtype=np.float64)


def initialize(graph: Graph, centers: CenterSet, stats: NodeStats | None = None) -> CredalPartition:
    c = centers.c
    masses = [MassFunction.vacuous(c)] * graph.n
    for t, node in enumerate(centers):
        if not 0 <= node < graph.n:
            raise ValueError(f"center {node} outside [0, {graph.n})")
        masses[node] = MassFunction.categorical(singleton(t), c)
    return CredalPartition(tuple(masses), centers, stats)


def gamma_scale_auto(graph: Graph, d: DissimilarityMatrix, beta: float = 2.0) -> float:
    """Inverse median of ``d_ij ** beta`` over ordered (node, neighbour) pairs.

    A zero median falls back to the mean of the same values; when every
    neighbour distance is zero the scale is irrelevant and 1.0 is returned.
    """
    d = _dense(d)
    vals = [d[i, j] ** beta for i in range(graph.n) for j in graph.neighbors(i)]
    if not vals:
        raise ValueError("graph has no edges, gamma cannot be derived")
    med = float(np.median(vals))
    if med > 0:
        return 1.0 / med
    mean = float(np.mean(vals))
    return 1.0 / mean if mean > 0 else 1.0


def expansion_weight(dist: float, gamma: float, beta: float = 2.0) -> float:
    """Mass given to a center's community: ``exp(-gamma * dist ** beta)``."""
    if dist == 0:
        return 1.0
    return math.exp(-gamma * dist**beta)


def overlap_weight(distances: Sequence[float]) -> float:
    """Mass given to a set of communities: ``exp(-population variance)``."""
    return math.exp(-float(np.var(np.asarray(distances, dtype=np.float64))))


def _center_community(m: MassFunction) -> int:
    focal = decide(m, "singletons_only")
    if focal == OUTLIER or m[focal] != 1.0:
        raise ValueError(f"center mass is not categorical: {m!r}")
    return members(focal)[0]


def expand_one_round(
    graph: Graph,
    d: DissimilarityMatrix,
    partition: CredalPartition,
    params: PropagationParams = PropagationParams(),
) -> CredalPartition:
    """Label every non-center node that touches at least one center.

    Adjacent centers are grouped by community and the closest center of each
    community is kept. One community gives a simple mass with weight
    :func:`expansion_weight`; several give a mass on their union with weight
    :func:`overlap_weight` of the kept distances.
    """
    d = _dense(d)
    gamma = params.gamma if params.gamma is not None else gamma_scale_auto(graph, d, params.beta)
    c = partition.c
    center_comm = {node: _center_community(partition.masses[node]) for node in partition.centers}
    masses = list(partition.masses)
    for i in range(graph.n):
        if i in center_comm:
            continue
        nearest: dict[int, float] = {}
        for j in graph.neighbors(i):
            t = center_comm.get(j)
            if t is not None:
                nearest[t] = min(nearest.get(t, math.inf), d[i, j])
        if not nearest:
            continue
        if len(nearest) == 1:
            (t, dist), = nearest.items()
            masses[i] = MassFunction.simple(singleton(t), expansion_weight(dist, gamma, params.beta), c)
        else:
            focal = 0
            for t in nearest:
                focal |= singleton(t)
            w = overlap_weight([nearest[t] for t in sorted(nearest)])
            masses[i] = MassFunction.simple(focal, w, c)
    return partition.with_masses(masses)


def labeled_rate(graph: Graph, partition: CredalPartition, i: int) -> float:
    """Fraction of the true neighbours of ``i`` that are labeled; 0 for isolated nodes."""
    nb = graph.neighbors(i)
    if not nb:
        return 0.0
    labeled = partition.labeled
    return sum(labeled[j] for j in nb) / len(nb)


def diffuse(
    graph: Graph,
    d: DissimilarityMatrix,
    partition: CredalPartition,
    params: PropagationParams = PropagationParams(),
) -> CredalPartition:
    """Label the remaining nodes one at a time.

    The next node is the unlabeled one with the highest labeled rate, then the
    highest local density, then the lowest index. Its mass fuses the masses
    of its labeled neighbours. Nodes with no path to a labeled node stay
    vacuous.
    """
    rho = partition.stats.rho if partition.stats is not None else local_density(graph, d)
    masses = list(partition.masses)
    labeled = [not m.is_vacuous for m in masses]
    n_labeled = [sum(labeled[j] for j in graph.neighbors(i)) for i in range(graph.n)]
    done = list(labeled)
    while True:
        best = None
        best_key = None
        for i in range(graph.n):
            if done[i] or n_labeled[i] == 0:
                continue
            key = (n_labeled[i] / graph.degree(i), rho[i], -i)
            if best_key is None or key > best_key:
                best, best_key = i, key
        if best is None:
            break
        evidence = [masses[j] for j in graph.neighbors(best) if labeled[j]]
        masses[best] = combine_neighbor_evidence(evidence, params.reliability)
        done[best] = True
        if not masses[best].is_vacuous:
            labeled[best] = True
            for j in graph.neighbors(best):
                n_labeled[j] += 1
    return partition.with_masses(masses)


def detect(
    graph: Graph,
    params: PropagationParams = PropagationParams(),
    communities: int | None = None,
    centers: Sequence[int] | None = None,
) -> CredalPartition:
    """Run the full pipeline: dissimilarity, density peaks, centers, propagation.

    Give either the number of ``communities`` or an explicit ``centers`` list.
    """
    if graph.n == 0:
        raise ValueError("graph has no nodes")
    d = graph_dissimilarity(graph, params.t_steps, normalize=params.normalize_influence)
    stats = node_stats(graph, d)
    center_set = select_centers(stats, communities=communities, manual=centers)
    partition = initialize(graph, center_set, stats)
    if graph.num_edges:
        partition = expand_one_round(graph, d, partition, params)
    return diffuse(graph, d, partition, params)

