"""Density-peak statistics on graphs and community-center selection.

A node is a good community center when it is dense (high degree, densely
connected neighbours, close to its neighbours) and far from every denser
node. ``node_stats`` computes both quantities, ``select_centers`` picks the
nodes in the upper-right corner of the decision graph.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dissimilarity import DissimilarityMatrix
from .graph_io import Graph


@dataclass(frozen=True)
class NodeStats:
    rho: np.ndarray
    delta: np.ndarray
    rho_star: np.ndarray
    delta_star: np.ndarray

    @property
    def gamma_score(self) -> np.ndarray:
        return self.rho_star * self.delta_star

    @property
    def n(self) -> int:
        return len(self.rho)


@dataclass(frozen=True)
class CenterSet:
    """Ordered centers; community ``t`` belongs to ``centers[t]``."""

    centers: tuple[int, ...]

    def __post_init__(self):
        if not self.centers:
            raise ValueError("at least one center is required")
        if len(set(self.centers)) != len(self.centers):
            raise ValueError(f"duplicate centers in {list(self.centers)}")

    @property
    def c(self) -> int:
        return len(self.centers)

    def __iter__(self):
        return iter(self.centers)

    def __len__(self):
        return len(self.centers)


def degree_with_self(graph: Graph, i: int) -> int:
    """Degree counting the implicit self-loop, i.e. ``len(neighbors) + 1``."""
    if not 0 <= i < graph.n:
        raise IndexError(f"node {i} outside [0, {graph.n})")
    return graph.degree(i) + 1


def local_degree(graph: Graph) -> np.ndarray:
    """Own self-inclusive degree plus the self-inclusive degrees of true neighbours."""
    k = np.array([graph.degree(i) + 1 for i in range(graph.n)], dtype=np.float64)
    out = k.copy()
    for i in range(graph.n):
        for j in graph.neighbors(i):
            out[i] += k[j]
    return out


def local_density(graph: Graph, d: DissimilarityMatrix) -> np.ndarray:
    """Local degree plus ``exp(-mean_sq)``, where ``mean_sq`` is the sum of
    squared neighbour distances divided by the self-inclusive degree."""
    d = np.asarray(getattr(d, "values", d), dtype=np.float64)
    if d.shape != (graph.n, graph.n):
        raise ValueError(f"dissimilarity shape {d.shape} does not match n={graph.n}")
    rho = local_degree(graph)
    for i in range(graph.n):
        nb = list(graph.neighbors(i))
        sq = float(np.sum(d[i, nb] ** 2)) if nb else 0.0
        rho[i] += np.exp(-sq / (graph.degree(i) + 1))
    return rho


def density_order(rho: np.ndarray) -> np.ndarray:
    """Node indices from densest to sparsest; equal densities keep index order."""
    return np.lexsort((np.arange(len(rho)), -np.asarray(rho, dtype=np.float64)))


def min_dissimilarity(rho: np.ndarray, d: DissimilarityMatrix) -> np.ndarray:
    """Distance from each node to its nearest denser node.

    The single densest node (ties broken by lower index) gets its largest
    distance to any node instead.
    """
    d = np.asarray(getattr(d, "values", d), dtype=np.float64)
    n = len(rho)
    if n == 0:
        raise ValueError("min_dissimilarity needs at least one node")
    if d.shape != (n, n):
        raise ValueError(f"dissimilarity shape {d.shape} does not match {n} densities")
    order = density_order(rho)
    delta = np.empty(n, dtype=np.float64)
    top = order[0]
    delta[top] = d[top].max() if n > 1 else 0.0
    for rank in range(1, n):
        i = order[rank]
        delta[i] = d[i, order[:rank]].min()
    return delta


def regularize(rho: np.ndarray, delta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scale both vectors by their maxima; an all-zero delta stays all zero."""
    rho = np.asarray(rho, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    rmax = rho.max()
    if rmax <= 0:
        raise ValueError("max(rho) must be positive")
    dmax = delta.max()
    delta_star = delta / dmax if dmax > 0 else np.zeros_like(delta)
    return rho / rmax, delta_star


def classic_dpc_density(d: DissimilarityMatrix, d_c: float) -> np.ndarray:
    """Cut-off density: number of other points closer than ``d_c``."""
    if not d_c > 0:
        raise ValueError(f"d_c must be positive, got {d_c!r}")
    d = np.asarray(getattr(d, "values", d), dtype=np.float64)
    close = d < d_c
    np.fill_diagonal(close, False)
    return close.sum(axis=1).astype(np.int64)


def node_stats(graph: Graph, d: DissimilarityMatrix) -> NodeStats:
    rho = local_density(graph, d)
    delta = min_dissimilarity(rho, d)
    rho_star, delta_star = regularize(rho, delta)
    return NodeStats(rho=rho, delta=delta, rho_star=rho_star, delta_star=delta_star)


def select_centers(
    stats: NodeStats,
    communities: int | None = None,
    manual: Sequence[int] | None = None,
) -> CenterSet:
    """Pick ``communities`` nodes with the largest ``rho* * delta*``, or echo ``manual``.

    Exactly one of the two arguments must be given. Automatic centers are
    ordered by decreasing score, ties going to the lower index.
    """
    if (communities is None) == (manual is None):
        raise ValueError("give exactly one of communities or manual centers")
    if manual is not None:
        centers = tuple(int(c) for c in manual)
        for c in centers:
            if not 0 <= c < stats.n:
                raise ValueError(f"center {c} outside [0, {stats.n})")
        return CenterSet(centers)
    if not 1 <= communities <= stats.n:
        raise ValueError(f"communities must be in [1, {stats.n}], got {communities}")
    gamma = stats.gamma_score
    order = np.lexsort((np.arange(stats.n), -gamma))
    return CenterSet(tuple(int(i) for i in order[:communities]))


def decision_graph_records(stats: NodeStats, names: Sequence[str] | None = None) -> list[dict]:
    gamma = stats.gamma_score
    order = np.lexsort((np.arange(stats.n), -gamma))
    return [
        {
            "node": names[i] if names is not None else int(i),
            "rho_star": float(stats.rho_star[i]),
            "delta_star": float(stats.delta_star[i]),
            "gamma": float(gamma[i]),
        }
        for i in order
    ]


DECISION_GRAPH_COLUMNS = ("node", "rho_star", "delta_star", "gamma")


def decision_graph_csv(stats: NodeStats, names: Sequence[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=DECISION_GRAPH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in decision_graph_records(stats, names):
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})
    return buf.getvalue()
