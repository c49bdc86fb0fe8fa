"""Signal-propagation influence vectors and the node dissimilarity matrix.

Every node in turn acts as a signal source: it sends one unit to itself and
each neighbour, and every node holding signal does the same at each later
step. After ``t_steps`` steps the signal counts are the columns of
``(A + I) ** t_steps``. Two nodes are dissimilar when their influence
vectors are far apart in Euclidean distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .graph_io import Graph

DEFAULT_T_STEPS = 3

# int64 products stay exact while every entry is below this bound.
_INT_LIMIT = 2**62


@dataclass(frozen=True)
class InfluenceMatrix:
    """Column ``i`` holds the signal counts after ``t_steps`` from source ``i``.

    ``exact`` is False when entries could exceed the int64 range and the
    powers were taken in float64 (relative precision ~1e-16 per entry).
    """

    values: np.ndarray
    t_steps: int
    exact: bool = True


@dataclass(frozen=True)
class DissimilarityMatrix:
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, key):
        return self.values[key]


def influence_matrix(graph: Graph, t_steps: int = DEFAULT_T_STEPS) -> InfluenceMatrix:
    """Compute ``(A + I) ** t_steps`` for the graph's 0/1 adjacency ``A``.

    Integer arithmetic is used whenever ``(max_degree + 1) ** t_steps`` fits
    in int64, so small cases are exact and independent of BLAS threading.
    """
    if int(t_steps) != t_steps or t_steps < 1:
        raise ValueError(f"t_steps must be a positive integer, got {t_steps!r}")
    t_steps = int(t_steps)
    n = graph.n
    max_deg = max((graph.degree(i) for i in range(n)), default=0)
    exact = (max_deg + 1) ** t_steps < _INT_LIMIT
    dtype = np.int64 if exact else np.float64
    step = graph.adjacency_matrix(dtype=dtype) + np.eye(n, dtype=dtype)
    result = step.copy()
    for _ in range(t_steps - 1):
        result = result @ step
    return InfluenceMatrix(values=result, t_steps=t_steps, exact=exact)


def dissimilarity_matrix(infl: InfluenceMatrix, normalize: bool = False) -> DissimilarityMatrix:
    """Pairwise Euclidean distances between the influence columns.

    With ``normalize=True`` each column is scaled to unit length first.
    """
    cols = np.asarray(infl.values, dtype=np.float64).T
    if cols.ndim != 2 or cols.shape[0] != cols.shape[1]:
        raise ValueError(f"influence matrix must be square, got shape {cols.shape}")
    if normalize:
        cols = cols / np.linalg.norm(cols, axis=1, keepdims=True)
    if cols.shape[0] < 2:
        return DissimilarityMatrix(np.zeros((cols.shape[0], cols.shape[0])))
    return DissimilarityMatrix(squareform(pdist(cols, metric="euclidean")))


def graph_dissimilarity(
    graph: Graph, t_steps: int = DEFAULT_T_STEPS, normalize: bool = False
) -> DissimilarityMatrix:
    return dissimilarity_matrix(influence_matrix(graph, t_steps), normalize=normalize)


def write_dissimilarity_csv(d: DissimilarityMatrix, path: str | Path) -> None:
    """Full symmetric matrix, row-major, no header."""
    np.savetxt(path, d.values, delimiter=",", fmt="%.17g")
