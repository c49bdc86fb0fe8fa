"""Evidential community detection based on density peaks.

Community centers are found with density-peak statistics on a
signal-propagation dissimilarity, then every node receives a mass function
over the communities through two-step evidential label propagation.
"""

__version__ = "0.1.0"

from .belief import (
    OUTLIER,
    MassFunction,
    combine_neighbor_evidence,
    decide,
    dempster_combine,
    discount,
    dubois_prade_combine,
    make_mass,
)
from .density import CenterSet, NodeStats, node_stats, select_centers
from .dissimilarity import DissimilarityMatrix, InfluenceMatrix, dissimilarity_matrix, influence_matrix
from .evaluation import HardPartition, harden, nmi
from .graph_io import Graph, GroundTruth, load_edge_list, load_gml, load_labels, read_graph
from .propagation import CredalPartition, PropagationParams, detect

__all__ = [
    "OUTLIER",
    "CenterSet",
    "CredalPartition",
    "DissimilarityMatrix",
    "Graph",
    "GroundTruth",
    "HardPartition",
    "InfluenceMatrix",
    "MassFunction",
    "NodeStats",
    "PropagationParams",
    "combine_neighbor_evidence",
    "decide",
    "dempster_combine",
    "detect",
    "discount",
    "dissimilarity_matrix",
    "dubois_prade_combine",
    "harden",
    "influence_matrix",
    "load_edge_list",
    "load_gml",
    "load_labels",
    "make_mass",
    "nmi",
    "node_stats",
    "read_graph",
    "select_centers",
]
