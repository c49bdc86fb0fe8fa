"""Hard partitions from credal ones, and NMI scoring."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Union

import numpy as np

from .belief import OUTLIER, MassFunction, decide, members
from .graph_io import GroundTruth
from .propagation import CredalPartition

OUTLIER_LABEL = -1

Label = Union[int, tuple[int, ...]]


@dataclass(frozen=True)
class HardPartition:
    """Per-node community ids.

    ``OUTLIER_LABEL`` marks nodes without a decision. Under ``all_focal`` a
    label may also be a tuple of community ids (an imprecise decision).
    """

    labels: tuple[Label, ...]
    mode: str

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def imprecise(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if isinstance(lab, tuple)]

    @property
    def outliers(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == OUTLIER_LABEL]


def _focal_label(focal: int) -> Label:
    if focal == OUTLIER:
        return OUTLIER_LABEL
    ids = members(focal)
    return ids[0] if len(ids) == 1 else tuple(ids)


def label_of(m: MassFunction, mode: str = "singletons_only") -> Label:
    return _focal_label(decide(m, mode))


def harden(partition: CredalPartition, mode: str = "singletons_only") -> HardPartition:
    return HardPartition(tuple(label_of(m, mode) for m in partition.masses), mode)


def _as_labels(x) -> list[Hashable]:
    if isinstance(x, (HardPartition, GroundTruth)):
        return list(x.labels)
    return list(x)


def nmi(a, b) -> float:
    """Normalized mutual information ``2 I(A;B) / (H(A) + H(B))`` in nats.

    Each ``OUTLIER_LABEL`` node forms its own class. Nodes with imprecise
    labels (in either argument) are left out. Two single-class partitions
    score 1.
    """
    la, lb = _as_labels(a), _as_labels(b)
    if len(la) != len(lb):
        raise ValueError(f"partitions have different sizes: {len(la)} vs {len(lb)}")
    keep = [i for i in range(len(la)) if not isinstance(la[i], tuple) and not isinstance(lb[i], tuple)]
    if not keep:
        raise ValueError("no nodes with precise labels to compare")

    def classes(labels):
        return [("outlier", i) if labels[i] == OUTLIER_LABEL else labels[i] for i in keep]

    ca, cb = classes(la), classes(lb)
    n = len(keep)
    joint = Counter(zip(ca, cb))
    pa, pb = Counter(ca), Counter(cb)

    def entropy(counts):
        p = np.array(list(counts.values()), dtype=np.float64) / n
        return float(-np.sum(p * np.log(p)))

    ha, hb = entropy(pa), entropy(pb)
    if ha + hb == 0:
        return 1.0
    mi = 0.0
    for (x, y), nxy in joint.items():
        mi += nxy / n * np.log(nxy * n / (pa[x] * pb[y]))
    return float(min(max(2.0 * mi / (ha + hb), 0.0), 1.0))


def contingency_csv(a, b) -> str:
    """Predicted classes as rows, reference classes as columns."""
    la, lb = _as_labels(a), _as_labels(b)
    if len(la) != len(lb):
        raise ValueError(f"partitions have different sizes: {len(la)} vs {len(lb)}")

    def name(lab):
        if isinstance(lab, tuple):
            return "{" + " ".join(map(str, lab)) + "}"
        return "outlier" if lab == OUTLIER_LABEL else str(lab)

    rows = sorted({name(x) for x in la})
    cols = sorted({name(y) for y in lb})
    counts = Counter((name(x), name(y)) for x, y in zip(la, lb))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["predicted", *cols])
    for r in rows:
        writer.writerow([r, *(counts[(r, col)] for col in cols)])
    return buf.getvalue()
