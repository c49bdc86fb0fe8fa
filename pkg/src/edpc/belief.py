"""Mass functions over community frames with an open-world outlier element.

Focal elements are integer bitmasks over the ``c`` communities: bit ``t``
stands for community ``t``. The empty bitmask is never a valid subset, so
``OUTLIER = 0`` is used for the distinguished outlier element. It is kept
apart from the full set ``(1 << c) - 1``: the full set means "belongs to one
of the known communities, can't tell which", the outlier element means total
ignorance in an open world. In combinations the outlier element behaves as
total ignorance, i.e. it intersects every focal element to that element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

OUTLIER = 0

SUM_TOL = 1e-9
PRUNE_TOL = 1e-12
MAX_FRAME = 30

RELIABILITY_RULES = ("max_normalized", "paper_eq15")


class MassError(ValueError):
    """Invalid mass function content."""


class TotalConflictError(ValueError):
    """Dempster's rule is undefined when the two sources fully conflict."""


def singleton(t: int) -> int:
    return 1 << t


def full_set(c: int) -> int:
    return (1 << c) - 1


def members(focal: int) -> list[int]:
    """Community ids contained in a subset bitmask (empty for the outlier element)."""
    return [t for t in range(focal.bit_length()) if focal >> t & 1]


def is_singleton(focal: int) -> bool:
    return focal != OUTLIER and focal & (focal - 1) == 0


def _sort_key(focal: int) -> tuple[int, int]:
    # subsets by bitmask, outlier element last
    return (1, 0) if focal == OUTLIER else (0, focal)


@dataclass(frozen=True, eq=False)
class MassFunction:
    """A basic belief assignment. Use :func:`make_mass` or the class helpers to build one."""

    masses: Mapping[int, float]
    frame_size: int

    def __post_init__(self):
        c = self.frame_size
        if not 1 <= c <= MAX_FRAME:
            raise MassError(f"frame size must be in [1, {MAX_FRAME}], got {c}")
        limit = full_set(c)
        total = 0.0
        for focal, mass in self.masses.items():
            if focal < 0 or focal > limit:
                raise MassError(f"focal element {focal:#b} does not fit a frame of {c}")
            if not mass > 0 or not math.isfinite(mass):
                raise MassError(f"stored masses must be positive, got {mass!r}")
            total += mass
        if abs(total - 1.0) > SUM_TOL:
            raise MassError(f"masses sum to {total!r}, expected 1")

    @classmethod
    def vacuous(cls, c: int) -> "MassFunction":
        return cls({OUTLIER: 1.0}, c)

    @classmethod
    def categorical(cls, focal: int, c: int) -> "MassFunction":
        return cls({focal: 1.0}, c)

    @classmethod
    def simple(cls, focal: int, weight: float, c: int) -> "MassFunction":
        """``weight`` on ``focal``, the rest on the outlier element.

        Weights below the pruning threshold collapse to the vacuous mass.
        """
        if not 0.0 <= weight <= 1.0:
            raise MassError(f"weight must be in [0, 1], got {weight!r}")
        return _normalized({focal: weight, OUTLIER: 1.0 - weight}, c)

    def __getitem__(self, focal: int) -> float:
        return self.masses.get(focal, 0.0)

    def __eq__(self, other):
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.frame_size == other.frame_size and dict(self.masses) == dict(other.masses)

    def __hash__(self):
        return hash((self.frame_size, frozenset(self.masses.items())))

    def focal_elements(self) -> list[int]:
        return sorted(self.masses, key=_sort_key)

    def items(self) -> list[tuple[int, float]]:
        return [(f, self.masses[f]) for f in self.focal_elements()]

    @property
    def is_vacuous(self) -> bool:
        return set(self.masses) == {OUTLIER}

    def isclose(self, other: "MassFunction", tol: float = 1e-9) -> bool:
        keys = set(self.masses) | set(other.masses)
        return self.frame_size == other.frame_size and all(
            abs(self[k] - other[k]) <= tol for k in keys
        )

    def to_json(self) -> list[dict]:
        return [
            {"focal": "outlier" if f == OUTLIER else members(f), "mass": m}
            for f, m in self.items()
        ]

    @classmethod
    def from_json(cls, data: Sequence[Mapping], c: int) -> "MassFunction":
        entries = []
        for item in data:
            focal = item["focal"]
            if focal == "outlier":
                key = OUTLIER
            else:
                if not focal:
                    raise MassError("empty focal element")
                key = 0
                for t in focal:
                    key |= singleton(int(t))
            entries.append((key, float(item["mass"])))
        return make_mass(entries, c)

    def __repr__(self):
        parts = []
        for f, m in self.items():
            name = "O*" if f == OUTLIER else "{" + ",".join(f"w{t + 1}" for t in members(f)) + "}"
            parts.append(f"{name}: {m:.4g}")
        return f"MassFunction({', '.join(parts)}; c={self.frame_size})"


def make_mass(entries: Iterable[tuple[int, float]], c: int) -> MassFunction:
    """Build a mass function, merging repeated focal elements and dropping zeros.

    No renormalization happens here: entries must already sum to one.
    """
    acc: dict[int, float] = {}
    for focal, mass in entries:
        mass = float(mass)
        if mass < 0 or math.isnan(mass):
            raise MassError(f"negative mass {mass!r} on {focal:#b}")
        acc[int(focal)] = acc.get(int(focal), 0.0) + mass
    return MassFunction({f: m for f, m in acc.items() if m > 0}, c)


def _normalized(acc: dict[int, float], c: int) -> MassFunction:
    kept = {f: m for f, m in acc.items() if m >= PRUNE_TOL}
    total = math.fsum(kept.values())
    return MassFunction({f: m / total for f, m in kept.items()}, c)


def _check_frames(m1: MassFunction, m2: MassFunction) -> int:
    if m1.frame_size != m2.frame_size:
        raise MassError(f"frame sizes differ: {m1.frame_size} vs {m2.frame_size}")
    return m1.frame_size


def _conjunctive(m1: MassFunction, m2: MassFunction, to_union: bool):
    acc: dict[int, float] = {}
    conflict = 0.0
    for a, ma in m1.items():
        for b, mb in m2.items():
            p = ma * mb
            if a == OUTLIER:
                key = b
            elif b == OUTLIER:
                key = a
            else:
                key = a & b
                if key == 0:
                    if not to_union:
                        conflict += p
                        continue
                    key = a | b
            acc[key] = acc.get(key, 0.0) + p
    return acc, conflict


def dempster_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Conjunctive combination with the conflicting mass renormalized away."""
    c = _check_frames(m1, m2)
    acc, conflict = _conjunctive(m1, m2, to_union=False)
    if not acc or conflict >= 1.0 - PRUNE_TOL:
        raise TotalConflictError(f"total conflict (K={conflict!r})")
    return _normalized(acc, c)


def dubois_prade_combine(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Conjunctive combination sending the product of disjoint pairs to their union."""
    c = _check_frames(m1, m2)
    acc, _ = _conjunctive(m1, m2, to_union=True)
    return _normalized(acc, c)


def discount(m: MassFunction, alpha: float) -> MassFunction:
    """Keep a fraction ``alpha`` of every mass and move the rest to the outlier element."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"discount factor must be in [0, 1], got {alpha!r}")
    acc = {f: alpha * v for f, v in m.masses.items()}
    acc[OUTLIER] = acc.get(OUTLIER, 0.0) + (1.0 - alpha)
    return _normalized(acc, m.frame_size)


def group_key(m: MassFunction) -> int:
    """Non-outlier focal element with the largest mass; ties go to the smaller bitmask."""
    best = None
    for f, v in m.items():
        if f == OUTLIER:
            continue
        if best is None or v > m[best]:
            best = f
    return OUTLIER if best is None else best


def combine_neighbor_evidence(
    bbas: Sequence[MassFunction], reliability: str = "max_normalized"
) -> MassFunction:
    """Fuse neighbour evidence in two stages.

    Inputs are grouped by :func:`group_key` and each group is fused with
    Dempster's rule. Every group result is then discounted by its
    reliability, derived from the group size ``s_k``: ``s_k / max(s)`` under
    ``"max_normalized"``, ``s_k / sum(s)`` under ``"paper_eq15"``. The
    discounted group results are fused with the Dubois-Prade rule in
    ascending bitmask order.

    Vacuous inputs carry no evidence and are skipped.
    """
    if not bbas:
        raise ValueError("combine_neighbor_evidence needs at least one mass function")
    if reliability not in RELIABILITY_RULES:
        raise ValueError(f"unknown reliability rule {reliability!r}")
    c = bbas[0].frame_size
    groups: dict[int, list[MassFunction]] = {}
    for m in bbas:
        if m.frame_size != c:
            raise MassError("all evidence must share one frame")
        if m.is_vacuous:
            continue
        groups.setdefault(group_key(m), []).append(m)
    if not groups:
        return MassFunction.vacuous(c)

    sizes = {k: len(g) for k, g in groups.items()}
    norm = max(sizes.values()) if reliability == "max_normalized" else sum(sizes.values())
    result = None
    for key in sorted(groups):
        fused = groups[key][0]
        for m in groups[key][1:]:
            fused = dempster_combine(fused, m)
        fused = discount(fused, sizes[key] / norm)
        result = fused if result is None else dubois_prade_combine(result, fused)
    return result


def decide(m: MassFunction, mode: str = "all_focal") -> int:
    """Focal element with maximal mass.

    ``all_focal`` considers every focal element. ``singletons_only``
    considers single communities and returns ``OUTLIER`` when none has mass.
    Ties go to the smaller bitmask, with the outlier element last.
    """
    if mode == "all_focal":
        candidates = m.focal_elements()
    elif mode == "singletons_only":
        candidates = [f for f in m.focal_elements() if is_singleton(f)]
        if not candidates:
            return OUTLIER
    else:
        raise ValueError(f"unknown decision mode {mode!r}")
    best = candidates[0]
    for f in candidates[1:]:
        if m[f] > m[best]:
            best = f
    return best
