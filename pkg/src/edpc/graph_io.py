"""Loading and validation of undirected graphs and ground-truth labels.

Three text formats are understood:

* edge lists, one ``u v`` pair per line, ``#`` comments;
* a GML subset (``node [ id .. label .. value .. ]`` and
  ``edge [ source .. target .. ]``);
* label files, one ``node label`` pair per line.

Node ids are remapped to dense 0-based indices. The original ids are kept in
``Graph.node_names`` for reporting.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


class GraphFormatError(ValueError):
    """Raised when graph or label text cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(ValueError):
    """Raised when parsed content violates a graph or label invariant."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    Self-loops are never stored. Consumers apply the ``a_ii = 1`` convention
    themselves.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[tuple[int, ...], ...] = field(repr=False)
    node_names: tuple[str, ...] = field(repr=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        node_names: Sequence[str] | None = None,
    ) -> "Graph":
        if n < 0:
            raise GraphValidationError(f"negative node count {n}")
        canon: set[tuple[int, int]] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphValidationError(f"edge ({u}, {v}) outside [0, {n})")
            if u == v:
                continue
            canon.add((u, v) if u < v else (v, u))
        neigh: list[list[int]] = [[] for _ in range(n)]
        for u, v in canon:
            neigh[u].append(v)
            neigh[v].append(u)
        if node_names is None:
            node_names = [str(i) for i in range(n)]
        elif len(node_names) != n:
            raise GraphValidationError("node_names length does not match n")
        return cls(
            n=n,
            edges=frozenset(canon),
            adjacency=tuple(tuple(sorted(a)) for a in neigh),
            node_names=tuple(str(s) for s in node_names),
        )

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def index_of(self, name: str) -> int:
        try:
            return self._name_index[str(name)]
        except KeyError:
            raise GraphValidationError(f"unknown node id {name!r}") from None

    @property
    def _name_index(self) -> dict[str, int]:
        cache = self.__dict__.get("_name_index_cache")
        if cache is None:
            cache = {name: i for i, name in enumerate(self.node_names)}
            object.__setattr__(self, "_name_index_cache", cache)
        return cache

    def adjacency_matrix(self, dtype=None):
        """Dense 0/1 adjacency matrix without self-loops."""
        import numpy as np

        a = np.zeros((self.n, self.n), dtype=dtype or np.int64)
        for u, v in self.edges:
            a[u, v] = 1
            a[v, u] = 1
        return a


@dataclass(frozen=True)
class GroundTruth:
    """Reference community label for every node of a graph."""

    labels: tuple[int, ...]
    names: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def num_communities(self) -> int:
        return len(set(self.labels))


def _dense_labels(raw: Sequence[str]) -> GroundTruth:
    ids: dict[str, int] = {}
    out = []
    for r in raw:
        out.append(ids.setdefault(r, len(ids)))
    return GroundTruth(labels=tuple(out), names=tuple(ids))


def _lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def load_edge_list(text: str, indexing: str = "zero", n: int | None = None) -> Graph:
    """Parse a whitespace-separated edge list.

    ``indexing`` is ``"zero"`` or ``"one"``. The node count is ``max index + 1``
    unless ``n`` is given, in which case trailing isolated nodes are kept.
    """
    if indexing not in ("zero", "one"):
        raise ValueError(f"indexing must be 'zero' or 'one', got {indexing!r}")
    offset = 1 if indexing == "one" else 0
    edges = []
    self_loops = 0
    max_idx = -1
    for lineno, line in _lines(text):
        tokens = line.split()
        if len(tokens) < 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"non-integer node id in {line!r}", lineno) from None
        u -= offset
        v -= offset
        if u < 0 or v < 0:
            raise GraphValidationError(f"line {lineno}: negative node index")
        if u == v:
            self_loops += 1
        max_idx = max(max_idx, u, v)
        edges.append((u, v))
    if self_loops:
        warnings.warn(f"dropped {self_loops} self-loop(s)", stacklevel=2)
    count = max_idx + 1
    if n is not None:
        if n < count:
            raise GraphValidationError(f"n={n} smaller than max index + 1 = {count}")
        count = n
    names = [str(i + offset) for i in range(count)]
    return Graph.from_edges(count, edges, names)


def to_edge_list(graph: Graph) -> str:
    """Serialize to zero-indexed edge-list text, one sorted edge per line."""
    return "".join(f"{u} {v}\n" for u, v in sorted(graph.edges))


_GML_TOKEN = re.compile(
    r'\s*(?:(?P<str>"[^"]*")|(?P<open>\[)|(?P<close>\])|(?P<word>[^\s\[\]"]+))'
)


def _gml_tokens(text: str):
    pos = 0
    line = 1
    while pos < len(text):
        m = _GML_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                return
            raise GraphFormatError("unterminated string", line)
        line += text.count("\n", pos, m.start(m.lastgroup))
        kind = m.lastgroup
        value = m.group(kind)
        yield kind, value, line
        line += value.count("\n")
        pos = m.end()


def _parse_gml_tree(text: str) -> list:
    """Parse GML into nested ``[(key, value, line), ...]`` lists."""
    stack: list[list] = [[]]
    key: tuple[str, int] | None = None
    open_lines: list[int] = []
    for kind, value, line in _gml_tokens(text):
        if kind == "open":
            if key is None:
                raise GraphFormatError("'[' without a key", line)
            child: list = []
            stack[-1].append((key[0], child, key[1]))
            stack.append(child)
            open_lines.append(line)
            key = None
        elif kind == "close":
            if key is not None:
                raise GraphFormatError(f"key {key[0]!r} has no value", line)
            if len(stack) == 1:
                raise GraphFormatError("unbalanced ']'", line)
            stack.pop()
            open_lines.pop()
        elif key is None:
            if kind == "str":
                raise GraphFormatError(f"expected a key, got {value}", line)
            key = (value, line)
        else:
            stack[-1].append((key[0], value, key[1]))
            key = None
    if key is not None:
        raise GraphFormatError(f"key {key[0]!r} has no value", key[1])
    if len(stack) != 1:
        raise GraphFormatError("unbalanced '['", open_lines[-1])
    return stack[0]


def _scalar(value: str) -> str:
    if value.startswith('"'):
        return value[1:-1]
    return value


def _gml_id(value, what: str, line: int) -> str:
    if isinstance(value, list):
        raise GraphFormatError(f"{what} must be a scalar", line)
    raw = _scalar(value)
    try:
        num = float(raw)
    except ValueError:
        return raw
    return str(int(num)) if num.is_integer() else raw


def load_gml(text: str) -> tuple[Graph, GroundTruth | None]:
    """Parse the GML subset used by the classic benchmark networks.

    If every node carries a ``value`` attribute the values become the ground
    truth, remapped to dense ids in order of first appearance. Edge weights,
    ``directed`` flags and other attributes are ignored.
    """
    tree = _parse_gml_tree(text)
    graphs = [(v, ln) for k, v, ln in tree if k.lower() == "graph"]
    if not graphs:
        raise GraphFormatError("no 'graph [' block found", 1)
    body, _ = graphs[0]
    if not isinstance(body, list):
        raise GraphFormatError("'graph' must be a block", graphs[0][1])

    names: list[str] = []
    index: dict[str, int] = {}
    values: list[str | None] = []
    raw_edges: list[tuple[str, str, int]] = []
    for key, value, line in body:
        k = key.lower()
        if k == "node":
            if not isinstance(value, list):
                raise GraphFormatError("'node' must be a block", line)
            attrs = {a.lower(): (v, ln) for a, v, ln in value}
            if "id" not in attrs:
                raise GraphFormatError("node without id", line)
            nid = _gml_id(attrs["id"][0], "node id", attrs["id"][1])
            if nid in index:
                raise GraphFormatError(f"duplicate node id {nid}", line)
            index[nid] = len(names)
            names.append(nid)
            val = attrs.get("value")
            if val is not None and isinstance(val[0], list):
                raise GraphFormatError("node value must be a scalar", val[1])
            values.append(None if val is None else _scalar(val[0]))
        elif k == "edge":
            if not isinstance(value, list):
                raise GraphFormatError("'edge' must be a block", line)
            attrs = {a.lower(): (v, ln) for a, v, ln in value}
            for end in ("source", "target"):
                if end not in attrs:
                    raise GraphFormatError(f"edge without {end}", line)
            src = _gml_id(attrs["source"][0], "source", attrs["source"][1])
            dst = _gml_id(attrs["target"][0], "target", attrs["target"][1])
            raw_edges.append((src, dst, line))

    edges = []
    self_loops = 0
    for src, dst, line in raw_edges:
        if src not in index or dst not in index:
            missing = src if src not in index else dst
            raise GraphFormatError(f"edge references unknown node {missing}", line)
        if src == dst:
            self_loops += 1
        edges.append((index[src], index[dst]))
    if self_loops:
        warnings.warn(f"dropped {self_loops} self-loop(s)", stacklevel=2)
    graph = Graph.from_edges(len(names), edges, names)
    truth = None
    if names and all(v is not None for v in values):
        truth = _dense_labels(values)  # type: ignore[arg-type]
    return graph, truth


def load_labels(text: str, graph: Graph) -> GroundTruth:
    """Parse ``node label`` lines into a complete ground truth for ``graph``.

    Node ids are matched against ``graph.node_names``.
    """
    assigned: dict[int, str] = {}
    for lineno, line in _lines(text):
        tokens = line.split()
        if len(tokens) < 2:
            raise GraphFormatError(f"expected 'node label', got {line!r}", lineno)
        try:
            i = graph.index_of(tokens[0])
        except GraphValidationError as exc:
            raise GraphValidationError(f"line {lineno}: {exc}") from None
        label = tokens[1]
        if i in assigned and assigned[i] != label:
            raise GraphValidationError(
                f"line {lineno}: conflicting labels for node {tokens[0]}"
            )
        assigned[i] = label
    missing = [graph.node_names[i] for i in range(graph.n) if i not in assigned]
    if missing:
        shown = ", ".join(missing[:5])
        raise GraphValidationError(f"{len(missing)} node(s) without a label: {shown}")
    return _dense_labels([assigned[i] for i in range(graph.n)])


def read_graph(
    path: str | Path, fmt: str | None = None, indexing: str = "zero"
) -> tuple[Graph, GroundTruth | None]:
    """Read a graph file. ``fmt`` is ``edge-list`` or ``gml``; inferred from suffix.

    ``indexing`` only applies to edge lists.
    """
    path = Path(path)
    if fmt is None:
        fmt = "gml" if path.suffix.lower() == ".gml" else "edge-list"
    text = path.read_text(encoding="utf-8")
    if fmt == "gml":
        return load_gml(text)
    if fmt == "edge-list":
        return load_edge_list(text, indexing), None
    raise ValueError(f"unknown graph format {fmt!r}")
