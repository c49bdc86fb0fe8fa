"""Command line interface: ``edpc decision-graph | detect | eval``.

Exit codes: 0 success, 1 validation or domain error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .belief import MassFunction
from .density import decision_graph_csv, node_stats
from .dissimilarity import DEFAULT_T_STEPS, graph_dissimilarity
from .evaluation import OUTLIER_LABEL, HardPartition, contingency_csv, harden, label_of, nmi
from .graph_io import Graph, GroundTruth, load_gml, load_labels, read_graph
from .propagation import CredalPartition, PropagationParams, detect


class UsageError(ValueError):
    pass


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="graph file")
    p.add_argument(
        "--format",
        choices=("edge-list", "gml"),
        default=None,
        help="graph format (default: gml for *.gml, else edge-list)",
    )
    p.add_argument(
        "--indexing",
        choices=("zero", "one"),
        default="zero",
        help="first node id of an edge list (default: %(default)s)",
    )
    p.add_argument(
        "--t-steps", type=int, default=DEFAULT_T_STEPS, help="signal propagation steps (default: %(default)s)"
    )
    p.add_argument("--output", help="output file (default: stdout)")


def _parse_gamma(text: str) -> float | None:
    if text == "auto":
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a number, got {text!r}") from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edpc", description="Evidential density-peaks community detection")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    dg = sub.add_parser("decision-graph", help="write the decision-graph CSV")
    _add_graph_args(dg)

    det = sub.add_parser("detect", help="compute the credal partition")
    _add_graph_args(det)
    det.add_argument("--beta", type=float, default=2.0, help="distance exponent (default: %(default)s)")
    det.add_argument(
        "--gamma", type=_parse_gamma, default=None, metavar="auto|VALUE", help="distance scale (default: auto)"
    )
    group = det.add_mutually_exclusive_group(required=True)
    group.add_argument("--communities", type=int, help="number of communities")
    group.add_argument("--centers", help="comma-separated node ids to use as centers")
    det.add_argument(
        "--reliability",
        choices=("max_normalized", "paper_eq15"),
        default="max_normalized",
        help="group reliability rule (default: %(default)s)",
    )

    ev = sub.add_parser("eval", help="score a partition JSON against ground truth")
    ev.add_argument("--input", required=True, help="partition JSON written by detect")
    ev.add_argument("--labels", required=True, help="labels file ('node label' lines) or GML with node values")
    ev.add_argument(
        "--mode",
        choices=("singletons_only", "all_focal"),
        default="singletons_only",
        help="hard decision used for scoring (default: %(default)s)",
    )
    ev.add_argument("--output", help="optional contingency table CSV")
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load(args) -> Graph:
    graph, _ = read_graph(args.input, args.format, args.indexing)
    if graph.n == 0:
        raise UsageError("graph has no nodes")
    return graph


def cmd_decision_graph(args) -> int:
    graph = _load(args)
    d = graph_dissimilarity(graph, args.t_steps)
    _write(decision_graph_csv(node_stats(graph, d), graph.node_names), args.output)
    return 0


def _label_json(label):
    if label == OUTLIER_LABEL:
        return "outlier"
    return list(label) if isinstance(label, tuple) else label


def partition_to_json(graph: Graph, partition: CredalPartition, params: PropagationParams) -> dict:
    all_focal = harden(partition, "all_focal").labels
    singles = harden(partition, "singletons_only").labels
    return {
        "centers": [graph.node_names[i] for i in partition.centers],
        "communities": partition.c,
        "parameters": {
            "t_steps": params.t_steps,
            "beta": params.beta,
            "gamma": "auto" if params.gamma is None else params.gamma,
            "reliability": params.reliability,
        },
        "nodes": [
            {
                "id": graph.node_names[i],
                "bba": m.to_json(),
                "hard_all_focal": _label_json(all_focal[i]),
                "hard_singleton": _label_json(singles[i]),
            }
            for i, m in enumerate(partition.masses)
        ],
    }


def cmd_detect(args) -> int:
    graph = _load(args)
    params = PropagationParams(
        beta=args.beta, gamma=args.gamma, t_steps=args.t_steps, reliability=args.reliability
    )
    centers = None
    if args.centers is not None:
        centers = [graph.index_of(tok.strip()) for tok in args.centers.split(",") if tok.strip()]
    partition = detect(graph, params, communities=args.communities, centers=centers)
    doc = partition_to_json(graph, partition, params)
    _write(json.dumps(doc, indent=2) + "\n", args.output)
    outliers = sum(node["hard_singleton"] == "outlier" for node in doc["nodes"])
    summary = sys.stdout if args.output else sys.stderr
    print(f"centers: {' '.join(doc['centers'])}", file=summary)
    print(f"outliers: {outliers}", file=summary)
    return 0


def _read_truth(path: str, ids: list[str]) -> dict[str, int]:
    text = Path(path).read_text(encoding="utf-8")
    if path.lower().endswith(".gml"):
        graph, truth = load_gml(text)
        if truth is None:
            raise UsageError(f"{path}: GML nodes carry no 'value' attribute")
    else:
        graph = Graph.from_edges(len(ids), [], ids)
        truth = load_labels(text, graph)
    return dict(zip(graph.node_names, truth.labels))


def cmd_eval(args) -> int:
    doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
    try:
        c = int(doc["communities"])
        nodes = doc["nodes"]
        ids = [str(node["id"]) for node in nodes]
        masses = [MassFunction.from_json(node["bba"], c) for node in nodes]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.input}: malformed partition JSON ({exc})") from None
    truth = _read_truth(args.labels, ids)
    if set(truth) != set(ids):
        raise UsageError("node sets of partition and ground truth differ")
    predicted = HardPartition(tuple(label_of(m, args.mode) for m in masses), args.mode)
    reference = GroundTruth(tuple(truth[i] for i in ids))
    print(f"{nmi(predicted, reference):.4f}")
    if args.output:
        _write(contingency_csv(predicted, reference), args.output)
    return 0


COMMANDS = {"decision-graph": cmd_decision_graph, "detect": cmd_detect, "eval": cmd_eval}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        print(f"edpc: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"edpc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
