import os
import sys
from pathlib import Path

import pytest

from edpc.graph_io import Graph, load_edge_list, read_graph

sys.path.insert(0, str(Path(__file__).parent))

REPO = Path(__file__).resolve().parent.parent


def data_dir() -> Path:
    return Path(os.environ.get("EDPC_DATA_DIR", REPO / "data"))


# Plausible reconstruction of the two-community illustrative graph: hubs 5
# and 10, leaves 1-4 / 6-9 on a ring around each hub, node 11 bridging 3 and 6.
ELEVEN_NODE_EDGES = """\
5 1
5 2
5 3
5 4
1 2
2 3
3 4
4 1
10 6
10 7
10 8
10 9
6 7
7 8
8 9
9 6
3 11
6 11
"""


@pytest.fixture
def p3() -> Graph:
    return load_edge_list("0 1\n1 2")


@pytest.fixture
def eleven() -> Graph:
    return load_edge_list(ELEVEN_NODE_EDGES, indexing="one")


@pytest.fixture(scope="session")
def karate():
    return read_graph(REPO / "data" / "karate.gml")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
