import os

import numpy as np
import pytest

from sg2v.graphs import Graph, GraphDataset

# P3 fixture used throughout: a - b - c with labels A, B, A
P3_NODES = {0: "A", 1: "B", 2: "A"}
P3_EDGES = frozenset({(0, 1), (1, 2)})


@pytest.fixture
def p3() -> Graph:
    return Graph(0, 3, P3_EDGES, dict(P3_NODES))


@pytest.fixture
def p3_dataset(p3) -> GraphDataset:
    return GraphDataset.from_graphs("p3", [p3])


@pytest.fixture
def single_node_a() -> Graph:
    return Graph(0, 1, frozenset(), {0: "A"})


def _dataset_dir(name: str) -> str | None:
    """Locate a benchmark directory <root>/<name>/<name>_A.txt."""
    roots = []
    env = os.environ.get("SG2V_DATA")
    if env:
        roots.append(env)
    roots += ["data", "datasets", os.path.join(os.path.dirname(__file__), "..", "data")]
    for root in roots:
        candidate = os.path.join(root, name)
        if os.path.isfile(os.path.join(candidate, f"{name}_A.txt")):
            return candidate
    return None


@pytest.fixture(scope="session")
def mutag_dir() -> str:
    path = _dataset_dir("MUTAG")
    if path is None:
        pytest.skip(
            "MUTAG not found: place the benchmark files under data/MUTAG/ "
            "(or point SG2V_DATA at their parent directory)"
        )
    return path


@pytest.fixture(scope="session")
def ptc_dir() -> str:
    path = _dataset_dir("PTC")
    if path is None:
        pytest.skip(
            "PTC not found: place the benchmark files under data/PTC/ "
            "(or point SG2V_DATA at their parent directory)"
        )
    return path


def write_tu(tmp_path, name, indicator, edges, graph_labels, node_labels=None):
    """Write a benchmark-layout dataset into tmp_path and return the directory."""
    d = tmp_path / name
    d.mkdir(exist_ok=True)
    (d / f"{name}_graph_indicator.txt").write_text("".join(f"{i}\n" for i in indicator))
    (d / f"{name}_A.txt").write_text("".join(f"{u}, {v}\n" for u, v in edges))
    (d / f"{name}_graph_labels.txt").write_text("".join(f"{x}\n" for x in graph_labels))
    if node_labels is not None:
        (d / f"{name}_node_labels.txt").write_text("".join(f"{x}\n" for x in node_labels))
    return str(d)


def random_permutation_of(g: Graph, rng: np.random.Generator) -> Graph:
    perm = list(rng.permutation(g.num_nodes))
    from sg2v.graphs import permute_graph

    return permute_graph(g, [int(x) for x in perm])
