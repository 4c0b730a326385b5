"""Synthetic graph corpora with planted family structure.

Used by the clustering benchmark and by training sanity checks: families
differ in both structure (rings / stars / chains) and node-label motifs, and
a fraction of edges is randomly toggled as noise.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError
from .graphs import Graph, GraphDataset


def _ring(n: int) -> tuple[set[tuple[int, int]], list[str]]:
    edges = {(i, (i + 1) % n) for i in range(n)}
    edges = {(min(u, v), max(u, v)) for u, v in edges}
    labels = ["R1" if i % 2 == 0 else "R2" for i in range(n)]
    return edges, labels


def _star(n: int) -> tuple[set[tuple[int, int]], list[str]]:
    edges = {(0, i) for i in range(1, n)}
    labels = ["HUB"] + ["LEAF"] * (n - 1)
    return edges, labels


def _chain(n: int) -> tuple[set[tuple[int, int]], list[str]]:
    edges = {(i, i + 1) for i in range(n - 1)}
    labels = [("C1", "C2", "C3")[i % 3] for i in range(n)]
    return edges, labels


_FAMILIES = (("ring", _ring), ("star", _star), ("chain", _chain))


def _apply_edge_noise(
    edges: set[tuple[int, int]], n: int, noise: float, rng: np.random.Generator
) -> set[tuple[int, int]]:
    """Toggle ~noise * |E| random node pairs (no self-loops)."""
    flips = int(round(noise * len(edges)))
    out = set(edges)
    for _ in range(flips):
        u = int(rng.integers(n))
        v = int(rng.integers(n))
        if u == v:
            continue
        pair = (min(u, v), max(u, v))
        if pair in out:
            if len(out) > 1:
                out.remove(pair)
        else:
            out.add(pair)
    return out


def make_planted_families(
    per_family: int = 30,
    noise: float = 0.1,
    seed: int = 7,
    size_range: tuple[int, int] = (8, 14),
) -> GraphDataset:
    """Three structurally and label-wise distinct graph families with edge noise.

    Class labels carry the planted family name, so the dataset doubles as
    clustering ground truth.
    """
    if per_family < 1:
        raise ArgumentError("per_family must be >= 1")
    rng = np.random.default_rng(seed)
    graphs: list[Graph] = []
    for fam_name, builder in _FAMILIES:
        for _ in range(per_family):
            n = int(rng.integers(size_range[0], size_range[1] + 1))
            edges, labels = builder(n)
            edges = _apply_edge_noise(edges, n, noise, rng)
            graphs.append(
                Graph(
                    graph_id=len(graphs),
                    num_nodes=n,
                    edges=frozenset(edges),
                    node_labels=dict(enumerate(labels)),
                    class_label=fam_name,
                )
            )
    order = rng.permutation(len(graphs))
    reordered = [
        Graph(
            graph_id=i,
            num_nodes=graphs[j].num_nodes,
            edges=graphs[j].edges,
            node_labels=graphs[j].node_labels,
            class_label=graphs[j].class_label,
        )
        for i, j in enumerate(int(x) for x in order)
    ]
    return GraphDataset.from_graphs("planted3", reordered)


def make_two_family_corpus(
    per_family: int = 10, seed: int = 3, size_range: tuple[int, int] = (5, 8)
) -> GraphDataset:
    """Stars of "A"-labeled nodes vs paths of "B"-labeled nodes (no noise)."""
    rng = np.random.default_rng(seed)
    graphs: list[Graph] = []
    for _ in range(per_family):
        n = int(rng.integers(size_range[0], size_range[1] + 1))
        edges = {(0, i) for i in range(1, n)}
        graphs.append(
            Graph(
                graph_id=len(graphs),
                num_nodes=n,
                edges=frozenset(edges),
                node_labels={i: "A" for i in range(n)},
                class_label="star",
            )
        )
    for _ in range(per_family):
        n = int(rng.integers(size_range[0], size_range[1] + 1))
        edges = {(i, i + 1) for i in range(n - 1)}
        graphs.append(
            Graph(
                graph_id=len(graphs),
                num_nodes=n,
                edges=frozenset(edges),
                node_labels={i: "B" for i in range(n)},
                class_label="path",
            )
        )
    return GraphDataset.from_graphs("two_families", graphs)


def random_labeled_graph(
    rng: np.random.Generator,
    min_nodes: int = 3,
    max_nodes: int = 10,
    edge_prob: float = 0.4,
    alphabet: tuple[str, ...] = ("A", "B", "C"),
    graph_id: int = 0,
) -> Graph:
    """Erdos-Renyi style random graph with random labels (test helper)."""
    n = int(rng.integers(min_nodes, max_nodes + 1))
    edges = {
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < edge_prob
    }
    labels = {i: alphabet[int(rng.integers(len(alphabet)))] for i in range(n)}
    return Graph(
        graph_id=graph_id,
        num_nodes=n,
        edges=frozenset(edges),
        node_labels=labels,
    )
