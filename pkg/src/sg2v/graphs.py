"""Graph data model and dataset ingestion.

Graphs are simple node-labeled graphs with dense 0-based node ids. Datasets
are loaded either from the common benchmark directory layout (``<name>_A.txt``
+ indicator/label files) or from a JSON-lines file with one graph per line.
Both loaders are fully deterministic: the same files always produce an
identical in-memory dataset.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import ArgumentError, BoundsError, EmptyDatasetError, FormatError


@dataclass(frozen=True)
class Graph:
    """A node-labeled graph.

    ``edges`` holds unordered pairs stored as (min, max) tuples for undirected
    graphs and (src, dst) tuples when ``directed`` is set. Self-loops are kept
    as-is; parallel edges collapse (set semantics).
    """

    graph_id: int
    num_nodes: int
    edges: frozenset[tuple[int, int]]
    node_labels: dict[int, str]
    class_label: str | None = None
    directed: bool = False
    # original ids from the source file, for error messages only
    source_node_ids: tuple[int, ...] | None = field(default=None, compare=False)

    @property
    def nodes(self) -> range:
        return range(self.num_nodes)

    def _adjacency(self) -> list[list[int]]:
        adj = self.__dict__.get("_adj")
        if adj is None:
            adj = [[] for _ in range(self.num_nodes)]
            for u, v in self.edges:
                adj[u].append(v)
                if not self.directed and u != v:
                    adj[v].append(u)
            for lst in adj:
                lst.sort()
            object.__setattr__(self, "_adj", adj)
        return adj

    def neighbors(self, v: int) -> list[int]:
        """Adjacent node ids in ascending order (out-neighbors if directed)."""
        if not 0 <= v < self.num_nodes:
            raise BoundsError(f"node id {v} out of range [0, {self.num_nodes})")
        return self._adjacency()[v]

    def degree(self, v: int) -> int:
        """Node degree; a self-loop counts twice on undirected graphs."""
        d = len(self.neighbors(v))
        if not self.directed and (v, v) in self.edges:
            d += 1
        return d


def neighbors(g: Graph, v: int) -> list[int]:
    return g.neighbors(v)


def degree_relabel(g: Graph) -> Graph:
    """Return a copy of ``g`` whose node labels are the decimal node degrees."""
    labels = {v: str(g.degree(v)) for v in g.nodes}
    return Graph(
        graph_id=g.graph_id,
        num_nodes=g.num_nodes,
        edges=g.edges,
        node_labels=labels,
        class_label=g.class_label,
        directed=g.directed,
        source_node_ids=g.source_node_ids,
    )


@dataclass(frozen=True)
class GraphDataset:
    name: str
    graphs: tuple[Graph, ...]
    label_alphabet: tuple[str, ...]
    class_alphabet: tuple[str, ...]

    @classmethod
    def from_graphs(cls, name: str, graphs: list[Graph]) -> "GraphDataset":
        if [g.graph_id for g in graphs] != list(range(len(graphs))):
            raise ArgumentError("graph ids must be dense 0..n-1 in list order")
        labels = sorted({lab for g in graphs for lab in g.node_labels.values()})
        classes = sorted({g.class_label for g in graphs if g.class_label is not None})
        return cls(name, tuple(graphs), tuple(labels), tuple(classes))

    def __len__(self) -> int:
        return len(self.graphs)

    def class_labels(self) -> list[str | None]:
        return [g.class_label for g in self.graphs]


def _canonical_edge(u: int, v: int, directed: bool) -> tuple[int, int]:
    if directed or u <= v:
        return (u, v)
    return (v, u)


def _read_int_lines(path: str, what: str) -> list[int]:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: expected an integer {what}, got {line!r}")
    return values


def load_tu_dataset(directory: str, name: str, directed: bool = False) -> GraphDataset:
    """Load a dataset in the benchmark directory format.

    Mandatory files: ``<name>_A.txt`` (edge list ``i, j`` with 1-based global
    node ids), ``<name>_graph_indicator.txt`` (graph number per node) and
    ``<name>_graph_labels.txt``. ``<name>_node_labels.txt`` is optional; when
    absent every graph is relabeled with node degrees.
    """
    def fpath(suffix: str) -> str:
        return os.path.join(directory, f"{name}_{suffix}.txt")

    for suffix in ("A", "graph_indicator", "graph_labels"):
        if not os.path.isfile(fpath(suffix)):
            raise FormatError(f"missing mandatory file {fpath(suffix)}")

    indicator = _read_int_lines(fpath("graph_indicator"), "graph number")
    if not indicator:
        raise EmptyDatasetError(f"{fpath('graph_indicator')} lists no nodes")

    graph_numbers = sorted(set(indicator))
    graph_index = {num: i for i, num in enumerate(graph_numbers)}
    n_graphs = len(graph_numbers)

    # global 1-based node id -> (graph, local 0-based id)
    local_of: dict[int, tuple[int, int]] = {}
    node_counts = [0] * n_graphs
    source_ids: list[list[int]] = [[] for _ in range(n_graphs)]
    for global_id, num in enumerate(indicator, start=1):
        gi = graph_index[num]
        local_of[global_id] = (gi, node_counts[gi])
        node_counts[gi] += 1
        source_ids[gi].append(global_id)

    edge_sets: list[set[tuple[int, int]]] = [set() for _ in range(n_graphs)]
    apath = fpath("A")
    with open(apath, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise FormatError(f"{apath}:{lineno}: expected 'i, j', got {line!r}")
            try:
                u_glob, v_glob = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError(f"{apath}:{lineno}: non-integer endpoint in {line!r}")
            if u_glob not in local_of or v_glob not in local_of:
                raise FormatError(f"{apath}:{lineno}: edge references unknown node in {line!r}")
            gu, u = local_of[u_glob]
            gv, v = local_of[v_glob]
            if gu != gv:
                raise FormatError(
                    f"{apath}:{lineno}: edge {line!r} connects nodes of different graphs"
                )
            edge_sets[gu].add(_canonical_edge(u, v, directed))

    graph_labels = _read_int_lines(fpath("graph_labels"), "graph label")
    if len(graph_labels) != n_graphs:
        raise FormatError(
            f"{fpath('graph_labels')}: {len(graph_labels)} labels for {n_graphs} graphs"
        )

    node_labels: list[int] | None = None
    if os.path.isfile(fpath("node_labels")):
        node_labels = _read_int_lines(fpath("node_labels"), "node label")
        if len(node_labels) != len(indicator):
            raise FormatError(
                f"{fpath('node_labels')}: {len(node_labels)} labels for {len(indicator)} nodes"
            )

    graphs = []
    for gi in range(n_graphs):
        labels: dict[int, str] = {}
        if node_labels is not None:
            for local, global_id in enumerate(source_ids[gi]):
                labels[local] = str(node_labels[global_id - 1])
        g = Graph(
            graph_id=gi,
            num_nodes=node_counts[gi],
            edges=frozenset(edge_sets[gi]),
            node_labels=labels,
            class_label=str(graph_labels[gi]),
            directed=directed,
            source_node_ids=tuple(source_ids[gi]),
        )
        if node_labels is None:
            g = degree_relabel(g)
        graphs.append(g)

    if not graphs:
        raise EmptyDatasetError(f"dataset {name} has no graphs")
    return GraphDataset.from_graphs(name, graphs)


def load_jsonl(path: str, directed: bool = False, name: str | None = None) -> GraphDataset:
    """Load a dataset from a JSON-lines file.

    Each line is an object with ``edges`` (list of node-id pairs),
    ``node_labels`` (list of strings, index = node id) and an optional
    ``class`` string.
    """
    graphs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})")
            if not isinstance(obj, dict) or "edges" not in obj or "node_labels" not in obj:
                raise FormatError(f"{path}:{lineno}: object must have 'edges' and 'node_labels'")
            raw_labels = obj["node_labels"]
            if not isinstance(raw_labels, list):
                raise FormatError(f"{path}:{lineno}: 'node_labels' must be a list")
            n = len(raw_labels)
            edges = set()
            for pair in obj["edges"]:
                if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    raise FormatError(f"{path}:{lineno}: edge {pair!r} is not a pair")
                u, v = pair
                if not (isinstance(u, int) and isinstance(v, int)):
                    raise FormatError(f"{path}:{lineno}: edge {pair!r} has non-integer endpoint")
                if not (0 <= u < n and 0 <= v < n):
                    raise FormatError(f"{path}:{lineno}: edge {pair!r} references unknown node")
                edges.add(_canonical_edge(u, v, directed))
            cls = obj.get("class")
            graphs.append(
                Graph(
                    graph_id=len(graphs),
                    num_nodes=n,
                    edges=frozenset(edges),
                    node_labels={i: str(lab) for i, lab in enumerate(raw_labels)},
                    class_label=None if cls is None else str(cls),
                    directed=directed,
                )
            )
    if not graphs:
        raise EmptyDatasetError(f"{path} contains no graphs")
    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]
    return GraphDataset.from_graphs(name, graphs)


def write_jsonl(ds: GraphDataset, path: str) -> None:
    """Write a dataset in the JSON-lines format accepted by load_jsonl."""
    with open(path, "w", encoding="utf-8") as fh:
        for g in ds.graphs:
            obj = {
                "edges": sorted([u, v] for u, v in g.edges),
                "node_labels": [g.node_labels[v] for v in g.nodes],
            }
            if g.class_label is not None:
                obj["class"] = g.class_label
            fh.write(json.dumps(obj) + "\n")


def permute_graph(g: Graph, perm: list[int]) -> Graph:
    """Relabel node ids through ``perm`` (old id -> new id). Test helper."""
    if sorted(perm) != list(range(g.num_nodes)):
        raise ArgumentError(f"perm is not a permutation of 0..{g.num_nodes - 1}")
    edges = frozenset(_canonical_edge(perm[u], perm[v], g.directed) for u, v in g.edges)
    labels = {perm[v]: lab for v, lab in g.node_labels.items()}
    return Graph(
        graph_id=g.graph_id,
        num_nodes=g.num_nodes,
        edges=edges,
        node_labels=labels,
        class_label=g.class_label,
        directed=g.directed,
    )
