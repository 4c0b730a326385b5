"""Graph kernels over rooted-subgraph counts.

The plain kernel is the dot product of per-graph subgraph count vectors. The
deep kernel weighs counts by learned subgraph similarity: conceptually
count(G)^T M count(G') with M[i, j] = <emb_i, emb_j>, computed here through
the equivalent low-rank factorization M = E E^T, i.e. a dot product of
count-weighted embedding sums. An audit path materializes M directly and
checks both routes agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import EmptyDatasetError, FormatError, NumericalError
from .graphs import Graph, GraphDataset
from .training import EmbeddingModel
from .wl import SubgraphVocab, subgraph_count_vector

logger = logging.getLogger(__name__)


@dataclass
class KernelMatrix:
    values: np.ndarray  # symmetric (n, n)
    graph_ids: list[int]
    mode: str  # "wl" or "deep"
    normalized: bool = False
    provenance: dict = field(default_factory=dict)
    degenerate: bool = False  # all-zero kernel from an untrained model

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def eigen_range(self) -> tuple[float, float]:
        eig = np.linalg.eigvalsh(self.values)
        return float(eig[0]), float(eig[-1])

    def psd_within(self, rel_tol: float = 1e-8) -> bool:
        lo, hi = self.eigen_range()
        return lo >= -rel_tol * max(1.0, hi)


def count_matrix(ds: GraphDataset, vocab: SubgraphVocab) -> sp.csr_matrix:
    """Sparse (n_graphs, vocab) matrix of subgraph counts."""
    rows, cols, data = [], [], []
    for i, g in enumerate(ds.graphs):
        for sid, cnt in sorted(subgraph_count_vector(g, vocab).items()):
            rows.append(i)
            cols.append(sid)
            data.append(cnt)
    return sp.csr_matrix(
        (data, (rows, cols)), shape=(len(ds.graphs), len(vocab)), dtype=np.float64
    )


def wl_kernel(ds: GraphDataset, vocab: SubgraphVocab) -> KernelMatrix:
    """Plain subgraph-count kernel: K[i, j] = <count(G_i), count(G_j)>."""
    if len(ds) == 0:
        raise EmptyDatasetError("cannot build a kernel over an empty dataset")
    counts = count_matrix(ds, vocab)
    values = np.asarray((counts @ counts.T).todense(), dtype=np.float64)
    return KernelMatrix(
        values=values,
        graph_ids=[g.graph_id for g in ds.graphs],
        mode="wl",
        provenance={"vocab": vocab.fingerprint(), "dataset": ds.name},
    )


def graph_embedding(g: Graph, vocab: SubgraphVocab, model: EmbeddingModel) -> np.ndarray:
    """Count-weighted sum of the graph's subgraph embeddings (dim-vector)."""
    vec = np.zeros(model.input.shape[1])
    for sid, cnt in subgraph_count_vector(g, vocab).items():
        vec += cnt * model.input[sid]
    return vec


def deep_wl_kernel(
    ds: GraphDataset,
    vocab: SubgraphVocab,
    model: EmbeddingModel,
    audit: bool = False,
) -> KernelMatrix:
    """Embedding-weighted kernel: K[i, j] = <emb(G_i), emb(G_j)>.

    With ``audit`` the quadratic-size similarity matrix M is materialized and
    count^T M count is compared against the factorized path; disagreement
    beyond 1e-6 relative raises NumericalError. An all-zero (untrained)
    embedding matrix yields an all-zero kernel flagged as degenerate.
    """
    if len(ds) == 0:
        raise EmptyDatasetError("cannot build a kernel over an empty dataset")
    counts = count_matrix(ds, vocab)
    emb = np.asarray(counts @ model.input)  # (n, dim)
    values = emb @ emb.T
    degenerate = not np.any(model.input)
    if degenerate:
        logger.warning("embedding matrix is all-zero; deep kernel is degenerate")
    if audit:
        reference = materialized_deep_kernel(ds, vocab, model)
        scale = max(1.0, float(np.abs(reference).max()))
        if np.abs(values - reference).max() > 1e-6 * scale:
            raise NumericalError("factorized and materialized deep kernels disagree")
    return KernelMatrix(
        values=values,
        graph_ids=[g.graph_id for g in ds.graphs],
        mode="deep",
        provenance={"vocab": vocab.fingerprint(), "dataset": ds.name, "dim": model.input.shape[1]},
        degenerate=degenerate,
    )


def materialized_deep_kernel(
    ds: GraphDataset, vocab: SubgraphVocab, model: EmbeddingModel
) -> np.ndarray:
    """Audit route: build M[i, j] = <emb_i, emb_j> explicitly, then count^T M count."""
    counts = count_matrix(ds, vocab)
    similarity = model.input @ model.input.T  # (vocab, vocab)
    return np.asarray(counts @ similarity @ counts.T)


def normalize_kernel(kernel: KernelMatrix) -> KernelMatrix:
    """Cosine-normalize: K'[i, j] = K[i, j] / sqrt(K[i, i] K[j, j]).

    Rows and columns with zero self-similarity become all zero (diagonal
    included). A negative diagonal entry raises NumericalError.
    """
    diag = np.diag(kernel.values).copy()
    if np.any(diag < 0):
        raise NumericalError("kernel has a negative diagonal entry")
    scale = np.sqrt(diag)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = kernel.values / np.outer(scale, scale)
    values[~np.isfinite(values)] = 0.0
    zero = diag == 0
    values[zero, :] = 0.0
    values[:, zero] = 0.0
    return KernelMatrix(
        values=values,
        graph_ids=list(kernel.graph_ids),
        mode=kernel.mode,
        normalized=True,
        provenance=dict(kernel.provenance),
        degenerate=kernel.degenerate,
    )


def save_kernel(kernel: KernelMatrix, path: str) -> None:
    """Write ``n mode normalized``, the graph ids, then the n x n matrix."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{kernel.n} {kernel.mode} {int(kernel.normalized)}\n")
        fh.write(" ".join(str(i) for i in kernel.graph_ids) + "\n")
        for row in kernel.values:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def load_kernel(path: str) -> KernelMatrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise FormatError(f"{path}:1: expected 'n mode normalized' header")
        n, mode, normalized = int(header[0]), header[1], bool(int(header[2]))
        ids_line = fh.readline().split()
        if len(ids_line) != n:
            raise FormatError(f"{path}:2: expected {n} graph ids")
        values = np.zeros((n, n))
        for i in range(n):
            row = fh.readline().split()
            if len(row) != n:
                raise FormatError(f"{path}:{i + 3}: expected {n} values")
            values[i] = [float(x) for x in row]
    return KernelMatrix(
        values=values,
        graph_ids=[int(x) for x in ids_line],
        mode=mode,
        normalized=normalized,
        provenance={"source": path},
    )


def save_kernel_labels(ds: GraphDataset, path: str) -> None:
    """Companion file for downstream tools: one ``graph_id,class`` line per graph."""
    with open(path, "w", encoding="utf-8") as fh:
        for g in ds.graphs:
            fh.write(f"{g.graph_id},{'' if g.class_label is None else g.class_label}\n")


def load_kernel_labels(path: str) -> list[tuple[int, str]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            gid, _, cls = line.partition(",")
            try:
                out.append((int(gid), cls))
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad graph id {gid!r}")
    return out
