"""Skipgram training of rooted-subgraph embeddings over radial contexts.

The context of a degree-d subgraph rooted at v is the multiset of subgraphs
of degrees d-1, d and d+1 rooted at each neighbor of v. Each (target,
context-item) pair is trained with negative sampling: the positive score is
pulled up and k noise subgraphs (never the target, never a context member)
are pushed down. Updates are plain SGD with a linearly decaying learning
rate.

Two embedding matrices are kept: ``input`` holds the learned representations
consumed downstream, ``output`` holds the context vectors and is discarded
after training.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import expit

from .errors import ArgumentError, ConfigError, FormatError, NumericalError
from .graphs import Graph, GraphDataset
from .wl import SubgraphVocab, encoding_id_table

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingConfig:
    max_degree: int = 2
    dim: int = 32
    epochs: int = 10
    neg_count: int = 5
    lr_initial: float = 0.025
    lr_min: float = 1e-4
    seed: int = 0
    deterministic: bool = True
    neg_power: float = 0.75

    def __post_init__(self) -> None:
        if self.max_degree < 0:
            raise ConfigError("max_degree must be >= 0")
        if self.dim < 1:
            raise ConfigError("dim must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.neg_count < 0:
            raise ConfigError("neg_count must be >= 0")
        if not 0 < self.lr_min <= self.lr_initial:
            raise ConfigError("need 0 < lr_min <= lr_initial")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")


@dataclass
class EmbeddingModel:
    input: np.ndarray  # (vocab, dim) learned representations
    output: np.ndarray  # (vocab, dim) context vectors
    vocab: SubgraphVocab
    config: TrainingConfig
    epoch_losses: list[float] = field(default_factory=list)


def init_model(vocab: SubgraphVocab, cfg: TrainingConfig, rng: np.random.Generator) -> EmbeddingModel:
    """Uniform init of the input matrix in [-0.5/dim, 0.5/dim); zero output."""
    n = len(vocab)
    inp = (rng.random((n, cfg.dim)) - 0.5) / cfg.dim
    out = np.zeros((n, cfg.dim))
    return EmbeddingModel(input=inp, output=out, vocab=vocab, config=cfg)


def radial_context(
    v: int, d: int, g: Graph, max_degree: int, vocab: SubgraphVocab
) -> list[int]:
    """Context multiset (as a sorted id list) of the degree-d subgraph at v.

    Every neighbor contributes its subgraphs of degrees d-1, d and d+1, with
    out-of-range degrees and subgraphs unknown to the vocabulary dropped. The
    root itself contributes nothing.
    """
    if not 0 <= d <= max_degree:
        raise ArgumentError(f"need 0 <= d <= {max_degree}, got {d}")
    table = encoding_id_table(g, vocab)
    ids = []
    for w in g.neighbors(v):
        for dd in (d - 1, d, d + 1):
            if 0 <= dd <= max_degree:
                sid = table[dd][w]
                if sid >= 0:
                    ids.append(sid)
    ids.sort()
    return ids


def sample_negatives(
    vocab: SubgraphVocab,
    context: Sequence[int],
    target: int,
    k: int,
    rng: np.random.Generator,
    power: float = 0.75,
) -> list[int]:
    """Draw up to k distinct noise subgraph ids, never the target or a context member.

    Ids are drawn from the unigram distribution raised to ``power``. Rejection
    sampling is capped at 100*k attempts and then falls back to an explicit
    scan of the eligible ids, so the call terminates on tiny vocabularies.
    """
    if k <= 0:
        return []
    excluded = set(context)
    excluded.add(target)
    budget = min(k, len(vocab) - len(excluded))
    if budget <= 0:
        return []

    cdf = vocab.noise_cdf(power)
    chosen: list[int] = []
    chosen_set: set[int] = set()
    for _ in range(100 * k):
        if len(chosen) >= budget:
            break
        sid = int(np.searchsorted(cdf, rng.random(), side="right"))
        sid = min(sid, len(vocab) - 1)
        if sid in excluded or sid in chosen_set:
            continue
        chosen.append(sid)
        chosen_set.add(sid)

    if len(chosen) < budget:
        remaining = [
            i for i in range(len(vocab)) if i not in excluded and i not in chosen_set
        ]
        need = budget - len(chosen)
        if len(remaining) <= need:
            chosen.extend(remaining)
        else:
            weights = vocab.frequencies[remaining].astype(np.float64) ** power
            picks = rng.choice(len(remaining), size=need, replace=False, p=weights / weights.sum())
            chosen.extend(remaining[int(p)] for p in picks)
    return chosen


class Gradients(NamedTuple):
    target: np.ndarray  # d loss / d input[target]
    context: np.ndarray  # d loss / d output[context_item]
    negatives: np.ndarray  # (k, dim), d loss / d output[negatives[i]]


def nsg_loss_and_grad(
    model: EmbeddingModel, target: int, context_item: int, negatives: Sequence[int]
) -> tuple[float, Gradients]:
    """Negative-sampling loss and gradients for one (target, context) pair.

    loss = -log sigmoid(out_c . in_t) - sum_n log sigmoid(-out_n . in_t)
    """
    t = model.input[target]
    rows = np.concatenate(([context_item], negatives)).astype(np.intp)
    out = model.output[rows]
    scores = out @ t
    # softplus(-s_c) + sum softplus(s_n), computed stably
    loss = float(np.logaddexp(0.0, -scores[0]) + np.logaddexp(0.0, scores[1:]).sum())
    coef = expit(scores)
    coef[0] -= 1.0  # positive pair: sigmoid(s) - 1; negatives: sigmoid(s)
    grad_target = coef @ out
    grad_out = np.outer(coef, t)
    return loss, Gradients(grad_target, grad_out[0], grad_out[1:])


def radial_skipgram_step(
    model: EmbeddingModel,
    target: int,
    context: Sequence[int],
    lr: float,
    rng: np.random.Generator,
) -> float:
    """One SGD visit of a target subgraph: update against its whole context.

    Context elements are processed in ascending id order (multiplicity
    expanded); each one draws a fresh batch of negatives. Returns the summed
    loss over context elements.
    """
    if lr <= 0:
        raise ArgumentError(f"learning rate must be > 0, got {lr}")
    total = 0.0
    cfg = model.config
    for item in sorted(context):
        negatives = sample_negatives(
            model.vocab, context, target, cfg.neg_count, rng, cfg.neg_power
        )
        loss, grads = nsg_loss_and_grad(model, target, item, negatives)
        model.input[target] -= lr * grads.target
        model.output[item] -= lr * grads.context
        if negatives:
            model.output[negatives] -= lr * grads.negatives
        total += loss
    return total


def _graph_plan(
    g: Graph, vocab: SubgraphVocab
) -> tuple[list[list[int]], list[list[list[int]]]]:
    """Per-graph target ids and radial contexts for all (node, degree)."""
    D = vocab.max_degree
    table = encoding_id_table(g, vocab)
    contexts: list[list[list[int]]] = []
    for d in range(D + 1):
        row = []
        for v in g.nodes:
            ids = []
            for w in g.neighbors(v):
                for dd in (d - 1, d, d + 1):
                    if 0 <= dd <= D:
                        sid = table[dd][w]
                        if sid >= 0:
                            ids.append(sid)
            ids.sort()
            row.append(ids)
        contexts.append(row)
    return table, contexts


def train(ds: GraphDataset, vocab: SubgraphVocab, cfg: TrainingConfig) -> EmbeddingModel:
    """Learn subgraph embeddings over a corpus.

    Each epoch shuffles the graph order (seeded) and visits every node of
    every graph at every degree 0..max_degree, running one radial skipgram
    step per visit. The learning rate decays linearly from lr_initial to
    lr_min across all scheduled visits. Per-epoch mean loss (per context
    element) is recorded on the returned model.
    """
    if vocab.max_degree != cfg.max_degree:
        raise ConfigError(
            f"vocab was built with max_degree={vocab.max_degree}, config says {cfg.max_degree}"
        )
    rng = np.random.default_rng(cfg.seed)
    model = init_model(vocab, cfg, rng)

    plans = [_graph_plan(g, vocab) for g in ds.graphs]
    n_items = sum(
        len(ctx) for _, contexts in plans for row in contexts for ctx in row
    )
    total_steps = cfg.epochs * sum(g.num_nodes for g in ds.graphs) * (cfg.max_degree + 1)
    lr_span = cfg.lr_initial - cfg.lr_min
    step = 0

    for epoch in range(cfg.epochs):
        epoch_loss = 0.0
        order = rng.permutation(len(ds.graphs))
        for gi in order:
            g = ds.graphs[int(gi)]
            targets, contexts = plans[int(gi)]
            for v in g.nodes:
                for d in range(cfg.max_degree + 1):
                    lr = cfg.lr_initial
                    if total_steps > 1:
                        lr = cfg.lr_initial - lr_span * step / (total_steps - 1)
                    lr = max(lr, cfg.lr_min)
                    step += 1
                    target = targets[d][v]
                    ctx = contexts[d][v]
                    if target < 0 or not ctx:
                        continue
                    epoch_loss += radial_skipgram_step(model, target, ctx, lr, rng)
        if not (np.isfinite(model.input).all() and np.isfinite(model.output).all()):
            raise NumericalError(f"non-finite parameter after epoch {epoch}")
        mean_loss = epoch_loss / n_items if n_items else 0.0
        model.epoch_losses.append(mean_loss)
        logger.info("epoch %d/%d mean loss %.6f", epoch + 1, cfg.epochs, mean_loss)
    return model


def save_embeddings(model: EmbeddingModel, path: str) -> None:
    """Write ``<vocab_size> <dim>`` then one ``<id>\\t<v v ...>`` line per row."""
    inp = model.input
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{inp.shape[0]} {inp.shape[1]}\n")
        for i in range(inp.shape[0]):
            fh.write(str(i) + "\t" + " ".join(repr(float(x)) for x in inp[i]) + "\n")


def load_embeddings(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise FormatError(f"{path}:1: expected '<vocab_size> <dim>' header")
        n, dim = int(header[0]), int(header[1])
        matrix = np.zeros((n, dim))
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            sid, _, values = line.partition("\t")
            row = np.array([float(x) for x in values.split()])
            i = int(sid)
            if not 0 <= i < n or row.shape[0] != dim:
                raise FormatError(f"{path}:{lineno}: row does not match header")
            matrix[i] = row
    return matrix
