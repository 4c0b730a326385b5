"""Rooted-subgraph embeddings and Weisfeiler-Lehman graph kernels.

The package covers the full pipeline: dataset ingestion, canonical
rooted-subgraph extraction, skipgram training of subgraph embeddings over
radial contexts, plain and embedding-weighted graph kernels, and downstream
kernel-SVM classification / affinity-propagation clustering.
"""

from .clustering import ClusterResult, affinity_propagation
from .errors import (
    ArgumentError,
    BoundsError,
    ConfigError,
    DegenerateLabelsError,
    EmptyDatasetError,
    FormatError,
    NumericalError,
    Sg2vError,
    StratificationError,
)
from .evaluation import EvalResult, evaluate_classification
from .graphs import (
    Graph,
    GraphDataset,
    degree_relabel,
    load_jsonl,
    load_tu_dataset,
    neighbors,
    write_jsonl,
)
from .kernels import (
    KernelMatrix,
    deep_wl_kernel,
    graph_embedding,
    normalize_kernel,
    wl_kernel,
)
from .metrics import accuracy, adjusted_rand_index
from .svm import SvmModel, svm_predict, svm_train
from .training import (
    EmbeddingModel,
    TrainingConfig,
    nsg_loss_and_grad,
    radial_context,
    radial_skipgram_step,
    sample_negatives,
    train,
)
from .wl import (
    CanonicalSubgraph,
    SubgraphVocab,
    build_subgraph_vocab,
    get_wl_subgraph,
    subgraph_count_vector,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "BoundsError",
    "CanonicalSubgraph",
    "ClusterResult",
    "ConfigError",
    "DegenerateLabelsError",
    "EmbeddingModel",
    "EmptyDatasetError",
    "EvalResult",
    "FormatError",
    "Graph",
    "GraphDataset",
    "KernelMatrix",
    "NumericalError",
    "Sg2vError",
    "StratificationError",
    "SubgraphVocab",
    "SvmModel",
    "TrainingConfig",
    "accuracy",
    "adjusted_rand_index",
    "affinity_propagation",
    "build_subgraph_vocab",
    "deep_wl_kernel",
    "degree_relabel",
    "evaluate_classification",
    "get_wl_subgraph",
    "graph_embedding",
    "load_jsonl",
    "load_tu_dataset",
    "neighbors",
    "normalize_kernel",
    "nsg_loss_and_grad",
    "radial_context",
    "radial_skipgram_step",
    "sample_negatives",
    "subgraph_count_vector",
    "svm_predict",
    "svm_train",
    "train",
    "wl_kernel",
    "write_jsonl",
]
