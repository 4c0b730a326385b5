"""Pipeline driver: every stage is a subcommand with persisted artifacts.

Stages communicate through plain-text files only, so any stage can be rerun
or replaced independently: vocab -> train -> kernel -> classify / cluster ->
report. ``pipeline`` chains them from one key=value config file.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import report as report_mod
from .clustering import affinity_propagation, median_off_diagonal
from .errors import (
    ArgumentError,
    BoundsError,
    ConfigError,
    DegenerateLabelsError,
    EmptyDatasetError,
    FormatError,
    Sg2vError,
    StratificationError,
)
from .evaluation import DEFAULT_C_GRID, EvalResult, evaluate_classification
from .graphs import GraphDataset, load_jsonl, load_tu_dataset
from .kernels import (
    deep_wl_kernel,
    load_kernel,
    load_kernel_labels,
    normalize_kernel,
    save_kernel,
    save_kernel_labels,
    wl_kernel,
)
from .metrics import adjusted_rand_index
from .training import (
    EmbeddingModel,
    TrainingConfig,
    load_embeddings,
    save_embeddings,
    train,
)
from .wl import build_subgraph_vocab, load_vocab, save_vocab

logger = logging.getLogger("sg2v")

_VALIDATION_ERRORS = (
    ArgumentError,
    BoundsError,
    ConfigError,
    DegenerateLabelsError,
    EmptyDatasetError,
    FormatError,
    StratificationError,
    FileNotFoundError,
)


def _load_dataset(path: str, fmt: str, name: str | None, directed: bool) -> GraphDataset:
    if fmt == "tu":
        if name is None:
            name = os.path.basename(os.path.normpath(path))
        return load_tu_dataset(path, name, directed=directed)
    if fmt == "jsonl":
        return load_jsonl(path, directed=directed, name=name)
    raise ArgumentError(f"unknown dataset format {fmt!r}")


def run_vocab(
    input_path: str,
    fmt: str,
    degree: int,
    output: str,
    name: str | None = None,
    directed: bool = False,
) -> None:
    ds = _load_dataset(input_path, fmt, name, directed)
    vocab = build_subgraph_vocab(ds, degree)
    os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
    save_vocab(vocab, output)
    logger.info("vocabulary size %d (max degree %d) -> %s", len(vocab), degree, output)


def run_train(
    input_path: str,
    fmt: str,
    vocab_path: str,
    embeddings_path: str,
    loss_path: str,
    cfg: TrainingConfig,
    name: str | None = None,
    directed: bool = False,
) -> None:
    ds = _load_dataset(input_path, fmt, name, directed)
    vocab = load_vocab(vocab_path)
    model = train(ds, vocab, cfg)
    os.makedirs(os.path.dirname(embeddings_path) or ".", exist_ok=True)
    save_embeddings(model, embeddings_path)
    with open(loss_path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# seed={cfg.seed} dim={cfg.dim} epochs={cfg.epochs} neg={cfg.neg_count}"
            f" lr={cfg.lr_initial} lr_min={cfg.lr_min} deterministic={int(cfg.deterministic)}\n"
        )
        for epoch, loss in enumerate(model.epoch_losses):
            fh.write(f"{epoch}\t{loss!r}\n")
    logger.info(
        "trained %d epochs, final mean loss %.6f -> %s",
        cfg.epochs,
        model.epoch_losses[-1] if model.epoch_losses else float("nan"),
        embeddings_path,
    )


def run_kernel(
    input_path: str,
    fmt: str,
    vocab_path: str,
    mode: str,
    output: str,
    labels_output: str,
    embeddings_path: str | None = None,
    normalize: bool = False,
    audit: bool = False,
    name: str | None = None,
    directed: bool = False,
) -> None:
    ds = _load_dataset(input_path, fmt, name, directed)
    vocab = load_vocab(vocab_path)
    if mode == "wl":
        kernel = wl_kernel(ds, vocab)
    elif mode == "deep":
        if embeddings_path is None:
            raise ArgumentError("deep kernel needs --embeddings")
        matrix = load_embeddings(embeddings_path)
        if matrix.shape[0] != len(vocab):
            raise ConfigError(
                f"embeddings have {matrix.shape[0]} rows, vocabulary has {len(vocab)}"
            )
        model = EmbeddingModel(
            input=matrix,
            output=np.zeros_like(matrix),
            vocab=vocab,
            config=TrainingConfig(max_degree=vocab.max_degree, dim=matrix.shape[1]),
        )
        kernel = deep_wl_kernel(ds, vocab, model, audit=audit)
    else:
        raise ArgumentError(f"unknown kernel mode {mode!r}")
    if normalize:
        kernel = normalize_kernel(kernel)
    os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
    save_kernel(kernel, output)
    save_kernel_labels(ds, labels_output)
    logger.info("%s kernel %dx%d -> %s", kernel.mode, kernel.n, kernel.n, output)


def run_classify(
    kernel_path: str,
    labels_path: str,
    output: str,
    dataset_name: str | None = None,
    repeats: int = 5,
    train_frac: float = 0.9,
    folds: int = 5,
    c_grid: tuple[float, ...] = DEFAULT_C_GRID,
    seed: int = 0,
) -> EvalResult:
    kernel = load_kernel(kernel_path)
    pairs = load_kernel_labels(labels_path)
    if [gid for gid, _ in pairs] != kernel.graph_ids:
        raise FormatError("labels file does not list the kernel's graph ids in order")
    labels = [cls for _, cls in pairs]
    if any(not cls for cls in labels):
        raise ArgumentError("labels file has graphs without a class label")
    if dataset_name is None:
        dataset_name = os.path.splitext(os.path.basename(kernel_path))[0]
    result = evaluate_classification(
        kernel,
        labels,
        repeats=repeats,
        train_frac=train_frac,
        folds=folds,
        c_grid=c_grid,
        seed=seed,
        dataset=dataset_name,
        kernel_mode=kernel.mode,
    )
    os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(f"# seed={seed}\n")
        fh.write("# columns: dataset,kernel_mode,repeat,C,accuracy\n")
        for i, (acc, c) in enumerate(zip(result.accuracies, result.chosen_c)):
            fh.write(f"{dataset_name},{kernel.mode},{i},{c:g},{acc!r}\n")
        fh.write(f"summary: {result.mean:.6f} ± {result.std:.6f}\n")
    logger.info(
        "classification over %d repeats: %.4f ± %.4f -> %s",
        repeats,
        result.mean,
        result.std,
        output,
    )
    return result


def run_cluster(
    kernel_path: str,
    output: str,
    truth_path: str | None = None,
    damping: float = 0.9,
    preference: float | None = None,
    max_iter: int = 1000,
    convergence_window: int = 50,
) -> None:
    kernel = load_kernel(kernel_path)
    pref = median_off_diagonal(kernel.values) if preference is None else preference
    result = affinity_propagation(
        kernel.values,
        damping=damping,
        preference=pref,
        max_iter=max_iter,
        convergence_window=convergence_window,
    )
    ari = None
    if truth_path is not None:
        pairs = load_kernel_labels(truth_path)
        if [gid for gid, _ in pairs] != kernel.graph_ids:
            raise FormatError("truth labels do not list the kernel's graph ids in order")
        truth = [cls for _, cls in pairs]
        if any(truth):  # a labels file without classes carries no ground truth
            ari = adjusted_rand_index([int(c) for c in result.cluster_id], truth)
    os.makedirs(os.path.dirname(output) or ".", exist_ok=True)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(f"# converged: {str(result.converged).lower()}\n")
        fh.write(f"# iterations: {result.iterations}\n")
        fh.write(f"# n_clusters: {result.n_clusters}\n")
        fh.write(f"# preference: {pref!r}\n")
        if ari is not None:
            fh.write(f"# ari: {ari!r}\n")
        for i, gid in enumerate(kernel.graph_ids):
            exemplar_gid = kernel.graph_ids[int(result.exemplar_index[i])]
            fh.write(f"{gid},{int(result.cluster_id[i])},{exemplar_gid}\n")
    logger.info(
        "%d clusters (converged=%s%s) -> %s",
        result.n_clusters,
        result.converged,
        f", ari={ari:.4f}" if ari is not None else "",
        output,
    )


def _parse_config_file(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def _cfg_bool(value: str, key: str) -> bool:
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"config key {key} must be a boolean, got {value!r}")


def run_pipeline(config_path: str) -> None:
    cfg = _parse_config_file(config_path)
    if "input" not in cfg or "format" not in cfg:
        raise ConfigError("pipeline config needs at least 'input' and 'format'")
    outdir = cfg.get("outdir", "sg2v_out")
    os.makedirs(outdir, exist_ok=True)
    fmt = cfg["format"]
    name = cfg.get("name")
    directed = _cfg_bool(cfg.get("directed", "false"), "directed")
    degree = int(cfg.get("degree", "2"))
    mode = cfg.get("kernel", "deep")
    seed = int(cfg.get("seed", "0"))

    vocab_path = os.path.join(outdir, report_mod.VOCAB_FILE)
    embeddings_path = os.path.join(outdir, report_mod.EMBEDDINGS_FILE)
    loss_path = os.path.join(outdir, report_mod.LOSS_FILE)
    kernel_path = os.path.join(outdir, report_mod.KERNEL_FILE)
    labels_path = os.path.join(outdir, report_mod.KERNEL_LABELS_FILE)

    run_vocab(cfg["input"], fmt, degree, vocab_path, name=name, directed=directed)
    if mode == "deep":
        train_cfg = TrainingConfig(
            max_degree=degree,
            dim=int(cfg.get("dim", "32")),
            epochs=int(cfg.get("epochs", "10")),
            neg_count=int(cfg.get("neg", "5")),
            lr_initial=float(cfg.get("lr", "0.025")),
            lr_min=float(cfg.get("lr_min", "1e-4")),
            seed=seed,
            neg_power=float(cfg.get("neg_power", "0.75")),
        )
        run_train(
            cfg["input"], fmt, vocab_path, embeddings_path, loss_path, train_cfg,
            name=name, directed=directed,
        )
    run_kernel(
        cfg["input"],
        fmt,
        vocab_path,
        mode,
        kernel_path,
        labels_path,
        embeddings_path=embeddings_path if mode == "deep" else None,
        normalize=_cfg_bool(cfg.get("normalize", "false"), "normalize"),
        audit=_cfg_bool(cfg.get("audit", "false"), "audit"),
        name=name,
        directed=directed,
    )
    if _cfg_bool(cfg.get("classify", "true"), "classify"):
        grid = tuple(float(x) for x in cfg.get("c_grid", "0.01,0.1,1,10,100").split(","))
        run_classify(
            kernel_path,
            labels_path,
            os.path.join(outdir, report_mod.CLASSIFY_FILE),
            dataset_name=name or os.path.basename(os.path.normpath(cfg["input"])),
            repeats=int(cfg.get("repeats", "5")),
            train_frac=float(cfg.get("train_frac", "0.9")),
            folds=int(cfg.get("folds", "5")),
            c_grid=grid,
            seed=seed,
        )
    if _cfg_bool(cfg.get("cluster", "false"), "cluster"):
        pref = cfg.get("preference", "median")
        run_cluster(
            kernel_path,
            os.path.join(outdir, report_mod.CLUSTER_FILE),
            truth_path=labels_path,
            damping=float(cfg.get("damping", "0.9")),
            preference=None if pref == "median" else float(pref),
            max_iter=int(cfg.get("max_iter", "1000")),
            convergence_window=int(cfg.get("window", "50")),
        )
    if _cfg_bool(cfg.get("report", "true"), "report"):
        report_mod.write_report(outdir)


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="dataset path (directory for tu, file for jsonl)")
    p.add_argument("--format", required=True, choices=("tu", "jsonl"))
    p.add_argument("--name", help="dataset name (default: derived from the path)")
    p.add_argument("--directed", action="store_true", help="treat edges as directed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sg2v",
        description="rooted-subgraph embeddings and graph kernels",
    )
    parser.add_argument(
        "--log",
        choices=("error", "info", "debug"),
        default=os.environ.get("SG2V_LOG", "info"),
        help="log level (also via SG2V_LOG)",
    )
    parser.add_argument("--threads", type=int, default=1, help="worker threads per stage")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("vocab", help="extract the rooted-subgraph vocabulary")
    _add_dataset_args(p)
    p.add_argument("--degree", type=int, default=2, help="maximum subgraph degree")
    p.add_argument("--outdir", default="sg2v_out")
    p.add_argument("--output", help="vocabulary file (default <outdir>/vocab.tsv)")
    p.set_defaults(func=_cmd_vocab)

    p = sub.add_parser("train", help="learn subgraph embeddings")
    _add_dataset_args(p)
    p.add_argument("--vocab", help="vocabulary file (default <outdir>/vocab.tsv)")
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--neg", type=int, default=5, help="negative samples per context item")
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--lr-min", type=float, default=1e-4)
    p.add_argument("--neg-power", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="sg2v_out")
    p.add_argument("--embeddings", help="output file (default <outdir>/embeddings.txt)")
    p.add_argument("--loss-log", help="output file (default <outdir>/loss.log)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("kernel", help="build a kernel matrix over the dataset")
    _add_dataset_args(p)
    p.add_argument("--vocab", help="vocabulary file (default <outdir>/vocab.tsv)")
    p.add_argument("--mode", choices=("wl", "deep"), default="deep")
    p.add_argument("--embeddings", help="embeddings file (deep mode; default <outdir>/embeddings.txt)")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--audit", action="store_true", help="cross-check the deep kernel")
    p.add_argument("--outdir", default="sg2v_out")
    p.add_argument("--output", help="kernel file (default <outdir>/kernel.txt)")
    p.add_argument("--labels-output", help="default <outdir>/kernel_labels.csv")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("classify", help="kernel-SVM evaluation with repeated splits")
    p.add_argument("--kernel", help="kernel file (default <outdir>/kernel.txt)")
    p.add_argument("--labels", help="labels file (default <outdir>/kernel_labels.csv)")
    p.add_argument("--dataset-name")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--train-frac", type=float, default=0.9)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--c-grid", default="0.01,0.1,1,10,100")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="sg2v_out")
    p.add_argument("--output", help="report file (default <outdir>/classify.csv)")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("cluster", help="affinity-propagation clustering of the kernel")
    p.add_argument("--kernel", help="kernel file (default <outdir>/kernel.txt)")
    p.add_argument("--labels", help="ground-truth labels file for ARI (optional)")
    p.add_argument("--damping", type=float, default=0.9)
    p.add_argument("--preference", default="median", help="'median' or a number")
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--window", type=int, default=50)
    p.add_argument("--outdir", default="sg2v_out")
    p.add_argument("--output", help="clusters file (default <outdir>/clusters.csv)")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("report", help="summarize artifacts and render figures")
    p.add_argument("--outdir", default="sg2v_out")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("pipeline", help="run all stages from a config file")
    p.add_argument("--config", required=True, help="key = value config file")
    p.set_defaults(func=_cmd_pipeline)
    return parser


def _cmd_vocab(args: argparse.Namespace) -> None:
    run_vocab(
        args.input,
        args.format,
        args.degree,
        args.output or os.path.join(args.outdir, report_mod.VOCAB_FILE),
        name=args.name,
        directed=args.directed,
    )


def _cmd_train(args: argparse.Namespace) -> None:
    vocab_path = args.vocab or os.path.join(args.outdir, report_mod.VOCAB_FILE)
    vocab_degree = load_vocab(vocab_path).max_degree
    cfg = TrainingConfig(
        max_degree=vocab_degree,
        dim=args.dim,
        epochs=args.epochs,
        neg_count=args.neg,
        lr_initial=args.lr,
        lr_min=args.lr_min,
        seed=args.seed,
        neg_power=args.neg_power,
    )
    run_train(
        args.input,
        args.format,
        vocab_path,
        args.embeddings or os.path.join(args.outdir, report_mod.EMBEDDINGS_FILE),
        args.loss_log or os.path.join(args.outdir, report_mod.LOSS_FILE),
        cfg,
        name=args.name,
        directed=args.directed,
    )


def _cmd_kernel(args: argparse.Namespace) -> None:
    embeddings = args.embeddings
    if args.mode == "deep" and embeddings is None:
        embeddings = os.path.join(args.outdir, report_mod.EMBEDDINGS_FILE)
    run_kernel(
        args.input,
        args.format,
        args.vocab or os.path.join(args.outdir, report_mod.VOCAB_FILE),
        args.mode,
        args.output or os.path.join(args.outdir, report_mod.KERNEL_FILE),
        args.labels_output or os.path.join(args.outdir, report_mod.KERNEL_LABELS_FILE),
        embeddings_path=embeddings,
        normalize=args.normalize,
        audit=args.audit,
        name=args.name,
        directed=args.directed,
    )


def _cmd_classify(args: argparse.Namespace) -> None:
    try:
        grid = tuple(float(x) for x in args.c_grid.split(","))
    except ValueError:
        raise ArgumentError(f"bad --c-grid {args.c_grid!r}")
    run_classify(
        args.kernel or os.path.join(args.outdir, report_mod.KERNEL_FILE),
        args.labels or os.path.join(args.outdir, report_mod.KERNEL_LABELS_FILE),
        args.output or os.path.join(args.outdir, report_mod.CLASSIFY_FILE),
        dataset_name=args.dataset_name,
        repeats=args.repeats,
        train_frac=args.train_frac,
        folds=args.folds,
        c_grid=grid,
        seed=args.seed,
    )


def _cmd_cluster(args: argparse.Namespace) -> None:
    if args.preference == "median":
        preference = None
    else:
        try:
            preference = float(args.preference)
        except ValueError:
            raise ArgumentError(f"bad --preference {args.preference!r}")
    run_cluster(
        args.kernel or os.path.join(args.outdir, report_mod.KERNEL_FILE),
        args.output or os.path.join(args.outdir, report_mod.CLUSTER_FILE),
        truth_path=args.labels,
        damping=args.damping,
        preference=preference,
        max_iter=args.max_iter,
        convergence_window=args.window,
    )


def _cmd_report(args: argparse.Namespace) -> None:
    report_mod.write_report(args.outdir)


def _cmd_pipeline(args: argparse.Namespace) -> None:
    run_pipeline(args.config)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log.upper()),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.threads < 1:
        logger.error("--threads must be >= 1")
        return 2
    if args.threads > 1:
        logger.info("stages run single-threaded; --threads=%d has no effect", args.threads)
    try:
        args.func(args)
    except _VALIDATION_ERRORS as exc:
        logger.error("%s", exc)
        return 2
    except Sg2vError as exc:
        logger.error("%s", exc)
        return 1
    except Exception:  # pragma: no cover - unexpected failure path
        logger.exception("unexpected failure")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
