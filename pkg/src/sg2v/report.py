"""Render a human-readable summary and figures from pipeline artifacts.

The report step never recomputes anything: it reads whatever artifact files
exist in an output directory (vocabulary, loss log, kernel matrix,
classification report, cluster assignments) and produces a plain-text
summary table, a delimited summary and one figure per artifact.
"""

from __future__ import annotations

import logging
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .kernels import load_kernel

logger = logging.getLogger(__name__)

VOCAB_FILE = "vocab.tsv"
EMBEDDINGS_FILE = "embeddings.txt"
LOSS_FILE = "loss.log"
KERNEL_FILE = "kernel.txt"
KERNEL_LABELS_FILE = "kernel_labels.csv"
CLASSIFY_FILE = "classify.csv"
CLUSTER_FILE = "clusters.csv"
REPORT_DIR = "report"


def _read_loss_log(path: str) -> tuple[list[str], list[tuple[int, float]]]:
    header, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                header.append(line.lstrip("# "))
                continue
            epoch, loss = line.split("\t")
            rows.append((int(epoch), float(loss)))
    return header, rows


def _read_classify(path: str) -> tuple[list[str], list[dict], str | None]:
    header, rows, summary = [], [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                header.append(line.lstrip("# "))
                continue
            if line.startswith("summary:"):
                summary = line.partition(":")[2].strip()
                continue
            dataset, mode, repeat, c, acc = line.split(",")
            rows.append(
                {
                    "dataset": dataset,
                    "mode": mode,
                    "repeat": int(repeat),
                    "C": float(c),
                    "accuracy": float(acc),
                }
            )
    return header, rows, summary


def _read_clusters(path: str) -> tuple[list[str], list[tuple[int, int, int]]]:
    header, rows = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                header.append(line.lstrip("# "))
                continue
            gid, cid, eid = line.split(",")
            rows.append((int(gid), int(cid), int(eid)))
    return header, rows


def _vocab_stats(path: str) -> dict:
    sizes = 0
    max_degree = 0
    total_freq = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            _, degree, freq, _ = line.rstrip("\n").split("\t")
            sizes += 1
            max_degree = max(max_degree, int(degree))
            total_freq += int(freq)
    return {"entries": sizes, "max_degree": max_degree, "occurrences": total_freq}


def write_report(outdir: str) -> str:
    """Build ``<outdir>/report`` from the artifacts present in ``outdir``.

    Returns the report directory path. Missing artifacts are skipped.
    """
    report_dir = os.path.join(outdir, REPORT_DIR)
    os.makedirs(report_dir, exist_ok=True)
    lines: list[str] = ["artifact summary", "================", ""]
    tsv: list[tuple[str, str, str]] = []

    vocab_path = os.path.join(outdir, VOCAB_FILE)
    if os.path.isfile(vocab_path):
        stats = _vocab_stats(vocab_path)
        lines.append(
            f"vocabulary     {stats['entries']} subgraphs, max degree {stats['max_degree']}, "
            f"{stats['occurrences']} occurrences"
        )
        for k, v in stats.items():
            tsv.append(("vocab", k, str(v)))

    loss_path = os.path.join(outdir, LOSS_FILE)
    if os.path.isfile(loss_path):
        header, rows = _read_loss_log(loss_path)
        if rows:
            lines.append(
                f"training       {len(rows)} epochs, first loss {rows[0][1]:.4f}, "
                f"final loss {rows[-1][1]:.4f}"
            )
            tsv.append(("train", "epochs", str(len(rows))))
            tsv.append(("train", "first_loss", repr(rows[0][1])))
            tsv.append(("train", "final_loss", repr(rows[-1][1])))
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot([r[0] for r in rows], [r[1] for r in rows], marker="o")
            ax.set_xlabel("epoch")
            ax.set_ylabel("mean loss")
            ax.set_title("training loss")
            fig.tight_layout()
            fig.savefig(os.path.join(report_dir, "loss_curve.png"), dpi=120)
            plt.close(fig)

    kernel_path = os.path.join(outdir, KERNEL_FILE)
    if os.path.isfile(kernel_path):
        kernel = load_kernel(kernel_path)
        lo, hi = kernel.eigen_range()
        lines.append(
            f"kernel         {kernel.n}x{kernel.n} {kernel.mode}"
            f"{' normalized' if kernel.normalized else ''}, eigenvalues [{lo:.3g}, {hi:.3g}]"
        )
        tsv.append(("kernel", "n", str(kernel.n)))
        tsv.append(("kernel", "mode", kernel.mode))
        tsv.append(("kernel", "normalized", str(int(kernel.normalized))))
        tsv.append(("kernel", "min_eigenvalue", repr(lo)))
        tsv.append(("kernel", "max_eigenvalue", repr(hi)))
        fig, ax = plt.subplots(figsize=(5, 4.2))
        im = ax.imshow(kernel.values, cmap="viridis")
        fig.colorbar(im, ax=ax)
        ax.set_title(f"{kernel.mode} kernel")
        fig.tight_layout()
        fig.savefig(os.path.join(report_dir, "kernel_heatmap.png"), dpi=120)
        plt.close(fig)

    classify_path = os.path.join(outdir, CLASSIFY_FILE)
    if os.path.isfile(classify_path):
        _, rows, summary = _read_classify(classify_path)
        if rows:
            lines.append(f"classification {summary or ''}")
            lines.append("    repeat  C        accuracy")
            for r in rows:
                lines.append(f"    {r['repeat']:<7d} {r['C']:<8g} {r['accuracy']:.4f}")
            tsv.append(("classify", "summary", summary or ""))
            for r in rows:
                tsv.append(("classify", f"repeat_{r['repeat']}", repr(r["accuracy"])))
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.bar([r["repeat"] for r in rows], [r["accuracy"] for r in rows])
            ax.set_xlabel("repeat")
            ax.set_ylabel("test accuracy")
            ax.set_ylim(0, 1.05)
            ax.set_title("accuracy per repeat")
            fig.tight_layout()
            fig.savefig(os.path.join(report_dir, "accuracy_repeats.png"), dpi=120)
            plt.close(fig)

    cluster_path = os.path.join(outdir, CLUSTER_FILE)
    if os.path.isfile(cluster_path):
        header, rows = _read_clusters(cluster_path)
        if rows:
            cluster_ids = [cid for _, cid, _ in rows]
            n_clusters = len(set(cluster_ids))
            lines.append(f"clustering     {len(rows)} graphs in {n_clusters} clusters")
            for h in header:
                lines.append(f"    {h}")
                key, _, value = h.partition(":")
                tsv.append(("cluster", key.strip(), value.strip()))
            tsv.append(("cluster", "n_clusters", str(n_clusters)))
            sizes = np.bincount(cluster_ids)
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.bar(range(len(sizes)), sizes)
            ax.set_xlabel("cluster")
            ax.set_ylabel("size")
            ax.set_title("cluster sizes")
            fig.tight_layout()
            fig.savefig(os.path.join(report_dir, "cluster_sizes.png"), dpi=120)
            plt.close(fig)

    if len(lines) == 3:
        lines.append("(no artifacts found)")
    text = "\n".join(lines) + "\n"
    with open(os.path.join(report_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    with open(os.path.join(report_dir, "summary.tsv"), "w", encoding="utf-8") as fh:
        for artifact, key, value in tsv:
            fh.write(f"{artifact}\t{key}\t{value}\n")
    logger.info("report written to %s", report_dir)
    return report_dir
