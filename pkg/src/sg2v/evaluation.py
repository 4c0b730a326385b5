"""Classification evaluation protocol over precomputed kernels.

Each repeat draws a stratified 90/10 train/test split, picks the SVM cost C
by k-fold cross validation on the training split (ties favor the smallest C),
retrains on the whole training split and records the test accuracy. Mean and
standard deviation aggregate over repeats. Everything is driven by one seed,
so a repeated call reproduces the result exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, DegenerateLabelsError, StratificationError
from .kernels import KernelMatrix
from .metrics import accuracy
from .svm import ovo_train

DEFAULT_C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


@dataclass
class EvalResult:
    accuracies: list[float]
    chosen_c: list[float]
    mean: float
    std: float  # population std over repeats
    seed: int
    dataset: str = ""
    kernel_mode: str = ""

    @classmethod
    def from_repeats(
        cls,
        accuracies: list[float],
        chosen_c: list[float],
        seed: int,
        dataset: str = "",
        kernel_mode: str = "",
    ) -> "EvalResult":
        return cls(
            accuracies=accuracies,
            chosen_c=chosen_c,
            mean=float(np.mean(accuracies)),
            std=float(np.std(accuracies)),
            seed=seed,
            dataset=dataset,
            kernel_mode=kernel_mode,
        )


def stratified_split(
    labels: list[str], train_frac: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Random train/test indices keeping per-class ratios; both sides non-empty."""
    if not 0.0 < train_frac < 1.0:
        raise ArgumentError(f"train_frac must be in (0, 1), got {train_frac}")
    labels_arr = np.asarray(labels)
    train: list[int] = []
    test: list[int] = []
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(labels_arr == cls)
        if idx.size < 2:
            raise StratificationError(f"class {cls!r} has fewer than 2 members")
        idx = idx[rng.permutation(idx.size)]
        n_train = int(round(train_frac * idx.size))
        n_train = min(max(n_train, 1), idx.size - 1)
        train.extend(int(i) for i in idx[:n_train])
        test.extend(int(i) for i in idx[n_train:])
    return np.sort(np.array(train)), np.sort(np.array(test))


def stratified_folds(
    labels: list[str], folds: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Deal each class round-robin into ``folds`` disjoint validation folds."""
    if folds < 2:
        raise ArgumentError(f"folds must be >= 2, got {folds}")
    labels_arr = np.asarray(labels)
    assigned: list[list[int]] = [[] for _ in range(folds)]
    for cls in sorted(set(labels)):
        idx = np.flatnonzero(labels_arr == cls)
        if idx.size < folds:
            raise StratificationError(
                f"class {cls!r} has {idx.size} members, fewer than {folds} folds"
            )
        idx = idx[rng.permutation(idx.size)]
        for pos, i in enumerate(idx):
            assigned[pos % folds].append(int(i))
    return [np.sort(np.array(f)) for f in assigned]


def select_c_by_cv(
    K: np.ndarray,
    labels: list[str],
    c_grid: tuple[float, ...],
    folds: int,
    rng: np.random.Generator,
    tol: float = 1e-3,
) -> float:
    """Pick C maximizing mean fold accuracy; ties resolve to the smallest C."""
    fold_sets = stratified_folds(labels, folds, rng)
    labels_arr = np.asarray(labels)
    all_idx = np.arange(len(labels))
    best_c, best_acc = None, -1.0
    for c in sorted(c_grid):
        fold_accs = []
        for val_idx in fold_sets:
            tr_idx = np.setdiff1d(all_idx, val_idx)
            model = ovo_train(K[np.ix_(tr_idx, tr_idx)], list(labels_arr[tr_idx]), c, tol)
            pred = model.predict(K[np.ix_(val_idx, tr_idx)])
            fold_accs.append(accuracy(pred, list(labels_arr[val_idx])))
        mean_acc = float(np.mean(fold_accs))
        if mean_acc > best_acc:
            best_c, best_acc = c, mean_acc
    assert best_c is not None
    return best_c


def evaluate_classification(
    kernel: KernelMatrix | np.ndarray,
    labels: list[str],
    repeats: int = 5,
    train_frac: float = 0.9,
    folds: int = 5,
    c_grid: tuple[float, ...] = DEFAULT_C_GRID,
    seed: int = 0,
    tol: float = 1e-3,
    dataset: str = "",
    kernel_mode: str = "",
) -> EvalResult:
    """Repeated stratified train/test evaluation of a kernel SVM."""
    K = kernel.values if isinstance(kernel, KernelMatrix) else np.asarray(kernel)
    n = len(labels)
    if n < 10:
        raise ArgumentError(f"need at least 10 samples, got {n}")
    if K.shape != (n, n):
        raise ArgumentError(f"kernel shape {K.shape} does not match {n} labels")
    if len(set(labels)) < 2:
        raise DegenerateLabelsError("need at least two classes")
    if not c_grid:
        raise ArgumentError("c_grid must not be empty")
    if seed < 0:
        raise ArgumentError("seed must be >= 0")

    labels_arr = np.asarray(labels)
    accuracies: list[float] = []
    chosen: list[float] = []
    for repeat in range(repeats):
        rng = np.random.default_rng([seed, repeat])
        train_idx, test_idx = stratified_split(labels, train_frac, rng)
        train_labels = list(labels_arr[train_idx])
        K_train = K[np.ix_(train_idx, train_idx)]
        best_c = select_c_by_cv(K_train, train_labels, tuple(c_grid), folds, rng, tol)
        model = ovo_train(K_train, train_labels, best_c, tol)
        pred = model.predict(K[np.ix_(test_idx, train_idx)])
        accuracies.append(accuracy(pred, list(labels_arr[test_idx])))
        chosen.append(best_c)
    return EvalResult.from_repeats(accuracies, chosen, seed, dataset, kernel_mode)
