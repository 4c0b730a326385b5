"""C-SVC on a precomputed kernel, trained with sequential minimal optimization.

Each iteration selects a violating pair with second-order working-set
selection (the maximal-violation index paired with the partner promising the
largest objective decrease), solves the two-variable subproblem exactly and
updates the dual gradient incrementally. The solver stops when every KKT
condition holds within ``tol``. Everything is deterministic: index ties
resolve to the smallest index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, BoundsError, DegenerateLabelsError

_EPS = 1e-12


@dataclass
class SvmModel:
    alpha: np.ndarray  # full dual vector over training points
    support_indices: np.ndarray  # indices with alpha > 0
    dual_coef: np.ndarray  # alpha_i * y_i over support indices
    bias: float
    C: float
    n_train: int
    converged: bool
    passes: int  # pair updates performed
    train_kernel: np.ndarray | None = None  # reference to the rows used in training


def dual_objective(K: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    """W(alpha) = sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij (maximized)."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


def svm_train(
    K: np.ndarray,
    y: np.ndarray,
    C: float,
    tol: float = 1e-3,
    max_iter: int | None = None,
) -> SvmModel:
    """Solve the C-SVC dual on a precomputed training kernel.

    Iterates until the largest KKT violation is below ``tol`` (converged) or
    ``max_iter`` pair updates were spent; a selected pair with no feasible
    room also stops the solver with the converged flag unset.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if K.shape != (n, n):
        raise BoundsError(f"kernel shape {K.shape} does not match {n} labels")
    if C <= 0:
        raise ArgumentError(f"C must be > 0, got {C}")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ArgumentError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise DegenerateLabelsError("training labels contain a single class")
    if max_iter is None:
        max_iter = max(10000, 200 * n)

    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the (minimized) dual: Q alpha - 1
    Qy = y[:, None] * y[None, :] * K  # Q matrix
    pos = y > 0
    diag = np.diag(K).copy()

    iterations = 0
    converged = False
    while iterations < max_iter:
        yg = y * grad
        can_grow = alpha < C - _EPS
        can_shrink = alpha > _EPS
        up = (can_grow & pos) | (can_shrink & ~pos)
        down = (can_grow & ~pos) | (can_shrink & pos)
        if not up.any() or not down.any():
            converged = True
            break
        score = -yg
        i = int(np.argmax(np.where(up, score, -np.inf)))
        if score[i] - np.min(np.where(down, score, np.inf)) <= tol:
            converged = True
            break
        # second-order partner: maximize violation^2 / curvature
        violation = score[i] - score
        curvature = np.maximum(diag[i] + diag - 2.0 * K[:, i], _EPS)
        usable = down & (violation > 0)
        gain = np.where(usable, violation * violation / curvature, -np.inf)
        j = int(np.argmax(gain))

        y1, y2 = y[i], y[j]
        a1, a2 = alpha[i], alpha[j]
        s = y1 * y2
        if s > 0:
            lo, hi = max(0.0, a1 + a2 - C), min(C, a1 + a2)
        else:
            lo, hi = max(0.0, a2 - a1), min(C, C + a2 - a1)
        if hi - lo < _EPS:
            break  # maximal violating pair cannot move: give up, not converged
        eta = K[i, i] + K[j, j] - 2.0 * K[i, j]
        eta = max(eta, _EPS)  # flat direction (duplicate points): step to the bound
        a2_new = min(max(a2 + (s * grad[i] - grad[j]) / eta, lo), hi)
        if abs(a2_new - a2) < _EPS:
            break
        a1_new = a1 + s * (a2 - a2_new)
        if a1_new < 0.0:  # snap rounding drift back into the box
            a2_new += s * a1_new
            a1_new = 0.0
        elif a1_new > C:
            a2_new += s * (a1_new - C)
            a1_new = C
        grad += Qy[:, i] * (a1_new - a1) + Qy[:, j] * (a2_new - a2)
        alpha[i], alpha[j] = a1_new, a2_new
        iterations += 1

    yg = y * grad
    free = (alpha > _EPS) & (alpha < C - _EPS)
    if free.any():
        bias = float(np.mean(-yg[free]))
    else:
        can_grow = alpha < C - _EPS
        can_shrink = alpha > _EPS
        up = (can_grow & pos) | (can_shrink & ~pos)
        down = (can_grow & ~pos) | (can_shrink & pos)
        score = -yg
        hi = np.max(np.where(up, score, -np.inf)) if up.any() else 0.0
        lo = np.min(np.where(down, score, np.inf)) if down.any() else 0.0
        bias = float((hi + lo) / 2.0)

    support = np.flatnonzero(alpha > _EPS)
    return SvmModel(
        alpha=alpha,
        support_indices=support,
        dual_coef=(alpha * y)[support],
        bias=bias,
        C=C,
        n_train=n,
        converged=converged,
        passes=iterations,
        train_kernel=K,
    )


def svm_decision(model: SvmModel, k_rows: np.ndarray) -> np.ndarray:
    k_rows = np.atleast_2d(np.asarray(k_rows, dtype=np.float64))
    if k_rows.shape[1] != model.n_train:
        raise BoundsError(
            f"kernel rows have {k_rows.shape[1]} columns, expected {model.n_train}"
        )
    return k_rows[:, model.support_indices] @ model.dual_coef + model.bias


def svm_predict(model: SvmModel, k_rows: np.ndarray) -> np.ndarray:
    """Predict +/-1 from kernel values against the training points; ties go to +1."""
    decision = svm_decision(model, k_rows)
    return np.where(decision >= 0.0, 1, -1)


@dataclass
class OneVsOneSvm:
    """One-vs-one vote over all class pairs; prediction ties pick the smallest class."""

    classes: list[str]
    models: list[tuple[int, int, SvmModel, np.ndarray]]  # (class_a, class_b, model, train idx)

    def predict(self, k_rows: np.ndarray) -> list[str]:
        k_rows = np.atleast_2d(np.asarray(k_rows, dtype=np.float64))
        votes = np.zeros((k_rows.shape[0], len(self.classes)), dtype=np.int64)
        for ca, cb, model, idx in self.models:
            pred = svm_predict(model, k_rows[:, idx])
            votes[:, cb] += pred == 1
            votes[:, ca] += pred == -1
        return [self.classes[i] for i in np.argmax(votes, axis=1)]


def ovo_train(K: np.ndarray, labels: list[str], C: float, tol: float = 1e-3) -> OneVsOneSvm:
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise DegenerateLabelsError("training labels contain a single class")
    K = np.asarray(K, dtype=np.float64)
    labels_arr = np.asarray(labels)
    models = []
    for a in range(len(classes)):
        for bidx in range(a + 1, len(classes)):
            idx = np.flatnonzero((labels_arr == classes[a]) | (labels_arr == classes[bidx]))
            y = np.where(labels_arr[idx] == classes[bidx], 1.0, -1.0)
            model = svm_train(K[np.ix_(idx, idx)], y, C, tol)
            models.append((a, bidx, model, idx))
    return OneVsOneSvm(classes=classes, models=models)
