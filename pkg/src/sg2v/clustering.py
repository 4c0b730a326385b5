"""Affinity-propagation clustering over a precomputed similarity matrix.

Responsibility/availability message passing with damping, no randomness: the
result is fully determined by the similarity matrix, the preference and the
damping factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, BoundsError

_NEG_INF = -np.inf


@dataclass
class ClusterResult:
    exemplar_index: np.ndarray  # per point: index of its exemplar
    cluster_id: np.ndarray  # per point: dense cluster id
    exemplars: list[int]  # ascending exemplar indices
    iterations: int
    converged: bool

    @property
    def n_clusters(self) -> int:
        return len(self.exemplars)


def median_off_diagonal(S: np.ndarray) -> float:
    """Default preference: median of the off-diagonal similarities."""
    S = np.asarray(S, dtype=np.float64)
    n = S.shape[0]
    if n < 2:
        return 0.0
    mask = ~np.eye(n, dtype=bool)
    return float(np.median(S[mask]))


def affinity_propagation(
    S: np.ndarray,
    damping: float = 0.9,
    preference: float | np.ndarray | None = None,
    max_iter: int = 1000,
    convergence_window: int = 50,
) -> ClusterResult:
    """Cluster points described by a square similarity matrix.

    The diagonal is replaced by ``preference`` (default: median off-diagonal
    similarity). Iteration stops when the exemplar set has been stable for
    ``convergence_window`` consecutive iterations, or at ``max_iter`` with the
    converged flag unset.

    Exactly tied similarities make the messages oscillate without ever
    electing an exemplar, so an infinitesimal fixed-pattern perturbation is
    added up front; it is identical on every call, keeping the result a pure
    function of (S, damping, preference).
    """
    S = np.array(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise BoundsError(f"similarity matrix must be square, got {S.shape}")
    if not 0.5 <= damping < 1.0:
        raise ArgumentError(f"damping must be in [0.5, 1), got {damping}")
    n = S.shape[0]
    if n == 1:
        return ClusterResult(
            exemplar_index=np.zeros(1, dtype=np.intp),
            cluster_id=np.zeros(1, dtype=np.intp),
            exemplars=[0],
            iterations=0,
            converged=True,
        )

    if preference is None:
        preference = median_off_diagonal(S)
    np.fill_diagonal(S, preference)

    # degeneracy breaking: fixed-seed pattern, so repeated calls are identical
    scale = float(np.abs(S).max()) or 1.0
    jitter = np.random.default_rng(0).standard_normal(S.shape)
    S += (np.finfo(np.float64).eps * scale + 100 * np.finfo(np.float64).tiny) * jitter

    R = np.zeros((n, n))
    A = np.zeros((n, n))
    idx = np.arange(n)
    stable_for = 0
    previous: tuple[int, ...] | None = None
    iterations = 0
    converged = False

    for iterations in range(1, max_iter + 1):
        # responsibilities: r(i,k) = s(i,k) - max_{k' != k} (a(i,k') + s(i,k'))
        AS = A + S
        first = np.argmax(AS, axis=1)
        best = AS[idx, first]
        AS[idx, first] = _NEG_INF
        second = AS.max(axis=1)
        Rnew = S - best[:, None]
        Rnew[idx, first] = S[idx, first] - second
        R = damping * R + (1.0 - damping) * Rnew

        # availabilities: a(i,k) = min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)))
        Rp = np.maximum(R, 0.0)
        np.fill_diagonal(Rp, np.diag(R))
        Anew = Rp.sum(axis=0)[None, :] - Rp
        diag_new = np.diag(Anew).copy()
        Anew = np.minimum(Anew, 0.0)
        np.fill_diagonal(Anew, diag_new)
        A = damping * A + (1.0 - damping) * Anew

        exemplars = tuple(np.flatnonzero(np.diag(A) + np.diag(R) > 0))
        if exemplars == previous and exemplars:
            stable_for += 1
            if stable_for >= convergence_window:
                converged = True
                break
        else:
            stable_for = 0
        previous = exemplars

    exemplar_list = list(np.flatnonzero(np.diag(A) + np.diag(R) > 0))
    if not exemplar_list:
        exemplar_list = [int(np.argmax(np.diag(A) + np.diag(R)))]
        converged = False

    ex = np.asarray(exemplar_list, dtype=np.intp)
    assign = ex[np.argmax(S[:, ex], axis=1)]
    assign[ex] = ex  # exemplars always belong to their own cluster
    cluster_of_exemplar = {int(e): c for c, e in enumerate(exemplar_list)}
    cluster_id = np.array([cluster_of_exemplar[int(e)] for e in assign], dtype=np.intp)
    return ClusterResult(
        exemplar_index=assign,
        cluster_id=cluster_id,
        exemplars=[int(e) for e in exemplar_list],
        iterations=iterations,
        converged=converged,
    )
