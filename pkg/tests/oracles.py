"""Independent reference computations used by the test suites.

These deliberately avoid the library's own solvers: the SVM oracles evaluate
the dual objective by brute force (dense grid / stationary-point enumeration)
so they can disagree with a broken SMO implementation.
"""

from itertools import product

import numpy as np

from sg2v.svm import dual_objective


def grid_search_dual(K: np.ndarray, y: np.ndarray, C: float, step_frac: float = 0.01) -> float:
    """Best dual objective on a grid of step ``step_frac * C`` per variable.

    The equality constraint eliminates the last variable, so the search space
    is (1/step_frac + 1) ** (n - 1) points; practical for n <= 4.
    """
    n = len(y)
    grid = np.linspace(0.0, C, int(round(1.0 / step_frac)) + 1)
    if n == 1:
        raise ValueError("need at least 2 points")
    mesh = np.meshgrid(*([grid] * (n - 1)), indexing="ij")
    free = np.stack([m.ravel() for m in mesh], axis=1)
    last = -y[-1] * (free @ y[:-1])
    ok = (last >= -1e-12) & (last <= C + 1e-12)
    alphas = np.column_stack([free[ok], np.clip(last[ok], 0.0, C)])
    ay = alphas * y
    quad = ((ay @ K) * ay).sum(axis=1)
    objectives = alphas.sum(axis=1) - 0.5 * quad
    return float(objectives.max())


def stationary_point_dual(K: np.ndarray, y: np.ndarray, C: float) -> float:
    """Exact dual optimum by enumerating active sets (alpha at 0, C or interior).

    For every assignment, interior variables and the bias solve the linear
    KKT system; feasible candidates are scored with the dual objective and
    the best one is the optimum. Exponential in n; meant for n <= 6.
    """
    n = len(y)
    best = -np.inf
    for assignment in product((0, 1, 2), repeat=n):
        alpha = np.where(np.array(assignment) == 1, C, 0.0)
        interior = [i for i, a in enumerate(assignment) if a == 2]
        if interior:
            m = len(interior)
            A = np.zeros((m + 1, m + 1))
            rhs = np.zeros(m + 1)
            for r, i in enumerate(interior):
                for ccol, j in enumerate(interior):
                    A[r, ccol] = y[j] * K[i, j]
                A[r, m] = 1.0  # bias term
                fixed = sum(alpha[j] * y[j] * K[i, j] for j in range(n) if j not in interior)
                rhs[r] = y[i] - fixed
            A[m, :m] = [y[i] for i in interior]
            rhs[m] = -sum(alpha[j] * y[j] for j in range(n) if j not in interior)
            solution, residual, rank, _ = np.linalg.lstsq(A, rhs, rcond=None)
            if not np.allclose(A @ solution, rhs, atol=1e-8):
                continue
            candidate = solution[:m]
            if np.any(candidate < -1e-10) or np.any(candidate > C + 1e-10):
                continue
            alpha = alpha.astype(float)
            for value, i in zip(candidate, interior):
                alpha[i] = min(max(value, 0.0), C)
        if abs(np.dot(alpha, y)) > 1e-8:
            continue
        best = max(best, dual_objective(K, y, alpha))
    return float(best)


def small_svm_fixtures() -> list[tuple[np.ndarray, np.ndarray, float]]:
    """The <=4-point problems checked against the dense dual grid search."""
    fixtures = []
    # orthogonal 2-point problem
    fixtures.append((np.eye(2), np.array([1.0, -1.0]), 1.0))
    # correlated pair
    fixtures.append((np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([1.0, -1.0]), 0.5))
    # 3 points, one class twice
    K3 = np.array([[2.0, 1.2, 0.3], [1.2, 2.0, 0.4], [0.3, 0.4, 2.0]])
    fixtures.append((K3, np.array([1.0, 1.0, -1.0]), 1.0))
    # duplicate points with opposite labels (non-separable)
    K_dup = np.array([[1.0, 1.0, 0.2], [1.0, 1.0, 0.2], [0.2, 0.2, 1.0]])
    fixtures.append((K_dup, np.array([1.0, -1.0, -1.0]), 2.0))
    # 4 points from random PD kernels
    rng = np.random.default_rng(17)
    for C in (0.5, 1.0, 2.0):
        X = rng.normal(size=(4, 3))
        K = X @ X.T + 0.8 * np.eye(4)
        fixtures.append((K, np.array([1.0, 1.0, -1.0, -1.0]), C))
    return fixtures
