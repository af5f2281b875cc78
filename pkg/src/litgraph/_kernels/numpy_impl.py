"""Numpy implementations of the scoring kernels.

Used directly when the compiled extension is unavailable, and as the
reference implementation in tests and benchmarks.
"""

import numpy as np

BACKEND = "numpy"


def cosine_scores(matrix: np.ndarray, query: np.ndarray) -> np.ndarray:
    """Cosine similarity between ``query`` and every row of ``matrix``.

    Rows and the query must be nonzero; callers validate this when the
    vectors enter the store.
    """
    m = np.asarray(matrix, dtype=np.float64)
    q = np.asarray(query, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", m, m))
    return (m @ q) / (norms * np.linalg.norm(q))


def greedy_pair_scores(pred: np.ndarray, target: np.ndarray) -> tuple[float, float]:
    """Greedy max-cosine matching between two token-vector matrices.

    Returns ``(precision, recall)``: precision is the mean over pred rows of
    the best cosine against any target row, recall the symmetric quantity.
    """
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    p = p / np.linalg.norm(p, axis=1, keepdims=True)
    t = t / np.linalg.norm(t, axis=1, keepdims=True)
    sim = p @ t.T
    return float(sim.max(axis=1).mean()), float(sim.max(axis=0).mean())
