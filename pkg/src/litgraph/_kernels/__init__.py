"""Scoring kernels with a compiled fast path.

The Cython extension is preferred when it was built; otherwise the numpy
implementation is selected at import time. ``BACKEND`` reports which one is
active. ``benchmarks/bench_kernels.py`` compares the two.
"""

import numpy as np

from . import numpy_impl

try:
    from . import _ckernels
except ImportError:  # extension not built; pure fallback
    _ckernels = None

BACKEND = "compiled" if _ckernels is not None else "numpy"


def cosine_scores(matrix, query) -> np.ndarray:
    """Cosine similarity between ``query`` and every row of ``matrix``."""
    if _ckernels is None:
        return numpy_impl.cosine_scores(matrix, query)
    m = np.ascontiguousarray(matrix, dtype=np.float64)
    q = np.ascontiguousarray(query, dtype=np.float64)
    out = np.empty(m.shape[0], dtype=np.float64)
    if m.shape[0]:
        _ckernels.cosine_scores_into(m, q, out)
    return out


def greedy_pair_scores(pred, target) -> tuple[float, float]:
    """Greedy max-cosine matching scores ``(precision, recall)``."""
    if _ckernels is None:
        return numpy_impl.greedy_pair_scores(pred, target)
    p = np.ascontiguousarray(pred, dtype=np.float64)
    t = np.ascontiguousarray(target, dtype=np.float64)
    p_norms = np.linalg.norm(p, axis=1)
    t_norms = np.linalg.norm(t, axis=1)
    best_p = np.full(p.shape[0], -np.inf)
    best_t = np.full(t.shape[0], -np.inf)
    _ckernels.greedy_scores_into(p, t, p_norms, t_norms, best_p, best_t)
    return float(best_p.mean()), float(best_t.mean())
