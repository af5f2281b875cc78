# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels.

Single-pass fused loops: each matrix row is read once to accumulate both the
dot product and the squared norm, which beats the multi-pass numpy route on
memory-bound corpus sizes. Buffers are allocated by the Python wrapper.
"""

from libc.math cimport sqrt


def cosine_scores_into(const double[:, ::1] matrix,
                       const double[::1] query,
                       double[::1] out):
    cdef Py_ssize_t n = matrix.shape[0]
    cdef Py_ssize_t d = matrix.shape[1]
    cdef Py_ssize_t i, j
    cdef double dot, sq, qsq = 0.0

    for j in range(d):
        qsq += query[j] * query[j]
    cdef double qnorm = sqrt(qsq)

    with nogil:
        for i in range(n):
            dot = 0.0
            sq = 0.0
            for j in range(d):
                dot += matrix[i, j] * query[j]
                sq += matrix[i, j] * matrix[i, j]
            out[i] = dot / (sqrt(sq) * qnorm)


def greedy_scores_into(const double[:, ::1] pred,
                       const double[:, ::1] target,
                       const double[::1] pred_norms,
                       const double[::1] target_norms,
                       double[::1] best_pred,
                       double[::1] best_target):
    """Fill per-row maxima of the pairwise cosine matrix for both sides.

    ``best_pred`` and ``best_target`` must be pre-filled with -inf.
    """
    cdef Py_ssize_t np_ = pred.shape[0]
    cdef Py_ssize_t nt = target.shape[0]
    cdef Py_ssize_t d = pred.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double dot, cos

    with nogil:
        for i in range(np_):
            for j in range(nt):
                dot = 0.0
                for k in range(d):
                    dot += pred[i, k] * target[j, k]
                cos = dot / (pred_norms[i] * target_norms[j])
                if cos > best_pred[i]:
                    best_pred[i] = cos
                if cos > best_target[j]:
                    best_target[j] = cos
