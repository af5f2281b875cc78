"""Rank corpus papers against a query by cosine similarity.

Two scorers: the title+abstract baseline and the concept method, which scores
against the mean of a paper's three concept-level vectors. Top-k selection is
exact; ties break by ascending paper id.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .embeddings import EmbeddingStore
from .errors import DimensionMismatchError, EmptyStoreError, ZeroVectorError

log = logging.getLogger(__name__)

METHODS = ("concept", "baseline")


@dataclass
class Query:
    text: str
    vector: np.ndarray

    def __post_init__(self) -> None:
        self.vector = np.asarray(self.vector, dtype=np.float64)
        if not np.any(self.vector):
            raise ZeroVectorError("query vector is all-zero")


@dataclass
class RetrievalResult:
    ranked: list[tuple[str, float]]  # (paper_id, score), scores non-increasing
    k: int
    method: str

    def ids(self) -> list[str]:
        return [pid for pid, _ in self.ranked]


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Standard cosine similarity; undefined (error) for all-zero input."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"shape mismatch: {u.shape} vs {v.shape}")
    un = np.linalg.norm(u)
    vn = np.linalg.norm(v)
    if un == 0.0 or vn == 0.0:
        raise ZeroVectorError("cosine is undefined for an all-zero vector")
    return float(np.dot(u, v) / (un * vn))


def concept_score(query: Query, paper_id: str, store: EmbeddingStore) -> float:
    """Cosine between the query and the mean of the paper's level vectors."""
    return cosine(query.vector, store.mean_concept_vector(paper_id))


def baseline_score(query: Query, paper_id: str, store: EmbeddingStore) -> float:
    """Cosine between the query and the paper's title+abstract vector."""
    return cosine(query.vector, store.text_vector(paper_id))


def _score_all(query: Query, store: EmbeddingStore, method: str) -> tuple[list[str], np.ndarray]:
    if method == "concept":
        ids, matrix = store.concept_matrix()
    elif method == "baseline":
        ids, matrix = store.text_matrix()
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if not ids:
        raise EmptyStoreError(f"no papers with {method} vectors in store")
    if matrix.shape[1] != query.vector.size:
        raise DimensionMismatchError(
            f"query dim {query.vector.size} vs store dim {matrix.shape[1]}"
        )
    return ids, _kernels.cosine_scores(matrix, query.vector)


def retrieve_top_k(
    query: Query, store: EmbeddingStore, k: int, method: str = "concept"
) -> RetrievalResult:
    """Exact top-k under the chosen scorer.

    Ids are kept in ascending order before a stable sort on descending score,
    which realizes the ascending-id tie rule. ``k`` beyond the corpus size
    truncates with a warning.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ids, scores = _score_all(query, store, method)
    n = len(ids)
    if k > n:
        log.warning("k=%d exceeds corpus size %d; truncating", k, n)
        k = n
    if k < n:
        part = np.argpartition(-scores, k - 1)[:k]
        threshold = scores[part].min()
        candidates = np.flatnonzero(scores >= threshold)
    else:
        candidates = np.arange(n)
    order = candidates[np.argsort(-scores[candidates], kind="stable")][:k]
    ranked = [(ids[i], float(scores[i])) for i in order]
    return RetrievalResult(ranked=ranked, k=k, method=method)


@dataclass
class Histogram:
    edges: np.ndarray  # len bins+1
    counts: np.ndarray  # len bins

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["bin_lo", "bin_hi", "count"])
        for i, count in enumerate(self.counts):
            writer.writerow([repr(float(self.edges[i])), repr(float(self.edges[i + 1])), int(count)])
        return buf.getvalue()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def similarity_histogram(
    query: Query, store: EmbeddingStore, bins: int = 100, method: str = "concept"
) -> Histogram:
    """Equal-width histogram of all scores over their observed range.

    Counts always sum to the number of scored papers. Degenerate ranges
    (every score identical) land in a single bin.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    _, scores = _score_all(query, store, method)
    counts, edges = np.histogram(scores, bins=bins)
    return Histogram(edges=edges, counts=counts)


def recall_at_k(result: RetrievalResult, ground_truth: Iterable[str]) -> float:
    """Fraction of the ground-truth set present in the ranked ids."""
    truth = set(ground_truth)
    if not truth:
        raise ValueError("ground truth set is empty")
    return len(truth.intersection(result.ids())) / len(truth)
