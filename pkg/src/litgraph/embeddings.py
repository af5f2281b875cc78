"""Embedding store for concept-level and title+abstract vectors.

A paper carries either all three level vectors or none; the title+abstract
vector is optional. All vectors in a store share one dimension. The store is
single-writer during population and treated as immutable afterward, so the
frozen score matrices can be cached and shared.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from .clients import EmbeddingClient
from .concepts import ConceptSet
from .corpus import PaperRecord
from .errors import DimensionMismatchError, EmbeddingError, MissingEmbeddingError

log = logging.getLogger(__name__)

TEXT_LEVEL = "text"


def _as_vector(values: Sequence[float], dim: int | None) -> np.ndarray:
    vec = np.asarray(values, dtype=np.float64)
    if vec.ndim != 1 or vec.size == 0:
        raise EmbeddingError("embedding must be a non-empty 1-d vector")
    if not np.all(np.isfinite(vec)):
        raise EmbeddingError("embedding contains non-finite entries")
    if not np.any(vec):
        raise EmbeddingError("embedding is all-zero")
    if dim is not None and vec.size != dim:
        raise DimensionMismatchError(f"expected dim {dim}, got {vec.size}")
    return vec


class EmbeddingStore:
    def __init__(self, dim: int | None = None):
        self.dim = dim
        self._levels: dict[str, np.ndarray] = {}  # (3, dim) per paper
        self._text: dict[str, np.ndarray] = {}
        self._concept_cache: tuple[list[str], np.ndarray] | None = None
        self._text_cache: tuple[list[str], np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self._levels)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._levels

    def ids(self) -> list[str]:
        return sorted(self._levels)

    def add_concept_vectors(
        self, paper_id: str, vectors: Sequence[Sequence[float]]
    ) -> None:
        if len(vectors) != 3:
            raise EmbeddingError(f"{paper_id}: need exactly 3 level vectors")
        rows = [_as_vector(v, self.dim) for v in vectors]
        if self.dim is None:
            self.dim = rows[0].size
            rows = [_as_vector(v, self.dim) for v in vectors]
        self._levels[paper_id] = np.vstack(rows)
        self._concept_cache = None

    def add_text_vector(self, paper_id: str, vector: Sequence[float]) -> None:
        vec = _as_vector(vector, self.dim)
        if self.dim is None:
            self.dim = vec.size
        self._text[paper_id] = vec
        self._text_cache = None

    def level_vectors(self, paper_id: str) -> np.ndarray:
        try:
            return self._levels[paper_id]
        except KeyError:
            raise MissingEmbeddingError(f"{paper_id}: no concept-level vectors") from None

    def mean_concept_vector(self, paper_id: str) -> np.ndarray:
        return self.level_vectors(paper_id).mean(axis=0)

    def text_vector(self, paper_id: str) -> np.ndarray:
        try:
            return self._text[paper_id]
        except KeyError:
            raise MissingEmbeddingError(f"{paper_id}: no title+abstract vector") from None

    # -- frozen matrices for bulk scoring ----------------------------------

    def concept_matrix(self) -> tuple[list[str], np.ndarray]:
        """Ascending paper ids and the matrix of mean level vectors."""
        if self._concept_cache is None:
            ids = self.ids()
            if ids:
                matrix = np.stack([self._levels[i].mean(axis=0) for i in ids])
            else:
                matrix = np.empty((0, self.dim or 0))
            self._concept_cache = (ids, matrix)
        return self._concept_cache

    def text_matrix(self) -> tuple[list[str], np.ndarray]:
        """Ascending ids of papers that have a title+abstract vector."""
        if self._text_cache is None:
            ids = sorted(self._text)
            if ids:
                matrix = np.stack([self._text[i] for i in ids])
            else:
                matrix = np.empty((0, self.dim or 0))
            self._text_cache = (ids, matrix)
        return self._text_cache

    # -- persistence --------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """One JSON line per vector: ``{paper_id, level, vector}``.

        Levels 1..3 are the concept vectors; level "text" is the optional
        title+abstract vector. Floats round-trip exactly.
        """
        with open(path, "w", encoding="utf-8") as fh:
            for paper_id in self.ids():
                rows = self._levels[paper_id]
                for level in (1, 2, 3):
                    fh.write(json.dumps(
                        {"paper_id": paper_id, "level": level,
                         "vector": rows[level - 1].tolist()},
                    ))
                    fh.write("\n")
            for paper_id in sorted(self._text):
                fh.write(json.dumps(
                    {"paper_id": paper_id, "level": TEXT_LEVEL,
                     "vector": self._text[paper_id].tolist()},
                ))
                fh.write("\n")


def load_precomputed_embeddings(path: str | Path, dim: int | None = None) -> EmbeddingStore:
    """Load an ``embeddings.jsonl`` file.

    Corrupt rows are reported with their index and skipped; a vector whose
    dimension disagrees with the declared or first-seen dimension is fatal.
    Papers with only some of the three level vectors are dropped entirely,
    with a warning.
    """
    by_paper: dict[str, dict[int, np.ndarray]] = {}
    text: dict[str, np.ndarray] = {}
    seen_dim = dim
    with open(path, "r", encoding="utf-8") as fh:
        for row_index, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                paper_id = str(obj["paper_id"])
                level = obj["level"]
                vec = _as_vector(obj["vector"], seen_dim)
            except DimensionMismatchError as exc:
                raise DimensionMismatchError(f"row {row_index}: {exc}") from exc
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, EmbeddingError) as exc:
                log.warning("embeddings row %d: skipping corrupt row (%s)", row_index, exc)
                continue
            if seen_dim is None:
                seen_dim = vec.size
            if level == TEXT_LEVEL:
                text[paper_id] = vec
            elif level in (1, 2, 3):
                by_paper.setdefault(paper_id, {})[int(level)] = vec
            else:
                log.warning("embeddings row %d: unknown level %r, skipping", row_index, level)

    store = EmbeddingStore(dim=seen_dim)
    for paper_id, levels in by_paper.items():
        if set(levels) != {1, 2, 3}:
            log.warning("%s: incomplete level vectors %s, skipping paper",
                        paper_id, sorted(levels))
            continue
        store.add_concept_vectors(paper_id, [levels[1], levels[2], levels[3]])
        if paper_id in text:
            store.add_text_vector(paper_id, text[paper_id])
    return store


def level_embedding(labels: Sequence[str], embedder: EmbeddingClient) -> np.ndarray:
    """Embed one concept level: the three labels joined as ``"A; B; C"``.

    Join order matters; permuted labels may legitimately embed differently.
    """
    if not labels or any(not str(l).strip() for l in labels):
        raise EmbeddingError("concept labels must be non-empty")
    joined = "; ".join(str(l) for l in labels)
    rows = embedder.embed([joined])
    return _as_vector(rows[0], None)


def text_embedding(record: PaperRecord, embedder: EmbeddingClient) -> np.ndarray:
    """Embed the title and abstract joined by a single space."""
    rows = embedder.embed([record.title + " " + record.abstract])
    return _as_vector(rows[0], None)


def build_embedding_store(
    records: Sequence[PaperRecord],
    concepts: dict[str, ConceptSet],
    embedder: EmbeddingClient,
    include_text: bool = True,
) -> EmbeddingStore:
    """Embed every record that has a concept set; optionally also its text."""
    store = EmbeddingStore()
    for record in records:
        cset = concepts.get(record.paper_id)
        if cset is None:
            log.warning("%s: no concepts, skipping embedding", record.paper_id)
            continue
        vectors = [level_embedding(cset.level(i), embedder) for i in (1, 2, 3)]
        store.add_concept_vectors(record.paper_id, vectors)
        if include_text:
            store.add_text_vector(record.paper_id, text_embedding(record, embedder))
    return store
