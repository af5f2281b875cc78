"""Streaming ingestion of arXiv-style metadata snapshots.

The snapshot is JSON-lines, one object per paper. Ingestion never holds more
than the id index in memory: records are normalized and re-serialized to
``corpus.jsonl`` with a sidecar binary offset index (``corpus.idx``) so a
store can be reopened without re-parsing.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import MissingFieldError, SnapshotParseError
from .textutils import collapse_whitespace, normalize_title

log = logging.getLogger(__name__)

_IDX_MAGIC = b"LGIDX1\n"
_MANDATORY = ("id", "title", "abstract")


@dataclass
class PaperRecord:
    """One paper's normalized metadata."""

    paper_id: str
    title: str
    abstract: str
    categories: list[str] = field(default_factory=list)
    version: str | None = None

    def to_json(self) -> str:
        obj = {
            "id": self.paper_id,
            "title": self.title,
            "abstract": self.abstract,
            "categories": self.categories,
        }
        if self.version is not None:
            obj["version"] = self.version
        return json.dumps(obj, ensure_ascii=False, sort_keys=True)


def parse_metadata_line(line: str, line_number: int | None = None) -> PaperRecord:
    """Parse one snapshot line into a normalized :class:`PaperRecord`.

    Whitespace is collapsed and newlines inside title/abstract become single
    spaces. Raises :class:`SnapshotParseError` on malformed JSON and
    :class:`MissingFieldError` when id, title, or abstract is absent or
    empty after normalization.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise SnapshotParseError(f"malformed JSON ({exc.msg})", line_number) from exc
    if not isinstance(obj, dict):
        raise SnapshotParseError("line is not a JSON object", line_number)

    for name in _MANDATORY:
        if name not in obj:
            raise MissingFieldError(name, line_number)

    paper_id = str(obj["id"]).strip()
    title = collapse_whitespace(str(obj["title"]))
    abstract = collapse_whitespace(str(obj["abstract"]))
    for name, value in (("id", paper_id), ("title", title), ("abstract", abstract)):
        if not value:
            raise MissingFieldError(name, line_number)

    categories = obj.get("categories", [])
    if isinstance(categories, str):
        categories = categories.split()
    else:
        categories = [str(c) for c in categories]

    version = obj.get("version")
    if version is None and isinstance(obj.get("versions"), list) and obj["versions"]:
        last = obj["versions"][-1]
        if isinstance(last, dict):
            version = last.get("version")
    if version is not None:
        version = str(version)

    return PaperRecord(paper_id, title, abstract, categories, version)


class CorpusStore:
    """Id-keyed collection of paper records.

    Two backings share one interface: fully in-memory (what
    :func:`build_corpus_index` returns) and file-backed, where only the
    id-to-offset index lives in memory and records are read on demand.
    Stores are immutable once built and safe to share across threads.
    """

    def __init__(self) -> None:
        self._records: dict[str, PaperRecord] = {}
        self._offsets: dict[str, int] | None = None
        self._jsonl_path: Path | None = None
        self._title_index: dict[str, str] | None = None
        self.duplicates: list[str] = []

    # -- construction -----------------------------------------------------

    @classmethod
    def from_records(cls, records: Iterable[PaperRecord]) -> "CorpusStore":
        store = cls()
        for record in records:
            if record.paper_id in store._records:
                store.duplicates.append(record.paper_id)
                log.warning("duplicate paper id %s: keeping first occurrence", record.paper_id)
                continue
            store._records[record.paper_id] = record
        return store

    @classmethod
    def open(cls, jsonl_path: str | Path, idx_path: str | Path | None = None) -> "CorpusStore":
        """Reopen a persisted store using the sidecar offset index."""
        jsonl_path = Path(jsonl_path)
        idx_path = Path(idx_path) if idx_path else jsonl_path.with_suffix(".idx")
        store = cls()
        store._jsonl_path = jsonl_path
        store._offsets = _read_offset_index(idx_path)
        return store

    # -- lookups ----------------------------------------------------------

    @property
    def count(self) -> int:
        if self._offsets is not None:
            return len(self._offsets)
        return len(self._records)

    def __len__(self) -> int:
        return self.count

    def __contains__(self, paper_id: str) -> bool:
        if self._offsets is not None:
            return paper_id in self._offsets
        return paper_id in self._records

    def ids(self) -> list[str]:
        if self._offsets is not None:
            return list(self._offsets)
        return list(self._records)

    def get(self, paper_id: str) -> PaperRecord:
        if self._offsets is not None:
            if paper_id in self._records:
                return self._records[paper_id]
            offset = self._offsets[paper_id]
            assert self._jsonl_path is not None
            with open(self._jsonl_path, "r", encoding="utf-8") as fh:
                fh.seek(offset)
                record = parse_metadata_line(fh.readline())
            self._records[paper_id] = record  # small LRU-less cache; corpus reads cluster
            return record
        return self._records[paper_id]

    def __iter__(self) -> Iterator[PaperRecord]:
        for paper_id in self.ids():
            yield self.get(paper_id)

    def by_title(self, normalized: str) -> str | None:
        """Paper id whose normalized title equals ``normalized``, if any."""
        if self._title_index is None:
            index: dict[str, str] = {}
            for record in self:
                index.setdefault(normalize_title(record.title), record.paper_id)
            self._title_index = index
        return self._title_index.get(normalized)

    # -- persistence --------------------------------------------------------

    def save(self, jsonl_path: str | Path, idx_path: str | Path | None = None) -> None:
        jsonl_path = Path(jsonl_path)
        idx_path = Path(idx_path) if idx_path else jsonl_path.with_suffix(".idx")
        offsets: dict[str, int] = {}
        with open(jsonl_path, "w", encoding="utf-8") as fh:
            for record in self:
                offsets[record.paper_id] = fh.tell()
                fh.write(record.to_json())
                fh.write("\n")
        _write_offset_index(idx_path, offsets)


def build_corpus_index(records: Iterable[PaperRecord]) -> CorpusStore:
    """Index a record stream by paper id; duplicates keep the first occurrence."""
    return CorpusStore.from_records(records)


@dataclass
class IngestStats:
    records: int = 0
    malformed: int = 0
    duplicates: int = 0


def iter_snapshot(path: str | Path, on_error: str = "raise") -> Iterator[PaperRecord]:
    """Yield parsed records from a snapshot file.

    ``on_error='skip'`` logs and drops malformed lines instead of raising.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield parse_metadata_line(line, line_number)
            except SnapshotParseError as exc:
                if on_error == "raise":
                    raise
                log.warning("skipping snapshot line: %s", exc)


def ingest_snapshot(
    snapshot_path: str | Path,
    out_jsonl: str | Path,
    out_idx: str | Path | None = None,
) -> tuple[CorpusStore, IngestStats]:
    """Stream a snapshot into a persisted, file-backed store.

    Memory stays bounded by the id index: each line is parsed, normalized,
    written out, and dropped. Malformed lines are skipped with a warning;
    duplicate ids keep the first occurrence.
    """
    out_jsonl = Path(out_jsonl)
    out_idx = Path(out_idx) if out_idx else out_jsonl.with_suffix(".idx")
    stats = IngestStats()
    offsets: dict[str, int] = {}
    with open(snapshot_path, "r", encoding="utf-8") as src, \
            open(out_jsonl, "w", encoding="utf-8") as dst:
        for line_number, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                record = parse_metadata_line(line, line_number)
            except SnapshotParseError as exc:
                stats.malformed += 1
                log.warning("skipping snapshot line: %s", exc)
                continue
            if record.paper_id in offsets:
                stats.duplicates += 1
                log.warning("duplicate paper id %s: keeping first occurrence", record.paper_id)
                continue
            offsets[record.paper_id] = dst.tell()
            dst.write(record.to_json())
            dst.write("\n")
            stats.records += 1
    _write_offset_index(out_idx, offsets)

    store = CorpusStore()
    store._jsonl_path = out_jsonl
    store._offsets = offsets
    return store, stats


def _write_offset_index(path: Path, offsets: dict[str, int]) -> None:
    with open(path, "wb") as fh:
        fh.write(_IDX_MAGIC)
        fh.write(struct.pack("<Q", len(offsets)))
        for paper_id, offset in offsets.items():
            encoded = paper_id.encode("utf-8")
            fh.write(struct.pack("<IQ", len(encoded), offset))
            fh.write(encoded)


def _read_offset_index(path: Path) -> dict[str, int]:
    offsets: dict[str, int] = {}
    with open(path, "rb") as fh:
        magic = fh.read(len(_IDX_MAGIC))
        if magic != _IDX_MAGIC:
            raise SnapshotParseError(f"{path} is not a corpus offset index")
        (count,) = struct.unpack("<Q", fh.read(8))
        for _ in range(count):
            idlen, offset = struct.unpack("<IQ", fh.read(12))
            paper_id = fh.read(idlen).decode("utf-8")
            offsets[paper_id] = offset
    return offsets
