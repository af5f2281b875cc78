"""Three-level concept annotation of papers via an LLM endpoint.

Each paper gets nine topic labels: three labels at each of three abstraction
levels, from broad discipline (level 1) down to fine-grained theme (level 3).
Completions must come back as a simple numbered list; anything else errs
loudly rather than guessing.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .clients import CompletionClient, with_retries
from .corpus import PaperRecord
from .errors import ConceptParseError, GenerationError

log = logging.getLogger(__name__)

LEVEL_PROMPTS: dict[int, str] = {
    1: (
        "Given a scientific paper, identify the three major academic disciplines or "
        "broad scientific fields that are most relevant to the paper's content. Avoid "
        "sub-disciplines or specific research areas. Focus on the fundamental scientific "
        "domains that encompass the paper's core concepts and methodologies. Present "
        "these disciplines in a simple numbered list. Here is the title and abstract "
        "of the paper: {Title}{Abstract}"
    ),
    2: (
        "Given a scientific paper, identify the three major scientific fields that are "
        "most relevant to the paper's content. Present these disciplines in a simple "
        "numbered list. Here is the title and abstract of the paper: {Title}{Abstract}"
    ),
    3: (
        "Given a scientific paper, generate a list of three very high-level topics of "
        "maximum three words that summarize the main areas covered in the paper. These "
        "topics should be broad categories that capture the key themes of the paper. "
        "Present these disciplines in a simple numbered list. Here is the title and "
        "abstract of the paper: {Title}{Abstract}"
    ),
}

_ITEM = re.compile(r"^\s*\d+[.)]\s*(.*\S)\s*$")


@dataclass
class ConceptSet:
    """Nine labels for one paper: three per abstraction level."""

    paper_id: str
    levels: list[list[str]]  # levels[0] is level 1 (broadest)

    def __post_init__(self) -> None:
        if len(self.levels) != 3 or any(len(lv) != 3 for lv in self.levels):
            raise ValueError(f"{self.paper_id}: concepts must be 3 levels x 3 labels")
        if any(not label.strip() for lv in self.levels for label in lv):
            raise ValueError(f"{self.paper_id}: empty concept label")

    def level(self, i: int) -> list[str]:
        return self.levels[i - 1]

    def all_labels(self) -> list[str]:
        return [label for lv in self.levels for label in lv]


def build_concept_prompt(record: PaperRecord, level: int) -> str:
    """Fill the level template with the paper's title and abstract."""
    if level not in LEVEL_PROMPTS:
        raise ValueError(f"level must be 1, 2, or 3, got {level}")
    template = LEVEL_PROMPTS[level]
    return template.replace("{Title}", record.title).replace("{Abstract}", record.abstract)


def parse_numbered_list(completion: str) -> list[str]:
    """First three items of a numbered list ("1." or "1)" prefixes).

    Trailing periods are trimmed, extra items dropped. Raises
    :class:`ConceptParseError` when fewer than three items parse.
    """
    items: list[str] = []
    for line in completion.splitlines():
        match = _ITEM.match(line)
        if not match:
            continue
        label = match.group(1).strip().rstrip(".").strip()
        if label:
            items.append(label)
        if len(items) == 3:
            return items
    raise ConceptParseError(
        f"expected a numbered list with 3 items, found {len(items)}", completion
    )


def generate_concepts(
    record: PaperRecord,
    llm: CompletionClient,
    attempts: int = 3,
    backoff: float = 1.0,
    sleep: Callable[[float], None] = time.sleep,
) -> ConceptSet:
    """Prompt the endpoint once per level and parse each reply to 3 labels.

    Endpoint failures are retried with exponential backoff and become
    :class:`GenerationError` when exhausted; malformed completions raise
    :class:`ConceptParseError` immediately, tagged with the level.
    """
    levels: list[list[str]] = []
    for level in (1, 2, 3):
        prompt = build_concept_prompt(record, level)
        try:
            completion = with_retries(
                lambda: llm.complete(prompt), attempts=attempts, backoff=backoff, sleep=sleep
            )
        except ConceptParseError:
            raise
        except Exception as exc:
            raise GenerationError(
                f"{record.paper_id}: level {level} generation failed after {attempts} attempts: {exc}"
            ) from exc
        try:
            levels.append(parse_numbered_list(completion))
        except ConceptParseError as exc:
            raise ConceptParseError(
                f"{record.paper_id}: level {level}: {exc}", exc.completion
            ) from exc
    return ConceptSet(record.paper_id, levels)


def save_concepts(concepts: dict[str, ConceptSet], path: str | Path) -> None:
    """Write one JSON line per (paper, level): ``{paper_id, level, labels}``."""
    with open(path, "w", encoding="utf-8") as fh:
        for paper_id in sorted(concepts):
            cset = concepts[paper_id]
            for level in (1, 2, 3):
                fh.write(json.dumps(
                    {"paper_id": paper_id, "level": level, "labels": cset.level(level)},
                    ensure_ascii=False, sort_keys=True,
                ))
                fh.write("\n")


def load_concepts(path: str | Path) -> dict[str, ConceptSet]:
    """Load concept sets; papers missing any level are skipped with a warning."""
    by_paper: dict[str, dict[int, list[str]]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for row_index, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                paper_id = str(obj["paper_id"])
                level = int(obj["level"])
                labels = [str(x) for x in obj["labels"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                log.warning("concepts row %d: skipping corrupt row (%s)", row_index, exc)
                continue
            by_paper.setdefault(paper_id, {})[level] = labels
    result: dict[str, ConceptSet] = {}
    for paper_id, levels in by_paper.items():
        if set(levels) != {1, 2, 3}:
            log.warning("%s: incomplete concept levels %s, skipping", paper_id, sorted(levels))
            continue
        result[paper_id] = ConceptSet(paper_id, [levels[1], levels[2], levels[3]])
    return result
