"""Locate named sections in a flattened document."""

from __future__ import annotations

import re

_SECTIONING = re.compile(r"\\(chapter|section|subsection|subsubsection)\*?\s*\{")
_LEVELS = {"chapter": 0, "section": 1, "subsection": 2, "subsubsection": 3}
_END_DOCUMENT = re.compile(r"\\end\s*\{document\}")

RELATED_WORK_ALIASES = ("related work", "prior work", "background")


def _heading_end(source: str, brace_open: int) -> int:
    depth = 0
    i = brace_open
    while i < len(source):
        c = source[i]
        if c == "\\":
            i += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return len(source)


def _sections(source: str) -> list[tuple[int, int, int, str]]:
    """(start, body_start, level, heading) for every sectioning command."""
    found = []
    for match in _SECTIONING.finditer(source):
        end = _heading_end(source, match.end() - 1)
        heading = source[match.end():end - 1]
        found.append((match.start(), end, _LEVELS[match.group(1)], heading))
    return found


def extract_section(
    body: str,
    kind: str,
    related_aliases: tuple[str, ...] = RELATED_WORK_ALIASES,
) -> str | None:
    """Text of the first section whose heading names the requested kind.

    Matching is a case-insensitive substring test: "introduction" for the
    introduction, any of ``related_aliases`` for related work. The section
    runs until the next same-or-higher-level sectioning command. Absent
    sections return None.
    """
    if kind == "introduction":
        needles = ("introduction",)
    elif kind == "related_work":
        needles = tuple(a.lower() for a in related_aliases)
    else:
        raise ValueError(f"unknown section kind {kind!r}")

    sections = _sections(body)
    for index, (_, body_start, level, heading) in enumerate(sections):
        lowered = heading.lower()
        if not any(n in lowered for n in needles):
            continue
        end = len(body)
        for start, _, later_level, _ in sections[index + 1:]:
            if later_level <= level:
                end = start
                break
        stop = _END_DOCUMENT.search(body, body_start, end)
        if stop:
            end = stop.start()
        return body[body_start:end].strip()
    return None
