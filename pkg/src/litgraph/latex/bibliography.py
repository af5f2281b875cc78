"""Resolve citation keys to reference titles.

Resolution order per key: .bib entries, then .bbl ``\\bibitem`` blocks, then
an in-line ``thebibliography`` environment. Keys that resolve nowhere stay
absent; downstream, an unresolved mention simply produces no edge.
"""

from __future__ import annotations

import re

from ..textutils import collapse_whitespace
from .cleanup import strip_comments
from .tree import SourceTree

_BIB_ENTRY = re.compile(r"@([A-Za-z]+)\s*\{\s*([^,\s{}]+)\s*,")
_TITLE_FIELD = re.compile(r"(?<![A-Za-z])title\s*=\s*", re.IGNORECASE)
_BIBITEM = re.compile(r"\\bibitem\s*(?:\[(?:[^\[\]]|\[[^\]]*\])*\])?\s*\{([^{}]+)\}")
_THEBIB = re.compile(
    r"\\begin\s*\{thebibliography\}.*?\\end\s*\{thebibliography\}", re.DOTALL
)
_EMPH = re.compile(
    r"\\(?:emph|textit|textsl|textbf)\s*\{|\{\\(?:em|it|sl)\s+|``|“|(?<![\w\\])\"",
)
_COMMAND = re.compile(r"\\[A-Za-z@]+\s*")


def _read_balanced(text: str, i: int, open_char: str, close_char: str) -> tuple[str, int] | None:
    if i >= len(text) or text[i] != open_char:
        return None
    depth = 0
    j = i
    while j < len(text):
        c = text[j]
        if c == "\\":
            j += 2
            continue
        if c == open_char:
            depth += 1
        elif c == close_char:
            depth -= 1
            if depth == 0:
                return text[i + 1:j], j + 1
        j += 1
    return None


def _clean_title(raw: str) -> str:
    text = _COMMAND.sub("", raw)
    text = text.replace("{", "").replace("}", "")
    text = text.replace("~", " ")
    return collapse_whitespace(text)


def parse_bib_titles(bib_text: str) -> dict[str, str]:
    """Key-to-title map from a .bib file (braced or quoted title values)."""
    titles: dict[str, str] = {}
    for match in _BIB_ENTRY.finditer(bib_text):
        kind = match.group(1).lower()
        if kind in ("string", "comment", "preamble"):
            continue
        key = match.group(2)
        entry = _read_balanced(bib_text, bib_text.index("{", match.start()), "{", "}")
        if entry is None:
            continue
        body = entry[0]
        field = _TITLE_FIELD.search(body)
        if field is None:
            continue
        i = field.end()
        if i < len(body) and body[i] == "{":
            value = _read_balanced(body, i, "{", "}")
            title = value[0] if value else ""
        elif i < len(body) and body[i] == '"':
            closing = body.find('"', i + 1)
            title = body[i + 1:closing] if closing > 0 else ""
        else:
            title = body[i:].split(",", 1)[0]
        cleaned = _clean_title(title)
        if cleaned and key not in titles:
            titles[key] = cleaned
    return titles


def _first_emphasized_or_quoted(block: str) -> str | None:
    match = _EMPH.search(block)
    if match is None:
        return None
    token = match.group(0)
    if token.startswith("\\") or token.startswith("{"):
        open_index = block.index("{", match.start())
        group = _read_balanced(block, open_index, "{", "}")
        if group is None:
            return None
        raw = group[0]
        if token.startswith("{"):  # {\em text}: drop the font switch
            raw = raw[raw.index(" "):] if " " in raw else raw
        return _clean_title(raw)
    closers = {"``": "''", "“": "”", '"': '"'}
    closer = closers[token]
    end = block.find(closer, match.end())
    if end < 0:
        return None
    return _clean_title(block[match.end():end])


def parse_bibitem_titles(text: str) -> dict[str, str]:
    """Best-effort titles from ``\\bibitem`` blocks.

    The first emphasized or quoted span of a block is taken as the title;
    blocks without one resolve to nothing.
    """
    titles: dict[str, str] = {}
    matches = list(_BIBITEM.finditer(text))
    for index, match in enumerate(matches):
        key = match.group(1).strip()
        end = matches[index + 1].start() if index + 1 < len(matches) else len(text)
        block = text[match.end():end]
        title = _first_emphasized_or_quoted(block)
        if title and key not in titles:
            titles[key] = title
    return titles


def resolve_bibliography(tree: SourceTree, keys: set[str]) -> dict[str, str]:
    """Map each key to a reference title where any source in the tree has one."""
    resolved: dict[str, str] = {}

    def take(candidates: dict[str, str]) -> None:
        for key in keys:
            if key not in resolved and key in candidates:
                resolved[key] = candidates[key]

    for path in sorted(tree.files):
        if path.lower().endswith(".bib"):
            take(parse_bib_titles(tree.files[path]))
    for path in sorted(tree.files):
        if path.lower().endswith(".bbl"):
            take(parse_bibitem_titles(strip_comments(tree.files[path])))
    for path in sorted(tree.files):
        if path.lower().endswith((".tex", ".ltx")):
            stripped = strip_comments(tree.files[path])
            for env in _THEBIB.finditer(stripped):
                take(parse_bibitem_titles(env.group(0)))
    return resolved
