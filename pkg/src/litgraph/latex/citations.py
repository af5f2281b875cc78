"""Citation-command standardization and citing-sentence extraction."""

from __future__ import annotations

import re

# \citep, \citet, \citealp, \citealt, \citeauthor, \parencite, \textcite and
# their starred / capitalized / optional-argument variants all collapse to
# \cite{keys}; bracketed arguments are dropped.
_CITE_VARIANT = re.compile(
    r"\\[Cc]ite(?:p|t|alp|alt|author)?\*?(?:\s*\[[^\]]*\]){0,2}\s*\{([^{}]*)\}"
    r"|\\[Pp]arencite\*?(?:\s*\[[^\]]*\]){0,2}\s*\{([^{}]*)\}"
    r"|\\[Tt]extcite\*?(?:\s*\[[^\]]*\]){0,2}\s*\{([^{}]*)\}"
)

_CITE = re.compile(r"\\cite\{([^{}]*)\}")

# Tokens that end with a period but do not end a sentence.
ABBREVIATIONS = {
    "al.", "fig.", "figs.", "eq.", "eqs.", "sec.", "secs.", "tab.", "tabs.",
    "ref.", "refs.", "no.", "vs.", "cf.", "e.g.", "i.e.", "resp.", "etc.",
    "dr.", "mr.", "ms.", "prof.", "st.", "vol.", "ch.", "pp.", "p.",
}

_BOUNDARY = re.compile(r"[.?!](?=\s)")


def standardize_citations(body: str) -> str:
    """Rewrite every supported citation command to plain ``\\cite{keys}``."""

    def rewrite(match: re.Match) -> str:
        keys = next(g for g in match.groups() if g is not None)
        return "\\cite{" + keys + "}"

    return _CITE_VARIANT.sub(rewrite, body)


def cite_keys(body: str) -> list[str]:
    """All citation keys in order of appearance (duplicates preserved)."""
    keys = []
    for match in _CITE.finditer(body):
        keys.extend(k.strip() for k in match.group(1).split(",") if k.strip())
    return keys


def _is_abbreviation(text: str, period_index: int) -> bool:
    start = period_index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start:period_index + 1].lstrip("([{'\"`")
    if len(token) == 2 and token[0].isupper() and token[0].isalpha():
        return True  # single-capital initial, e.g. "J."
    return token.lower() in ABBREVIATIONS


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Half-open (start, end) spans covering the text, split at boundaries.

    A boundary is '.', '?', or '!' followed by whitespace, unless the period
    terminates a known abbreviation.
    """
    spans = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        i = match.start()
        if text[i] == "." and _is_abbreviation(text, i):
            continue
        spans.append((start, i + 1))
        start = i + 1
    if start < len(text):
        spans.append((start, len(text)))
    return spans


def extract_citation_sentences(body: str, key: str) -> list[str]:
    """Enclosing sentence for each ``\\cite`` occurrence carrying ``key``."""
    positions = [
        match.start()
        for match in _CITE.finditer(body)
        if key in [k.strip() for k in match.group(1).split(",")]
    ]
    if not positions:
        return []
    spans = sentence_spans(body)
    sentences = []
    for pos in positions:
        for start, end in spans:
            if start <= pos < end:
                sentences.append(body[start:end].strip())
                break
    return sentences
