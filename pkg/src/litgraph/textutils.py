"""Small text helpers shared across modules."""

import re

_WS = re.compile(r"\s+")
_LATEX_COMMAND = re.compile(r"\\[A-Za-z@]+\*?")
_PUNCT = re.compile(r"[^\w\s]")


def collapse_whitespace(text: str) -> str:
    """Collapse runs of whitespace (including newlines) to single spaces."""
    return _WS.sub(" ", text).strip()


def normalize_title(title: str) -> str:
    """Canonical form used to match cited titles against corpus titles.

    Lowercase, LaTeX commands stripped, punctuation removed, whitespace
    collapsed. Idempotent.
    """
    text = _LATEX_COMMAND.sub(" ", title)
    text = text.replace("{", " ").replace("}", " ")
    text = _PUNCT.sub("", text)
    return collapse_whitespace(text).lower()


def whitespace_tokens(text: str) -> int:
    """Token estimate: number of whitespace-separated chunks."""
    return len(text.split())
