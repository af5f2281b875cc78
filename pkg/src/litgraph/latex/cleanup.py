"""Comment removal and blocklist-driven cleanup of LaTeX sources."""

from __future__ import annotations

import logging
import re
from importlib import resources

log = logging.getLogger(__name__)

VERBATIM_ENVS = ("verbatim", "verbatim*", "lstlisting", "Verbatim", "minted")

_BEGIN = re.compile(r"\\begin\s*\{([^{}]+)\}")


def _unescaped_percent(line: str, start: int = 0) -> int:
    """Index of the first comment-starting '%' at or after ``start``, or -1."""
    i = start
    while True:
        i = line.find("%", i)
        if i < 0:
            return -1
        backslashes = 0
        j = i - 1
        while j >= 0 and line[j] == "\\":
            backslashes += 1
            j -= 1
        if backslashes % 2 == 0:
            return i
        i += 1


def strip_comments(source: str) -> str:
    """Drop '%' to end-of-line, keeping escaped ``\\%`` and verbatim content.

    Newlines are never removed, so line numbering is preserved.
    """
    out: list[str] = []
    open_verbatim: str | None = None
    for line in source.split("\n"):
        if open_verbatim is not None:
            out.append(line)
            if f"\\end{{{open_verbatim}}}" in line:
                open_verbatim = None
            continue
        cut = _unescaped_percent(line)
        kept = line if cut < 0 else line[:cut]
        # a verbatim block opened on this (kept) part suspends stripping
        for match in _BEGIN.finditer(kept):
            env = match.group(1)
            if env in VERBATIM_ENVS and f"\\end{{{env}}}" not in kept[match.end():]:
                open_verbatim = env
                kept = line  # '%' inside the opened verbatim is content
                break
        out.append(kept)
    return "\n".join(out)


def _load_list(name: str) -> list[str]:
    text = resources.files("litgraph.data").joinpath(name).read_text(encoding="utf-8")
    entries = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.append(line)
    return entries


def default_env_blocklist() -> list[str]:
    return _load_list("env_blocklist.txt")


def default_command_blocklist() -> list[tuple[str, int]]:
    out = []
    for entry in _load_list("command_blocklist.txt"):
        parts = entry.split()
        out.append((parts[0], int(parts[1]) if len(parts) > 1 else 0))
    return out


def _find_matching_end(source: str, env: str, begin_end: int) -> int | None:
    """Index just past the ``\\end{env}`` matching an opened environment."""
    begin_tok = re.compile(r"\\begin\s*\{" + re.escape(env) + r"\}")
    end_tok = re.compile(r"\\end\s*\{" + re.escape(env) + r"\}")
    depth = 1
    pos = begin_end
    while depth:
        next_begin = begin_tok.search(source, pos)
        next_end = end_tok.search(source, pos)
        if next_end is None:
            return None
        if next_begin is not None and next_begin.start() < next_end.start():
            depth += 1
            pos = next_begin.end()
        else:
            depth -= 1
            pos = next_end.end()
    return pos


def _skip_group(source: str, i: int) -> int | None:
    """Index just past a balanced {...} group starting at ``i``."""
    if i >= len(source) or source[i] != "{":
        return None
    depth = 0
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
    return None


def _skip_option(source: str, i: int) -> int:
    """Index past an optional [...] argument (no nesting), or ``i``."""
    if i < len(source) and source[i] == "[":
        close = source.find("]", i)
        if close >= 0:
            return close + 1
    return i


def strip_noninformative(
    source: str,
    env_blocklist: list[str] | None = None,
    command_blocklist: list[tuple[str, int]] | None = None,
) -> str:
    """Remove blocklisted environments and inline commands, keeping prose.

    Math environments are untouched (they are simply not listed). An
    environment without a matching end is left in place with a warning.
    """
    envs = default_env_blocklist() if env_blocklist is None else env_blocklist
    commands = default_command_blocklist() if command_blocklist is None else command_blocklist

    for env in envs:
        begin_tok = re.compile(r"\\begin\s*\{" + re.escape(env) + r"\}")
        pos = 0
        while True:
            match = begin_tok.search(source, pos)
            if match is None:
                break
            end = _find_matching_end(source, env, match.end())
            if end is None:
                log.warning("unbalanced environment %r, leaving in place", env)
                pos = match.end()
                continue
            source = source[:match.start()] + source[end:]
            pos = match.start()

    for name, nargs in commands:
        tok = re.compile(r"\\" + re.escape(name) + r"\*?(?![A-Za-z@])")
        pos = 0
        while True:
            match = tok.search(source, pos)
            if match is None:
                break
            i = match.end()
            taken = 0
            while taken < nargs:
                j = i
                while j < len(source) and source[j] in " \t":
                    j += 1
                if j < len(source) and source[j] == "[":
                    i = _skip_option(source, j)
                    continue
                after = _skip_group(source, j)
                if after is None:
                    break
                i = after
                taken += 1
            source = source[:match.start()] + source[i:]
            pos = match.start()

    return source
