"""Author-macro expansion: collect definitions, expand uses, drop definitions.

Handled forms: ``\\newcommand``/``\\renewcommand`` (optionally starred, up to
nine positional arguments), ``\\def`` with simple ``#1..#n`` parameter text,
and ``\\DeclareMathOperator``. Optional-default definitions and delimited
``\\def`` parameters are out of scope and left untouched, as is anything a
fixed number of expansion passes cannot settle.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

log = logging.getLogger(__name__)

MAX_EXPANSION_PASSES = 16

_DEF_HEAD = re.compile(r"\\(?:e|g)?def\s*\\([A-Za-z@]+)((?:#[1-9])*)\s*(?=\{)")
_NEWCOMMAND_HEAD = re.compile(
    r"\\(re)?newcommand\*?\s*(?:\{\s*\\([A-Za-z@]+)\s*\}|\\([A-Za-z@]+))\s*"
    r"(?:\[\s*([0-9])\s*\])?\s*(\[)?"
)
_MATHOP_HEAD = re.compile(r"\\DeclareMathOperator(\*?)\s*\{\s*\\([A-Za-z@]+)\s*\}\s*(?=\{)")


@dataclass
class Macro:
    name: str
    nargs: int
    body: str


def _read_group(source: str, i: int) -> tuple[str, int] | None:
    """Content of the balanced {...} group at ``i`` and the index past it."""
    if i >= len(source) or source[i] != "{":
        return None
    depth = 0
    j = i
    while j < len(source):
        c = source[j]
        if c == "\\":
            j += 2
            continue
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return source[i + 1:j], j + 1
        j += 1
    return None


def _consume_trailing_blank(source: str, i: int) -> int:
    """Past any spaces after a removed definition, plus one blank-line newline."""
    j = i
    while j < len(source) and source[j] in " \t":
        j += 1
    if j < len(source) and source[j] == "\n":
        j += 1
    return j


def _collect_definitions(source: str) -> tuple[str, dict[str, Macro]]:
    macros: dict[str, Macro] = {}
    out: list[str] = []
    i = 0
    n = len(source)
    while i < n:
        if source[i] != "\\":
            nxt = source.find("\\", i)
            if nxt < 0:
                out.append(source[i:])
                break
            out.append(source[i:nxt])
            i = nxt

        match = _NEWCOMMAND_HEAD.match(source, i)
        if match:
            if match.group(5):  # optional-default form: unsupported, keep verbatim
                out.append(source[i:match.end()])
                i = match.end()
                continue
            name = match.group(2) or match.group(3)
            nargs = int(match.group(4) or 0)
            group = _read_group(source, match.end())
            if group is None:
                out.append(source[i:match.end()])
                i = match.end()
                continue
            body, after = group
            macros[name] = Macro(name, nargs, body)
            i = _consume_trailing_blank(source, after)
            continue

        match = _DEF_HEAD.match(source, i)
        if match:
            name = match.group(1)
            params = match.group(2)
            group = _read_group(source, match.end())
            if group is None:
                out.append(source[i:match.end()])
                i = match.end()
                continue
            body, after = group
            nargs = len(params) // 2
            if params != "".join(f"#{k}" for k in range(1, nargs + 1)):
                out.append(source[i:after])  # delimited parameters: leave as-is
                i = after
                continue
            macros[name] = Macro(name, nargs, body)
            i = _consume_trailing_blank(source, after)
            continue

        match = _MATHOP_HEAD.match(source, i)
        if match:
            group = _read_group(source, match.end())
            if group is None:
                out.append(source[i:match.end()])
                i = match.end()
                continue
            body, after = group
            star = match.group(1)
            macros[match.group(2)] = Macro(
                match.group(2), 0, f"\\operatorname{star}{{{body}}}"
            )
            i = _consume_trailing_blank(source, after)
            continue

        out.append(source[i:i + 2])
        i += 2
    return "".join(out), macros


def _substitute(body: str, args: list[str]) -> str:
    for k in range(len(args), 0, -1):
        body = body.replace(f"#{k}", args[k - 1])
    return body


def _expand_once(source: str, macros: dict[str, Macro]) -> tuple[str, int]:
    """One left-to-right pass replacing every known macro use."""
    use = re.compile(
        r"\\(" + "|".join(sorted((re.escape(n) for n in macros), key=len, reverse=True))
        + r")(?![A-Za-z@])"
    )
    out: list[str] = []
    i = 0
    replaced = 0
    n = len(source)
    while i < n:
        match = use.search(source, i)
        if match is None:
            out.append(source[i:])
            break
        out.append(source[i:match.start()])
        macro = macros[match.group(1)]
        j = match.end()
        args: list[str] = []
        ok = True
        for _ in range(macro.nargs):
            while j < n and source[j] in " \t\n":
                j += 1
            group = _read_group(source, j)
            if group is not None:
                arg, j = group
            elif j < n and source[j] == "\\":
                tok = re.match(r"\\[A-Za-z@]+|\\.", source[j:])
                if tok is None:
                    ok = False
                    break
                arg = tok.group(0)
                j += len(arg)
            elif j < n:
                arg = source[j]
                j += 1
            else:
                ok = False
                break
            args.append(arg)
        if not ok:
            out.append(source[match.start():match.end()])
            i = match.end()
            continue
        out.append(_substitute(macro.body, args))
        replaced += 1
        i = j
    return "".join(out), replaced


def demacro(source: str) -> str:
    """Expand author-defined macros to a fixed point and drop the definitions."""
    source, macros = _collect_definitions(source)
    if not macros:
        return source
    for _ in range(MAX_EXPANSION_PASSES):
        source, replaced = _expand_once(source, macros)
        if replaced == 0:
            return source
    log.warning(
        "macro expansion did not settle after %d passes; leaving remaining uses",
        MAX_EXPANSION_PASSES,
    )
    return source
