"""Source trees: multi-file LaTeX projects and their import structure."""

from __future__ import annotations

import logging
import re
import tarfile
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

from ..errors import AmbiguousMainFileError, FlattenDepthError, ImportCycleError, NoMainFileError

log = logging.getLogger(__name__)

MAX_FLATTEN_DEPTH = 32

_IMPORT = re.compile(r"\\(input|include|subfile)(?![A-Za-z])\s*\{([^{}]+)\}")
_INPUT = re.compile(r"\\input(?![A-Za-z])\s*\{([^{}]+)\}")
_INCLUDE = re.compile(r"\\(include|subfile)(?![A-Za-z])\s*\{")
_DOCUMENTCLASS = re.compile(r"\\documentclass(?![A-Za-z])")

_TEXT_SUFFIXES = {".tex", ".bib", ".bbl", ".sty", ".cls", ".ltx"}


@dataclass
class SourceTree:
    """Path-keyed file map for one paper's source archive."""

    files: dict[str, str] = field(default_factory=dict)
    root: str | None = None

    def tex_files(self) -> dict[str, str]:
        return {p: t for p, t in self.files.items() if p.lower().endswith((".tex", ".ltx"))}

    def with_files(self, files: dict[str, str]) -> "SourceTree":
        return SourceTree(files=files, root=self.root)

    @classmethod
    def from_dir(cls, path: str | Path) -> "SourceTree":
        path = Path(path)
        files = {}
        for entry in sorted(path.rglob("*")):
            if entry.is_file() and entry.suffix.lower() in _TEXT_SUFFIXES:
                rel = entry.relative_to(path).as_posix()
                files[rel] = _read_text(entry.read_bytes())
        return cls(files=files)

    @classmethod
    def from_tar(cls, path: str | Path) -> "SourceTree":
        files = {}
        with tarfile.open(path) as tar:
            for member in sorted(tar.getmembers(), key=lambda m: m.name):
                if not member.isfile():
                    continue
                if PurePosixPath(member.name).suffix.lower() not in _TEXT_SUFFIXES:
                    continue
                handle = tar.extractfile(member)
                if handle is None:
                    continue
                files[member.name.lstrip("./")] = _read_text(handle.read())
        return cls(files=files)


def _read_text(raw: bytes) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


def unify_imports(source: str) -> str:
    """Rewrite ``\\include{x}`` and ``\\subfile{x}`` to ``\\input{x}``."""
    return _INCLUDE.sub(r"\\input{", source)


def resolve_import(tree: SourceTree, target: str, importer: str | None = None) -> str | None:
    """Map an import target to a path in the tree, assuming .tex when bare."""
    target = target.strip()
    names = [target] if PurePosixPath(target).suffix else [target, target + ".tex"]
    prefixes = []
    if importer:
        parent = PurePosixPath(importer).parent.as_posix()
        if parent != ".":
            prefixes.append(parent + "/")
    prefixes.append("")
    for prefix in prefixes:
        for name in names:
            candidate = str(PurePosixPath(prefix + name))
            if candidate in tree.files:
                return candidate
    return None


def _import_edges(tree: SourceTree) -> dict[str, list[str]]:
    edges: dict[str, list[str]] = {}
    for path, text in tree.tex_files().items():
        targets = []
        for match in _IMPORT.finditer(text):
            resolved = resolve_import(tree, match.group(2), importer=path)
            if resolved is not None and resolved != path:
                targets.append(resolved)
        edges[path] = targets
    return edges


def find_main_file(tree: SourceTree) -> str:
    """The unique file that declares a document class and is never imported.

    Raises when the import graph has a cycle, no candidate exists, or the
    candidate is not unique.
    """
    if not tree.files:
        raise NoMainFileError("empty source tree")
    edges = _import_edges(tree)

    # cycle check over resolved imports
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {p: WHITE for p in edges}
    def visit(node: str, trail: list[str]) -> None:
        color[node] = GRAY
        trail.append(node)
        for nxt in edges.get(node, ()):
            if color.get(nxt) == GRAY:
                cycle = trail[trail.index(nxt):] + [nxt]
                raise ImportCycleError("import cycle: " + " -> ".join(cycle))
            if color.get(nxt) == WHITE:
                visit(nxt, trail)
        trail.pop()
        color[node] = BLACK

    for path in sorted(edges):
        if color[path] == WHITE:
            visit(path, [])

    imported = {t for targets in edges.values() for t in targets}
    candidates = [
        path for path, text in sorted(tree.tex_files().items())
        if _DOCUMENTCLASS.search(text) and path not in imported
    ]
    if not candidates:
        raise NoMainFileError("no unimported file with a document-class declaration")
    if len(candidates) > 1:
        raise AmbiguousMainFileError(candidates)
    return candidates[0]


def flatten(tree: SourceTree, root: str, max_depth: int = MAX_FLATTEN_DEPTH) -> str:
    """Recursively inline every ``\\input{x}`` starting from ``root``.

    Missing targets splice in empty text with a warning; nesting deeper than
    ``max_depth`` raises :class:`FlattenDepthError`.
    """

    def expand(path: str, depth: int) -> str:
        if depth > max_depth:
            raise FlattenDepthError(f"input nesting exceeded {max_depth} at {path}")
        text = tree.files[path]

        def splice(match: re.Match) -> str:
            resolved = resolve_import(tree, match.group(1), importer=path)
            if resolved is None:
                log.warning("%s: missing input file %r, splicing empty", path, match.group(1))
                return ""
            return expand(resolved, depth + 1)

        return _INPUT.sub(splice, text)

    return expand(root, 0)
