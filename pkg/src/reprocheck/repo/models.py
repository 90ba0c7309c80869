"""Parsed view of a snapshot, built once and shared by every analyzer."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path, PurePosixPath

from ..patterns import PatternSet, load_patterns
from .acquire import RepoSnapshot
from .code import CodeUnit
from .deps import DependencySpec, parse_dependency_files
from .inventory import FileKind
from .notebook import NotebookModel, NotebookParseError, parse_notebook
from .readme import ReadmeModel, parse_readme

logger = logging.getLogger(__name__)

_README_PREFERENCE = (".md", ".markdown", ".rst", ".txt", "")


@dataclass(frozen=True)
class RepoModels:
    snapshot: RepoSnapshot
    notebooks: tuple[NotebookModel, ...]
    notebook_errors: tuple[NotebookParseError, ...]
    readmes: tuple[ReadmeModel, ...]
    deps: DependencySpec
    code: tuple[CodeUnit, ...]
    skipped: tuple[tuple[str, str], ...]  # (path, reason) for files not content-scanned
    patterns: PatternSet

    @property
    def inventory(self):
        return self.snapshot.inventory

    @property
    def readme(self) -> ReadmeModel | None:
        """The primary README: shallowest path, then markdown before rst before text."""
        if not self.readmes:
            return None

        def rank(r: ReadmeModel) -> tuple:
            p = PurePosixPath(r.path)
            ext = p.suffix.lower()
            pref = _README_PREFERENCE.index(ext) if ext in _README_PREFERENCE else len(_README_PREFERENCE)
            return (len(p.parts), pref, r.path)

        return min(self.readmes, key=rank)

    def read_text(self, rel: str) -> str | None:
        if not self.inventory.is_scannable(rel):
            return None
        try:
            return (self.snapshot.root / rel).read_text(encoding="utf-8", errors="replace")
        except OSError:
            return None

    @cached_property
    def local_modules(self) -> frozenset[str]:
        """Top-level names importable from inside the repository itself."""
        names: set[str] = set()
        for rel in self.inventory.all_files():
            p = PurePosixPath(rel)
            if p.suffix in (".py", ".pyx", ".so", ".ipynb"):
                names.add(p.stem)
                names.update(p.parts[:-1])
        return frozenset(names)


def build_models(snapshot: RepoSnapshot, patterns: PatternSet | None = None) -> RepoModels:
    inv = snapshot.inventory
    root = Path(snapshot.root)
    skipped = [(rel, "skipped: size") for rel in inv.oversize]
    skipped += [(rel, "skipped: unreadable") for rel in inv.unreadable]
    skipped += [(rel, "skipped: symlink not followed") for rel in inv.symlinks]
    skipped += [(rel, "skipped: submodule not recursed") for rel in inv.submodules]

    notebooks: list[NotebookModel] = []
    errors: list[NotebookParseError] = []
    for rel in inv.of(FileKind.NOTEBOOK):
        if not inv.is_scannable(rel):
            continue
        try:
            notebooks.append(parse_notebook(root / rel, rel))
        except NotebookParseError as exc:
            logger.warning("%s", exc)
            errors.append(exc)

    readmes = []
    for rel in inv.of(FileKind.README):
        if inv.is_scannable(rel):
            readmes.append(parse_readme(root / rel, rel))

    code: list[CodeUnit] = []
    for kind, origin in ((FileKind.PYTHON_SOURCE, "script"), (FileKind.TEST_FILE, "test")):
        for rel in inv.of(kind):
            if origin == "test" and not rel.endswith(".py"):
                continue
            if not inv.is_scannable(rel):
                continue
            try:
                text = (root / rel).read_text(encoding="utf-8", errors="replace")
            except OSError:
                skipped.append((rel, "skipped: unreadable"))
                continue
            code.append(CodeUnit(rel, text, origin))
    for nb in notebooks:
        spans = []
        chunks = []
        line = 1
        for cell in nb.code_cells:
            n = cell.source.count("\n") + 1
            spans.append((line, line + n - 1))
            chunks.append(cell.source)
            line += n
        code.append(CodeUnit(nb.path, "\n".join(chunks), "notebook", tuple(spans)))
    code.sort(key=lambda u: u.path)

    return RepoModels(
        snapshot=snapshot,
        notebooks=tuple(notebooks),
        notebook_errors=tuple(errors),
        readmes=tuple(readmes),
        deps=parse_dependency_files(inv, root),
        code=tuple(code),
        skipped=tuple(sorted(skipped)),
        patterns=patterns or load_patterns(),
    )
