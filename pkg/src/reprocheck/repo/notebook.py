"""Notebook JSON parsing (nbformat 3 and 4 layouts)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any


class NotebookParseError(ValueError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


@dataclass(frozen=True)
class Cell:
    kind: str  # "code" or "markdown"
    source: str
    execution_count: int | None = None
    outputs: tuple[dict, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.source.strip()


@dataclass(frozen=True)
class NotebookModel:
    path: str
    cells: tuple[Cell, ...]

    @property
    def code_cells(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.kind == "code")

    @property
    def markdown_cells(self) -> tuple[Cell, ...]:
        return tuple(c for c in self.cells if c.kind == "markdown")

    @property
    def execution_counts(self) -> list[int]:
        """Present execution counts of code cells, in cell order."""
        return [c.execution_count for c in self.code_cells if c.execution_count is not None]

    def code_text(self) -> str:
        return "\n".join(c.source for c in self.code_cells)

    def has_outputs(self) -> bool:
        return any(c.outputs for c in self.code_cells)


def _text(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return "".join(str(v) for v in value)
    return str(value)


def _count(value: Any) -> int | None:
    if isinstance(value, bool) or not isinstance(value, int):
        return None
    return value


def _cell(raw: dict) -> Cell:
    cell_type = raw.get("cell_type", "code")
    if cell_type == "code":
        source = raw.get("source", raw.get("input", ""))
        count = raw.get("execution_count", raw.get("prompt_number"))
        outputs = raw.get("outputs") or []
        return Cell(
            kind="code",
            source=_text(source),
            execution_count=_count(count),
            outputs=tuple(o for o in outputs if isinstance(o, dict)),
        )
    # markdown, raw and nbformat-3 heading cells are all prose
    return Cell(kind="markdown", source=_text(raw.get("source", "")))


def parse_notebook_text(text: str, path: str = "<string>") -> NotebookModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotebookParseError(path, f"malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(doc, dict):
        raise NotebookParseError(path, "top-level value is not an object")

    if "cells" in doc:
        raw_cells = doc["cells"]
    elif "worksheets" in doc:
        raw_cells = [c for ws in doc.get("worksheets") or [] for c in ws.get("cells", [])]
    else:
        raw_cells = []
    if not isinstance(raw_cells, list):
        raise NotebookParseError(path, "cells is not a list")
    return NotebookModel(path=path, cells=tuple(_cell(c) for c in raw_cells if isinstance(c, dict)))


def parse_notebook(path: str | Path, rel: str | None = None) -> NotebookModel:
    """Parse a notebook file; ``rel`` overrides the path recorded in the model."""
    p = Path(path)
    label = rel or str(p)
    try:
        text = p.read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise NotebookParseError(label, f"unreadable ({exc})") from exc
    return parse_notebook_text(text, label)
