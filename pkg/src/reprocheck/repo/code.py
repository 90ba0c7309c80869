"""Python source views shared by the analyzers: scripts and notebook code."""

from __future__ import annotations

import ast
import io
import re
import tokenize
from dataclasses import dataclass
from functools import cached_property

_MAGIC = re.compile(r"^(\s*)([%!?]|%%)")
_IMPORT_RE = re.compile(r"^\s*(?:from\s+([A-Za-z_][\w.]*)\s+import|import\s+([A-Za-z_][\w.]*(?:\s*,\s*[A-Za-z_][\w.]*)*))", re.MULTILINE)


def strip_magics(text: str) -> str:
    """Comment out IPython magics and shell escapes so the text parses as Python."""
    out = []
    for line in text.splitlines():
        m = _MAGIC.match(line)
        out.append(f"{m.group(1)}#{line[len(m.group(1)):]}" if m else line)
    return "\n".join(out)


@dataclass(frozen=True)
class CodeUnit:
    """One scanned code file: a script, a test module, or a notebook's code cells."""

    path: str
    text: str
    origin: str  # "script", "test" or "notebook"
    # (first line, last line) in ``text`` for each notebook cell, used for line evidence
    cell_spans: tuple[tuple[int, int], ...] = ()

    @cached_property
    def python_text(self) -> str:
        return strip_magics(self.text) if self.origin == "notebook" else self.text

    @cached_property
    def tree(self) -> ast.Module | None:
        try:
            return ast.parse(self.python_text)
        except (SyntaxError, ValueError):
            if self.origin != "notebook":
                return None
        # notebooks: fall back to parsing cell by cell and keeping what parses
        body: list[ast.stmt] = []
        lines = self.python_text.splitlines()
        for first, last in self.cell_spans:
            chunk = "\n".join(lines[first - 1:last])
            try:
                mod = ast.parse(chunk)
            except (SyntaxError, ValueError):
                continue
            ast.increment_lineno(mod, first - 1)
            body.extend(mod.body)
        return ast.Module(body=body, type_ignores=[]) if body else None

    @cached_property
    def imports(self) -> tuple[str, ...]:
        """Top-level absolute import names, sorted and unique."""
        names: set[str] = set()
        if self.tree is not None:
            for node in ast.walk(self.tree):
                if isinstance(node, ast.Import):
                    names.update(a.name.split(".")[0] for a in node.names)
                elif isinstance(node, ast.ImportFrom) and node.level == 0 and node.module:
                    names.add(node.module.split(".")[0])
        else:
            for m in _IMPORT_RE.finditer(self.python_text):
                if m.group(1):
                    names.add(m.group(1).split(".")[0])
                else:
                    names.update(n.strip().split(".")[0] for n in m.group(2).split(","))
        return tuple(sorted(n for n in names if n))

    def line_of(self, offset: int) -> int:
        return self.text.count("\n", 0, offset) + 1

    def lines(self) -> list[str]:
        return self.text.splitlines()

    def comment_stats(self) -> tuple[int, int]:
        """(comment-bearing lines, non-blank lines); docstring lines count as comments."""
        text = self.python_text
        nonblank = {i for i, ln in enumerate(text.splitlines(), 1) if ln.strip()}
        commented: set[int] = set()
        try:
            for tok in tokenize.generate_tokens(io.StringIO(text).readline):
                if tok.type == tokenize.COMMENT and not (tok.start[0] == 1 and tok.string.startswith("#!")):
                    commented.add(tok.start[0])
        except (tokenize.TokenError, IndentationError, SyntaxError):
            commented = {i for i, ln in enumerate(text.splitlines(), 1) if ln.lstrip().startswith("#")}
        if self.tree is not None:
            for node in ast.walk(self.tree):
                if isinstance(node, (ast.Module, ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                    body = node.body
                    if body and isinstance(body[0], ast.Expr) and isinstance(getattr(body[0], "value", None), ast.Constant) \
                            and isinstance(body[0].value.value, str):
                        commented.update(range(body[0].lineno, (body[0].end_lineno or body[0].lineno) + 1))
        return len(commented & nonblank), len(nonblank)

    def public_symbols(self) -> list[tuple[str, int, bool]]:
        """(qualified name, line, has docstring) for public functions, classes and methods."""
        out: list[tuple[str, int, bool]] = []
        if self.tree is None:
            return out

        def visit(body: list[ast.stmt], prefix: str) -> None:
            for node in body:
                if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                    if node.name.startswith("_"):
                        continue
                    out.append((prefix + node.name, node.lineno, ast.get_docstring(node) is not None))
                    if isinstance(node, ast.ClassDef):
                        visit(node.body, prefix + node.name + ".")

        visit(self.tree.body, "")
        return out

    def silent_failures(self) -> list[int]:
        """Lines of catch-all handlers whose body is only ``pass`` / ``...``."""
        hits: list[int] = []
        if self.tree is None:
            for m in re.finditer(r"^\s*except\s*(?:(?:Base)?Exception\s*(?:as\s+\w+\s*)?)?:\s*(?:\n\s*)?pass\b",
                                 self.python_text, re.MULTILINE):
                hits.append(self.line_of(m.start()))
            return hits
        for node in ast.walk(self.tree):
            if not isinstance(node, ast.ExceptHandler):
                continue
            catch_all = node.type is None or (
                isinstance(node.type, ast.Name) and node.type.id in ("Exception", "BaseException")
            )
            swallow = all(
                isinstance(s, ast.Pass)
                or (isinstance(s, ast.Expr) and isinstance(s.value, ast.Constant) and s.value.value is Ellipsis)
                for s in node.body
            )
            if catch_all and swallow:
                hits.append(node.lineno)
        return sorted(hits)
