"""Markdown / reStructuredText README splitting into heading-delimited sections."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

_ATX = re.compile(r"^ {0,3}(#{1,6})\s+(.*?)\s*#*\s*$")
_FENCE = re.compile(r"^ {0,3}(`{3,}|~{3,})\s*([^`]*)$")
_UNDERLINE = re.compile(r"^ {0,3}([=\-~^*+#])\1{2,}\s*$")
_SETEXT_LEVEL = {"=": 1, "-": 2}
_WORD = re.compile(r"[A-Za-z0-9][\w'-]*")
_RST_DIRECTIVE = re.compile(r"^(\s*)\.\.\s+(?:code|code-block|sourcecode)::\s*(\S*)\s*$")
_RST_LITERAL = re.compile(r"^(\s*)\S.*::\s*$")
_MARKDOWN_SUFFIXES = (".md", ".markdown", ".mdown")


@dataclass(frozen=True)
class Heading:
    level: int
    text: str


@dataclass(frozen=True)
class Section:
    heading: Heading | None  # None for text before the first heading
    body: str

    @property
    def word_count(self) -> int:
        return count_words(self.body)


@dataclass(frozen=True)
class CodeBlock:
    info: str
    body: str


@dataclass(frozen=True)
class ReadmeModel:
    path: str
    text: str
    sections: tuple[Section, ...]
    code_blocks: tuple[CodeBlock, ...]

    @property
    def headings(self) -> list[Heading]:
        return [s.heading for s in self.sections if s.heading is not None]

    @property
    def section_map(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for s in self.sections:
            key = s.heading.text if s.heading else ""
            out[key] = out[key] + s.body if key in out else s.body
        return out

    @property
    def word_counts(self) -> dict[str, int]:
        return {k: count_words(v) for k, v in self.section_map.items()}


def count_words(text: str) -> int:
    return len(_WORD.findall(text))


def _indent(line: str) -> int:
    return len(line) - len(line.lstrip(" \t"))


def rst_code_blocks(text: str) -> list[CodeBlock]:
    """Directive (``.. code::``) and ``::`` literal blocks of a reStructuredText document."""
    lines = text.splitlines()
    blocks = []
    i = 0
    while i < len(lines):
        m = _RST_DIRECTIVE.match(lines[i]) or _RST_LITERAL.match(lines[i])
        if not m:
            i += 1
            continue
        info = m.group(2) if m.re is _RST_DIRECTIVE else ""
        base = len(m.group(1))
        j = i + 1
        body = []
        while j < len(lines) and (not lines[j].strip() or _indent(lines[j]) > base):
            body.append(lines[j])
            j += 1
        content = [ln for ln in body if ln.strip() and not ln.strip().startswith(":")]
        if content:
            depth = min(_indent(ln) for ln in content)
            code = "\n".join(ln[depth:] for ln in body if not ln.strip().startswith(":")).strip("\n")
            blocks.append(CodeBlock(info, code + "\n"))
        i = max(j, i + 1)
    return blocks


def parse_readme_text(text: str, path: str = "README.md") -> ReadmeModel:
    lines = text.splitlines(keepends=True)
    sections: list[Section] = []
    blocks: list[CodeBlock] = []
    heading: Heading | None = None
    body: list[str] = []
    fence: str | None = None
    fence_info = ""
    fence_body: list[str] = []

    def flush() -> None:
        if heading is not None or body:
            sections.append(Section(heading, "".join(body)))

    i = 0
    while i < len(lines):
        line = lines[i]
        stripped = line.rstrip("\r\n")
        if fence is not None:
            body.append(line)
            if stripped.strip().startswith(fence) and not stripped.strip().strip(fence[0]):
                blocks.append(CodeBlock(fence_info, "".join(fence_body)))
                fence = None
            else:
                fence_body.append(line)
            i += 1
            continue
        m = _FENCE.match(stripped)
        if m:
            fence = m.group(1)
            fence_info = m.group(2).strip()
            fence_body = []
            body.append(line)
            i += 1
            continue
        m = _ATX.match(stripped)
        if m:
            flush()
            heading, body = Heading(len(m.group(1)), m.group(2).strip()), []
            i += 1
            continue
        nxt = lines[i + 1].rstrip("\r\n") if i + 1 < len(lines) else ""
        u = _UNDERLINE.match(nxt)
        if stripped.strip() and u and not _UNDERLINE.match(stripped):
            flush()
            level = _SETEXT_LEVEL.get(u.group(1), 3)
            heading, body = Heading(level, stripped.strip()), []
            i += 2
            continue
        body.append(line)
        i += 1
    if fence is not None:
        # unterminated fence runs to end of document
        blocks.append(CodeBlock(fence_info, "".join(fence_body)))
    flush()
    if not path.lower().endswith(_MARKDOWN_SUFFIXES):
        blocks.extend(rst_code_blocks(text))
    return ReadmeModel(path=path, text=text, sections=tuple(sections), code_blocks=tuple(blocks))


def parse_readme(path: str | Path, rel: str | None = None) -> ReadmeModel:
    p = Path(path)
    return parse_readme_text(p.read_text(encoding="utf-8", errors="replace"), rel or str(p))
