"""Category D: documentation."""

from __future__ import annotations

import re
from pathlib import PurePosixPath

from ..repo.inventory import FileKind
from ..repo.models import RepoModels
from ..repo.readme import ReadmeModel, parse_readme_text
from .base import ResultBuilder, SubMetricResult, analyzer
from .environment import make_targets

SECTION_RULES = {
    "install": re.compile(r"install|set[\s-]?up\b|getting started|environment|conda|virtualenv|build", re.I),
    "run": re.compile(r"usage|\brun|how to|quick[\s-]?start|example|tutorial|reproduc|execut|demo|workflow|pipeline", re.I),
    "expected_output": re.compile(r"output|result|expected|figure", re.I),
    "requirements": re.compile(r"requirement|dependenc|prerequisite|system|hardware|software", re.I),
}

INSTALL_CMD = re.compile(
    r"^(?:pip3?\s+install|python3?\s+-m\s+pip\s+install|conda\s+(?:env\s+(?:create|update)|install|create)"
    r"|mamba\s+(?:env\s+create|install|create)|micromamba\s+(?:create|install)|poetry\s+install|pipenv\s+install"
    r"|uv\s+(?:pip\s+install|sync)|docker\s+(?:build|pull)|docker[\s-]compose\s+build|make\s+(?:install|env|setup|environment|venv)"
    r"|python3?\s+setup\.py\s+(?:install|develop)|R(?:script)?\s+-e\s+.*install|apt(?:-get)?\s+install"
    r"|(?:bash|sh|source)\s+\S*(?:install|setup)\S*|\./\S*(?:install|setup)\S*|install\.packages|npm\s+install)",
    re.I,
)
RUNNABLE_CMD = re.compile(
    r"^(?:python3?|jupyter|ipython|bash|sh|make|snakemake|nextflow|docker\s+run|docker[\s-]compose\s+up"
    r"|Rscript|julia|papermill|dvc\s+repro|voila|streamlit\s+run|\./\S+|cwltool|luigi|kedro\s+run|mlflow\s+run)\b",
    re.I,
)
VAGUE_INSTALL = re.compile(r"\binstall(?:ation|ed|ing)?\b|\bdependenc(?:y|ies)\b|\brequirements\b", re.I)
EXAMPLE_DIRS = {"examples", "example", "demo", "demos", "tutorial", "tutorials", "samples"}
ENTRY_STEMS = re.compile(r"^(run|main|__main__|run[_-]\w+|start)$", re.I)
ENTRY_TARGETS = {"run", "all", "main", "start"}
CONSOLE_ENTRY = re.compile(r"\[project\.scripts\]|\[tool\.poetry\.scripts\]|console_scripts")


def _commands(body: str) -> list[str]:
    """Logical shell commands in a code block: prompts stripped, continuations joined."""
    out: list[str] = []
    pending = ""
    for raw in body.splitlines():
        line = raw.strip()
        if not line or line.startswith(("#", "//")):
            continue
        line = re.sub(r"^(?:\$|>>>|%|!|In \[\d*\]:)\s*", "", line)
        if pending:
            line = pending + " " + line
            pending = ""
        if line.endswith("\\"):
            pending = line[:-1].strip()
            continue
        out.extend(part.strip() for part in re.split(r"\s*&&\s*|\s*;\s*", line) if part.strip())
    if pending:
        out.append(pending)
    return out


def _install_docs(models: RepoModels) -> list[ReadmeModel]:
    docs = []
    if models.readme is not None:
        docs.append(models.readme)
    for rel in models.inventory.of(FileKind.OTHER, FileKind.CONFIG_FILE):
        p = PurePosixPath(rel)
        if re.match(r"(?i)^install(ation)?$", p.stem) and p.suffix.lower() in (".md", ".rst", ".txt", ""):
            text = models.read_text(rel)
            if text is not None:
                docs.append(parse_readme_text(text, rel))
    return docs


@analyzer("doc_structure")
def doc_structure(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("doc_structure")
    readme = models.readme
    if readme is None:
        rb.cite("", "no readme")
        return rb.result(0)
    matched = []
    for category, rule in SECTION_RULES.items():
        for h in readme.headings:
            if rule.search(h.text):
                rb.cite(readme.path, f"{category} section", pattern=h.text)
                matched.append(category)
                break
    if not matched:
        rb.cite(readme.path, "no execution-relevant sections")
    return rb.result(25 * len(matched))


@analyzer("install_instructions")
def install_instructions(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("install_instructions")
    docs = _install_docs(models)
    if not docs:
        rb.cite("", "no readme")
        return rb.result(0)
    tier = 0
    for doc in docs:
        for block in doc.code_blocks:
            cmds = _commands(block.body)
            installs = [c for c in cmds if INSTALL_CMD.match(c)]
            if not installs:
                continue
            if len(cmds) == 1:
                rb.cite(doc.path, "single-command install in code block", pattern=installs[0])
                tier = max(tier, 100)
            else:
                rb.cite(doc.path, f"multi-step install ({len(cmds)} commands)", pattern=installs[0])
                tier = max(tier, 60)
        if tier < 60:
            for line in doc.text.splitlines():
                for snippet in re.findall(r"`([^`]+)`", line) or [line.strip()]:
                    cmd = re.sub(r"^\$\s*", "", snippet.strip())
                    if INSTALL_CMD.match(cmd):
                        rb.cite(doc.path, "install command outside a code block", pattern=cmd)
                        tier = max(tier, 60)
                        break
        if tier < 30 and VAGUE_INSTALL.search(doc.text):
            rb.cite(doc.path, "installation mentioned without commands")
            tier = 30
    if tier == 0:
        rb.cite("", "no install instructions")
    return rb.result(tier)


@analyzer("usage_examples")
def usage_examples(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("usage_examples")
    tier = 0
    readme = models.readme
    if readme is not None:
        for block in readme.code_blocks:
            runnable = [c for c in _commands(block.body) if RUNNABLE_CMD.match(c) and not INSTALL_CMD.match(c)]
            if runnable:
                rb.cite(readme.path, "runnable command in code block", pattern=runnable[0])
                tier = 100
                break
        if tier == 0 and readme.code_blocks:
            rb.cite(readme.path, f"{len(readme.code_blocks)} code block(s)")
            tier = 60
    if tier == 0:
        for rel in models.inventory.all_files():
            if any(part.lower() in EXAMPLE_DIRS for part in PurePosixPath(rel).parts[:-1]):
                rb.cite(rel, "examples directory")
                tier = 40
                break
    if tier == 0:
        rb.cite("", "no usage examples")
    return rb.result(tier)


@analyzer("inline_explanation")
def inline_explanation(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("inline_explanation")
    components: list[float] = []

    # empty cells are not counted on either side of the ratio
    md = code = 0
    for nb in models.notebooks:
        nb_md = sum(1 for c in nb.markdown_cells if not c.is_empty)
        nb_code = sum(1 for c in nb.code_cells if not c.is_empty)
        md += nb_md
        code += nb_code
        rb.cite(nb.path, f"{nb_md} markdown / {nb_code} code cells")
    if code:
        components.append(100.0 * min((md / code) / 0.5, 1.0))

    comment_lines = total_lines = 0
    scripts = [u for u in models.code if u.origin == "script"]
    for unit in scripts:
        c, t = unit.comment_stats()
        comment_lines += c
        total_lines += t
    if total_lines:
        density = comment_lines / total_lines
        components.append(100.0 * min(density / 0.20, 1.0))
        rb.cite(scripts[0].path, f"comment density {density:.3f} ({comment_lines}/{total_lines} lines over {len(scripts)} scripts)")

    if not components:
        return rb.na("no notebooks or scripts")
    return rb.result(sum(components) / len(components))


@analyzer("entry_point")
def entry_point(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("entry_point")
    inv = models.inventory
    for rel in inv.of(FileKind.SHELL_SCRIPT, FileKind.PYTHON_SOURCE, FileKind.NOTEBOOK):
        if ENTRY_STEMS.match(PurePosixPath(rel).stem):
            rb.cite(rel, "entry script")
    for rel in inv.of(FileKind.MAKEFILE):
        for t in make_targets(models.read_text(rel) or ""):
            if t.lower() in ENTRY_TARGETS:
                rb.cite(rel, f"make target '{t}'", pattern=t)
                break
    for rel in inv.of(FileKind.DEPENDENCY_MANIFEST):
        text = models.read_text(rel) or ""
        m = CONSOLE_ENTRY.search(text)
        if m:
            rb.cite(rel, "declared console entry point", pattern=m.group(0))
    if not any(e.path for e in rb.evidence):
        rb.cite("", "no entry point")
        return rb.result(0)
    return rb.result(100)


@analyzer("docstring_coverage")
def docstring_coverage(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("docstring_coverage")
    documented = total = 0
    for unit in models.code:
        if unit.origin == "test":
            continue
        symbols = unit.public_symbols()
        if not symbols:
            continue
        d = sum(1 for _, _, has in symbols if has)
        documented += d
        total += len(symbols)
        rb.cite(unit.path, f"{d}/{len(symbols)} public symbols documented")
    if total == 0:
        return rb.na("no public functions or classes")
    return rb.result(100.0 * documented / total)


@analyzer("reuse_metadata")
def reuse_metadata(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("reuse_metadata")
    inv = models.inventory
    present = 0
    for kind, label in ((FileKind.LICENSE, "license"), (FileKind.CITATION, "citation file"),
                        (FileKind.CODEMETA, "code metadata file")):
        files = inv.of(kind)
        if files:
            present += 1
            rb.cite(files[0], label)
    if not present:
        rb.cite("", "no license, citation or code metadata file")
    return rb.result({0: 0, 1: 33, 2: 66, 3: 100}[present])
