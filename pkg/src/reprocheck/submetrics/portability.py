"""Category C: code portability.

The three absence-style metrics score the fraction of scanned code files free
of a defect; a repository without code files has nothing to judge, so they
report not-applicable instead of a vacuous 100.
"""

from __future__ import annotations

import re

from ..repo.deps import normalize_name
from ..repo.models import RepoModels
from .base import ResultBuilder, SubMetricResult, analyzer

ABSOLUTE_PATH = re.compile(
    r"(?:(?<![\w.~])/(?:home|Users)/[^/\s'\"]+/"
    r"|(?<![A-Za-z0-9])[A-Za-z]:\\\\?(?:Users|Documents|[A-Za-z0-9_ .-]+\\)"
    r"|(?<![A-Za-z0-9/])[A-Za-z]:/(?:Users|Documents)/)",
)
CREDENTIAL = re.compile(
    r"""(?ix)
    \b\w*(?:api[_-]?key|apikey|secret(?:[_-]?key)?|token|passw(?:or)?d|passwd|access[_-]?key|private[_-]?key|auth[_-]?key)
    ["']?\s*[:=]\s*[rbuf]?["']([^"'\s]{8,})["']
    """
)
PLACEHOLDER = re.compile(r"(?i)your|xxx|\*\*\*|<|changeme|example|placeholder|dummy|\{")


def _scan(models: RepoModels, metric_id: str, finder) -> SubMetricResult:
    rb = ResultBuilder(metric_id)
    units = models.code
    if not units:
        return rb.na("no code files")
    clean = 0
    for unit in units:
        hits = finder(unit)
        if hits:
            for line, pattern in hits[:5]:
                rb.cite(unit.path, "flagged occurrence", line=line, pattern=pattern)
        else:
            clean += 1
    rb.cite(units[0].path, f"{clean}/{len(units)} scanned files clean")
    return rb.result(100.0 * clean / len(units))


def _regex_hits(unit, pattern: re.Pattern, reject: re.Pattern | None = None) -> list[tuple[int, str]]:
    hits = []
    for m in pattern.finditer(unit.text):
        value = m.group(m.lastindex or 0)
        if reject is not None and reject.search(value):
            continue
        hits.append((unit.line_of(m.start()), m.group(0)[:80]))
    return hits


@analyzer("no_absolute_paths")
def no_absolute_paths(models: RepoModels) -> SubMetricResult:
    return _scan(models, "no_absolute_paths", lambda u: _regex_hits(u, ABSOLUTE_PATH))


@analyzer("no_hardcoded_creds")
def no_hardcoded_creds(models: RepoModels) -> SubMetricResult:
    return _scan(models, "no_hardcoded_creds", lambda u: _regex_hits(u, CREDENTIAL, PLACEHOLDER))


@analyzer("no_silent_failures")
def no_silent_failures(models: RepoModels) -> SubMetricResult:
    return _scan(models, "no_silent_failures",
                 lambda u: [(ln, "except: pass") for ln in u.silent_failures()])


def third_party_imports(models: RepoModels) -> dict[str, list[str]]:
    """Distinct third-party top-level imports mapped to the files importing them."""
    pats = models.patterns
    local = models.local_modules
    found: dict[str, list[str]] = {}
    for unit in models.code:
        for name in unit.imports:
            if pats.is_stdlib(name) or name in local:
                continue
            found.setdefault(name, []).append(unit.path)
    return dict(sorted(found.items()))


@analyzer("import_resolvability")
def import_resolvability(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("import_resolvability")
    if not models.code:
        return rb.na("no code files")
    imports = third_party_imports(models)
    if not imports:
        rb.cite(models.code[0].path, f"no third-party imports in {len(models.code)} files")
        return rb.result(100)
    declared = models.deps.declared
    if not declared:
        for name, paths in list(imports.items())[:10]:
            rb.cite(paths[0], "third-party import without any dependency file", pattern=name)
        return rb.result(0)
    resolved = 0
    for name, paths in imports.items():
        candidates = models.patterns.distributions_for(name)
        if any(normalize_name(c) in declared for c in candidates):
            resolved += 1
            rb.cite(paths[0], "import resolved", pattern=name)
        else:
            rb.cite(paths[0], "import not declared", pattern=name)
    return rb.result(100.0 * resolved / len(imports))
