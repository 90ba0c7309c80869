"""Dependency manifest and lockfile parsing."""

from __future__ import annotations

import ast
import configparser
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath

import yaml
from packaging.requirements import InvalidRequirement, Requirement

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .inventory import FileInventory, FileKind

logger = logging.getLogger(__name__)

# strength order: later entries win when merging declarations
CONSTRAINT_KINDS = ("none", "unbounded", "bounded", "exact")

_NORMALIZE = re.compile(r"[-_.]+")
_RUNTIME_NAMES = {"python", "python3", "r-base", "r"}


def normalize_name(name: str) -> str:
    return _NORMALIZE.sub("-", name).lower().strip()


def stronger(a: str, b: str) -> str:
    return a if CONSTRAINT_KINDS.index(a) >= CONSTRAINT_KINDS.index(b) else b


@dataclass(frozen=True)
class DependencySpec:
    declared: dict[str, str]  # normalized name -> constraint kind
    source_files: tuple[str, ...] = ()
    has_lockfile: bool = False
    runtime_version_declared: bool = False
    runtime_sources: tuple[str, ...] = ()
    warnings: tuple[tuple[str, str], ...] = ()  # (path, note)
    manifest_constraints: dict[str, dict[str, str]] = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return not self.declared


def specifier_kind(spec: str) -> str:
    """Classify a PEP 440 specifier string."""
    spec = spec.strip()
    if not spec:
        return "none"
    clauses = [c.strip() for c in spec.split(",") if c.strip()]
    ops = [re.match(r"(===|==|~=|!=|<=|>=|<|>)?", c).group(1) or "" for c in clauses]
    if any(op in ("==", "===") and not clauses[i].endswith(".*") for i, op in enumerate(ops)):
        return "exact"
    if any(op in ("<", "<=", "~=") or (op == "==" and clauses[i].endswith(".*"))
           for i, op in enumerate(ops)):
        return "bounded"
    if any(op in (">", ">=", "!=") for op in ops):
        return "unbounded"
    # bare version as written in some conda / poetry files
    if re.match(r"^\d", spec):
        return "exact"
    return "none"


def poetry_kind(value: object) -> str:
    if isinstance(value, dict):
        if "version" in value:
            return poetry_kind(value["version"])
        if "rev" in value or "tag" in value:
            return "exact"
        return "none"
    spec = str(value).strip()
    if spec in ("", "*"):
        return "none"
    if spec.startswith(("^", "~")):
        return "bounded"
    if re.match(r"^\d[\w.]*$", spec):
        return "exact"
    return specifier_kind(spec)


class _Collector:
    def __init__(self) -> None:
        self.declared: dict[str, str] = {}
        self.per_file: dict[str, dict[str, str]] = {}
        self.runtime_sources: list[str] = []
        self.warnings: list[tuple[str, str]] = []

    def add(self, rel: str, name: str, kind: str) -> None:
        norm = normalize_name(name)
        if not norm:
            return
        if norm in _RUNTIME_NAMES:
            self.runtime(rel)
            return
        self.declared[norm] = stronger(kind, self.declared.get(norm, "none"))
        per = self.per_file.setdefault(rel, {})
        per[norm] = stronger(kind, per.get(norm, "none"))

    def runtime(self, rel: str) -> None:
        if rel not in self.runtime_sources:
            self.runtime_sources.append(rel)

    def requirement(self, rel: str, line: str) -> None:
        line = line.split(" #", 1)[0].strip()
        if not line or line.startswith(("#", "-", "--")):
            return
        if re.match(r"^(git\+|https?://|file:)", line):
            m = re.search(r"#egg=([\w.\-]+)", line)
            if m:
                self.add(rel, m.group(1), "exact" if "@" in line.split("#")[0] else "none")
            return
        try:
            req = Requirement(line)
        except InvalidRequirement:
            m = re.match(r"^([A-Za-z0-9][\w.\-]*)\s*(.*)$", line)
            if not m:
                self.warnings.append((rel, f"unparseable requirement: {line}"))
                return
            self.add(rel, m.group(1), specifier_kind(m.group(2).split(";")[0]))
            return
        kind = "exact" if req.url and "@" in req.url else specifier_kind(str(req.specifier))
        self.add(rel, req.name, kind)


def _conda_dep(col: _Collector, rel: str, dep: str) -> None:
    dep = dep.strip()
    # channel::name=version=build
    if "::" in dep:
        dep = dep.split("::", 1)[1]
    m = re.match(r"^([A-Za-z0-9][\w.\-]*)\s*(.*)$", dep)
    if not m:
        col.warnings.append((rel, f"unparseable conda dependency: {dep}"))
        return
    name, rest = m.group(1), m.group(2).strip()
    if rest.startswith("=") and not rest.startswith("=="):
        kind = "exact" if re.match(r"^=\d[\w.]*(=[\w.]+)?$", rest) else "bounded"
    else:
        kind = specifier_kind(rest.replace(" ", ","))
    col.add(rel, name, kind)
    if normalize_name(name) == "python" and rest:
        col.runtime(rel)


def _parse_environment(col: _Collector, rel: str, text: str) -> None:
    doc = yaml.safe_load(text) or {}
    for dep in doc.get("dependencies") or []:
        if isinstance(dep, str):
            if normalize_name(dep.split("=")[0].split("<")[0].split(">")[0]) == "python":
                if re.search(r"\d", dep):
                    col.runtime(rel)
                continue
            _conda_dep(col, rel, dep)
        elif isinstance(dep, dict):
            for line in dep.get("pip") or []:
                col.requirement(rel, str(line))


def _parse_pyproject(col: _Collector, rel: str, text: str) -> None:
    doc = tomllib.loads(text)
    project = doc.get("project") or {}
    if project.get("requires-python"):
        col.runtime(rel)
    for line in project.get("dependencies") or []:
        col.requirement(rel, line)
    for group in (project.get("optional-dependencies") or {}).values():
        for line in group:
            col.requirement(rel, line)
    poetry = (doc.get("tool") or {}).get("poetry") or {}
    for table in ("dependencies", "dev-dependencies"):
        for name, value in (poetry.get(table) or {}).items():
            if name.lower() == "python":
                col.runtime(rel)
                continue
            col.add(rel, name, poetry_kind(value))
    for grp in (poetry.get("group") or {}).values():
        for name, value in (grp.get("dependencies") or {}).items():
            col.add(rel, name, poetry_kind(value))


def _parse_setup_py(col: _Collector, rel: str, text: str) -> None:
    tree = ast.parse(text)
    for node in ast.walk(tree):
        if not isinstance(node, ast.Call):
            continue
        for kw in node.keywords:
            if kw.arg == "python_requires":
                col.runtime(rel)
            elif kw.arg in ("install_requires", "requires") and isinstance(kw.value, (ast.List, ast.Tuple)):
                for elt in kw.value.elts:
                    if isinstance(elt, ast.Constant) and isinstance(elt.value, str):
                        col.requirement(rel, elt.value)
            elif kw.arg == "extras_require" and isinstance(kw.value, ast.Dict):
                for v in kw.value.values:
                    if isinstance(v, (ast.List, ast.Tuple)):
                        for elt in v.elts:
                            if isinstance(elt, ast.Constant) and isinstance(elt.value, str):
                                col.requirement(rel, elt.value)


def _parse_setup_cfg(col: _Collector, rel: str, text: str) -> None:
    cp = configparser.ConfigParser(interpolation=None)
    cp.read_string(text)
    if cp.has_option("options", "python_requires"):
        col.runtime(rel)
    if cp.has_option("options", "install_requires"):
        for line in cp.get("options", "install_requires").splitlines():
            col.requirement(rel, line)


def _parse_pipfile(col: _Collector, rel: str, text: str) -> None:
    doc = tomllib.loads(text)
    for table in ("packages", "dev-packages"):
        for name, value in (doc.get(table) or {}).items():
            if isinstance(value, dict):
                value = value.get("version", "*")
            spec = str(value).strip()
            col.add(rel, name, "none" if spec == "*" else specifier_kind(spec))
    if (doc.get("requires") or {}).get("python_version") or (doc.get("requires") or {}).get("python_full_version"):
        col.runtime(rel)


def _parse_lockfile(col: _Collector, rel: str, text: str) -> None:
    name = PurePosixPath(rel).name
    if name == "Pipfile.lock":
        doc = json.loads(text)
        for table in ("default", "develop"):
            for pkg in doc.get(table) or {}:
                col.add(rel, pkg, "exact")
    elif name.endswith(".lock") and text.lstrip().startswith(("[[package]]", "#", "version")):
        doc = tomllib.loads(text)
        for pkg in doc.get("package") or []:
            if isinstance(pkg, dict) and pkg.get("name"):
                col.add(rel, pkg["name"], "exact")
    elif name.endswith((".yml", ".yaml")):
        doc = yaml.safe_load(text) or {}
        for pkg in doc.get("package") or []:
            if isinstance(pkg, dict) and pkg.get("name"):
                col.add(rel, pkg["name"], "exact")
    else:
        for line in text.splitlines():
            col.requirement(rel, line)


def _manifest_parser(rel: str):
    name = PurePosixPath(rel).name
    if name.startswith("environment") or name.startswith("conda."):
        return _parse_environment
    if name == "pyproject.toml":
        return _parse_pyproject
    if name == "setup.py":
        return _parse_setup_py
    if name == "setup.cfg":
        return _parse_setup_cfg
    if name == "Pipfile":
        return _parse_pipfile
    return lambda col, r, text: [col.requirement(r, ln) for ln in text.splitlines()]


def parse_dependency_files(inventory: FileInventory, root: Path) -> DependencySpec:
    """Union of declarations across every manifest and lockfile in the inventory."""
    col = _Collector()
    manifests = inventory.of(FileKind.DEPENDENCY_MANIFEST)
    lockfiles = inventory.of(FileKind.LOCKFILE)
    for rel, parser in [(m, _manifest_parser(m)) for m in manifests] + [(lf, _parse_lockfile) for lf in lockfiles]:
        if not inventory.is_scannable(rel):
            col.warnings.append((rel, "skipped: size" if rel in inventory.oversize else "skipped: unreadable"))
            continue
        try:
            text = (Path(root) / rel).read_text(encoding="utf-8", errors="replace")
            parser(col, rel, text)
        except Exception as exc:  # noqa: BLE001 - malformed manifests never abort a scan
            logger.warning("could not parse %s: %s", rel, exc)
            col.warnings.append((rel, f"unparseable manifest: {type(exc).__name__}"))
    return DependencySpec(
        declared=dict(sorted(col.declared.items())),
        source_files=tuple(manifests) + tuple(lockfiles),
        has_lockfile=bool(lockfiles),
        runtime_version_declared=bool(col.runtime_sources),
        runtime_sources=tuple(col.runtime_sources),
        warnings=tuple(col.warnings),
        manifest_constraints={k: dict(sorted(v.items())) for k, v in sorted(col.per_file.items())},
    )
