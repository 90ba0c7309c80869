"""Category E: environment specification."""

from __future__ import annotations

import json
import re
from pathlib import PurePosixPath

from ..repo.inventory import FileKind
from ..repo.models import RepoModels
from .base import ResultBuilder, SubMetricResult, analyzer

_FROM = re.compile(r"^\s*FROM\s+(?:--platform=\S+\s+)?(\S+)", re.IGNORECASE | re.MULTILINE)
_DEF_FROM = re.compile(r"^\s*From:\s*(\S+)", re.IGNORECASE | re.MULTILINE)
_INSTALL = re.compile(
    r"\b(?:pip3?\s+install|conda\s+(?:env\s+(?:create|update)|install)|mamba\s+(?:env\s+create|install)"
    r"|micromamba\s+install|apt(?:-get)?\s+install|poetry\s+install|pipenv\s+install|uv\s+(?:pip\s+install|sync)"
    r"|R\s+-e\s+|install\.packages|yum\s+install|apk\s+add)",
    re.IGNORECASE,
)
_RUN = re.compile(r"^\s*RUN\s+(.*)$", re.IGNORECASE | re.MULTILINE)
_MAKE_TARGET = re.compile(r"^([A-Za-z0-9_.\-/ ]+?)\s*:(?!=)", re.MULTILINE)

BOOTSTRAP_SCRIPT = re.compile(r"(install|setup|bootstrap|env|environment|venv|conda|requirements|deps)", re.I)
BOOTSTRAP_TARGETS = {"install", "setup", "env", "environment", "venv", "conda", "requirements",
                     "deps", "dependencies", "bootstrap", "init", "conda-env", "create-env", "create_env"}
RUNTIME_FILES = {".python-version", "runtime.txt", ".tool-versions", ".R-version", ".nvmrc"}


def image_is_pinned(image: str) -> bool:
    if "@sha256:" in image:
        return True
    name = image.rsplit("/", 1)[-1]
    if ":" not in name:
        return False
    tag = name.split(":", 1)[1]
    return bool(tag) and tag.lower() != "latest" and not tag.startswith("$")


def make_targets(text: str) -> list[str]:
    targets = []
    for m in _MAKE_TARGET.finditer(text):
        line_start = text.rfind("\n", 0, m.start()) + 1
        if text[line_start:m.start()].strip() or text[line_start] in "\t#":
            continue
        for t in m.group(1).split():
            if not t.startswith(".") and "%" not in t and "=" not in t:
                targets.append(t)
    return targets


def _container_quality(models: RepoModels, rel: str) -> tuple[bool, bool, str]:
    """(pinned base image, install steps present, base image) for one container file."""
    text = models.read_text(rel) or ""
    name = PurePosixPath(rel).name
    if name.endswith(".json"):
        try:
            doc = json.loads(re.sub(r"^\s*//.*$", "", text, flags=re.MULTILINE))
        except json.JSONDecodeError:
            return False, False, ""
        image = str(doc.get("image", ""))
        install = bool(doc.get("postCreateCommand") or doc.get("build") or doc.get("features"))
        return image_is_pinned(image) if image else bool(doc.get("build")), install, image
    if name.endswith(".def") or name.startswith("Singularity"):
        m = _DEF_FROM.search(text)
        image = m.group(1) if m else ""
        return image_is_pinned(image), bool(_INSTALL.search(text)), image
    if "compose" in name:
        images = re.findall(r"^\s*image:\s*(\S+)", text, re.MULTILINE)
        return bool(images) and all(image_is_pinned(i) for i in images), False, ",".join(images)
    images = _FROM.findall(text)
    runs = " ".join(_RUN.findall(text))
    image = images[0] if images else ""
    return bool(images) and image_is_pinned(image), bool(_INSTALL.search(runs)), image


@analyzer("dep_pinning")
def dep_pinning(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("dep_pinning")
    deps = models.deps
    for path, note in deps.warnings:
        rb.cite(path, note)
    lockfiles = models.inventory.of(FileKind.LOCKFILE)
    if lockfiles:
        for rel in lockfiles:
            rb.cite(rel, "lockfile present")
        return rb.result(100)
    manifests = models.inventory.of(FileKind.DEPENDENCY_MANIFEST)
    if not manifests:
        rb.cite("", "no dependency manifest")
        return rb.result(0)
    kinds = list(deps.declared.values())
    for rel, per in deps.manifest_constraints.items():
        exact = sum(1 for k in per.values() if k == "exact")
        rb.cite(rel, f"{exact}/{len(per)} declarations exactly pinned")
    for rel in manifests:
        if rel not in deps.manifest_constraints:
            rb.cite(rel, "manifest without parsed declarations")
    if kinds and all(k == "exact" for k in kinds):
        return rb.result(75)
    if any(k == "exact" for k in kinds):
        return rb.result(40)
    return rb.result(25)


@analyzer("container_spec")
def container_spec(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("container_spec")
    files = models.inventory.of(FileKind.CONTAINER_SPEC)
    if not files:
        rb.cite("", "no container specification")
        return rb.result(0)
    best = 60
    for rel in files:
        pinned, install, image = _container_quality(models, rel)
        parts = [f"base image {image or '?'} {'pinned' if pinned else 'unpinned'}",
                 "install steps present" if install else "no install steps"]
        rb.cite(rel, "; ".join(parts))
        if pinned and install:
            best = 100
    return rb.result(best)


@analyzer("env_bootstrap")
def env_bootstrap(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("env_bootstrap")
    inv = models.inventory
    for rel in inv.of(FileKind.SHELL_SCRIPT):
        stem = PurePosixPath(rel).stem
        if BOOTSTRAP_SCRIPT.search(stem):
            text = models.read_text(rel) or ""
            if _INSTALL.search(text) or re.search(r"\b(?:python3?\s+-m\s+venv|virtualenv|conda\s+create)\b", text):
                rb.cite(rel, "environment bootstrap script")
    for rel in inv.of(FileKind.MAKEFILE):
        text = models.read_text(rel) or ""
        for t in make_targets(text):
            if t.lower() in BOOTSTRAP_TARGETS:
                rb.cite(rel, f"make target '{t}'", pattern=t)
    if not rb.evidence:
        rb.cite("", "no environment bootstrap artifact")
    return rb.result(100 if any(e.path for e in rb.evidence) else 0)


@analyzer("runtime_version")
def runtime_version(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("runtime_version")
    inv = models.inventory
    for rel in inv.all_files():
        if PurePosixPath(rel).name in RUNTIME_FILES:
            rb.cite(rel, "runtime version file")
    for rel in models.deps.runtime_sources:
        rb.cite(rel, "runtime version declared in manifest")
    for rel in inv.of(FileKind.CONTAINER_SPEC):
        _, _, image = _container_quality(models, rel)
        for img in image.split(","):
            base = img.rsplit("/", 1)[-1]
            if re.match(r"^(python|r-ver|r-base|rocker/r-ver|julia|pypy)[:-]\d", base) or re.match(
                    r"^(?:rocker/)?r-ver:\d", img):
                rb.cite(rel, f"pinned interpreter base image {img}")
    if not any(e.path for e in rb.evidence):
        rb.cite("", "no runtime version declared")
        return rb.result(0)
    return rb.result(100)
