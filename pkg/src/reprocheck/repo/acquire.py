"""Repository acquisition: local directories in place, remote sources via git."""

from __future__ import annotations

import logging
import os
import re
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .inventory import FileInventory, build_inventory

logger = logging.getLogger(__name__)

UNCOMMITTED = "uncommitted"

_URL_RE = re.compile(r"^(?:[a-z][a-z0-9+.-]*://|git@[^:]+:)", re.IGNORECASE)


class AcquisitionError(Exception):
    """Base class for failures to obtain a snapshot."""


class UnreachableSourceError(AcquisitionError):
    def __init__(self, source: str):
        super().__init__(f"unreachable source: {source}")
        self.source = source


class CloneError(AcquisitionError):
    pass


class EmptyRepositoryError(AcquisitionError):
    def __init__(self, source: str):
        super().__init__(f"no analyzable files: {source}")
        self.source = source


@dataclass(frozen=True)
class RepoSnapshot:
    source: str
    commit_id: str
    root: Path
    inventory: FileInventory

    @property
    def repo_id(self) -> str:
        return repo_id_for(self.source)


def is_remote(source: str) -> bool:
    return bool(_URL_RE.match(source))


def repo_id_for(source: str) -> str:
    """Stable identifier: ``owner__name`` for URLs, directory name for paths."""
    s = source.rstrip("/")
    if s.endswith(".git"):
        s = s[:-4]
    if is_remote(s):
        tail = re.split(r"[/:]", s)
        parts = [p for p in tail if p][-2:]
        return "__".join(parts)
    return Path(s).resolve().name or "repo"


def _git(args: list[str], cwd: Path | None = None) -> subprocess.CompletedProcess:
    return subprocess.run(
        ["git", *args],
        cwd=cwd,
        capture_output=True,
        text=True,
        env={**os.environ, "GIT_TERMINAL_PROMPT": "0"},
    )


def head_commit(root: Path) -> str:
    """HEAD hash when ``root`` itself carries VCS metadata, else ``uncommitted``."""
    if not (root / ".git").exists():
        return UNCOMMITTED
    proc = _git(["rev-parse", "HEAD"], cwd=root)
    if proc.returncode != 0 or not proc.stdout.strip():
        return UNCOMMITTED
    return proc.stdout.strip()


def acquire_repository(
    source: str,
    shallow: bool = True,
    workdir: str | Path | None = None,
    allow_empty: bool = False,
) -> RepoSnapshot:
    """Acquire ``source`` (a VCS URL or an existing directory).

    Remote sources are cloned into ``workdir`` (a fresh temporary directory by
    default) with ``--depth 1`` when ``shallow``. Local directories are read in
    place and never modified.
    """
    if is_remote(source):
        root = _clone(source, shallow, workdir)
    else:
        root = Path(source).expanduser()
        if not root.is_dir():
            raise UnreachableSourceError(source)
        root = root.resolve()

    inventory = build_inventory(root)
    if inventory.total == 0 and not allow_empty:
        raise EmptyRepositoryError(source)
    return RepoSnapshot(
        source=source,
        commit_id=head_commit(root),
        root=root,
        inventory=inventory,
    )


def _clone(source: str, shallow: bool, workdir: str | Path | None) -> Path:
    base = Path(workdir) if workdir else Path(tempfile.mkdtemp(prefix="reprocheck-"))
    base.mkdir(parents=True, exist_ok=True)
    dest = base / repo_id_for(source)
    args = ["clone", "--quiet"]
    if shallow:
        args += ["--depth", "1"]
    args += [source, str(dest)]
    logger.info("cloning %s", source)
    try:
        proc = _git(args)
    except FileNotFoundError as exc:
        raise CloneError(f"git executable not found: {exc}") from exc
    if proc.returncode != 0:
        err = proc.stderr.strip()
        if re.search(r"not found|does not exist|Could not resolve host|unable to access", err):
            raise UnreachableSourceError(source)
        raise CloneError(f"clone failed for {source}: {err}")
    return dest.resolve()
