"""File-kind classification.

Every regular file under a snapshot root lands in exactly one kind. Rules are
checked in ``RULES_VERSION`` order and the first match wins; only the relative
path, the file name and (for extensionless files) the first bytes are used.
"""

from __future__ import annotations

import fnmatch
import logging
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path, PurePosixPath

logger = logging.getLogger(__name__)

RULES_VERSION = "1"
MAX_SCAN_BYTES = 5 * 1024 * 1024

VCS_DIRS = frozenset({".git", ".hg", ".svn", ".bzr"})


class FileKind(str, Enum):
    NOTEBOOK = "notebook"
    PYTHON_SOURCE = "python_source"
    README = "readme"
    DEPENDENCY_MANIFEST = "dependency_manifest"
    LOCKFILE = "lockfile"
    CONTAINER_SPEC = "container_spec"
    CI_CONFIG = "ci_config"
    MAKEFILE = "makefile"
    SHELL_SCRIPT = "shell_script"
    CONFIG_FILE = "config_file"
    DATA_FILE = "data_file"
    LICENSE = "license"
    CITATION = "citation"
    CODEMETA = "codemeta"
    TEST_FILE = "test_file"
    OTHER = "other"


LOCKFILE_NAMES = (
    "poetry.lock", "Pipfile.lock", "pdm.lock", "uv.lock", "conda-lock.yml",
    "conda-lock.yaml", "*.conda-lock.yml", "*.conda-lock.yaml", "requirements*.lock",
    "conda-*.lock",
)
MANIFEST_NAMES = (
    "requirements*.txt", "requirements*.in", "environment*.yml", "environment*.yaml",
    "pyproject.toml", "setup.py", "setup.cfg", "Pipfile", "conda.yml", "conda.yaml",
)
CONTAINER_NAMES = (
    "Dockerfile", "Dockerfile.*", "*.Dockerfile", "*.dockerfile", "Containerfile",
    "*.def", "Singularity", "Singularity.*", "devcontainer.json", ".devcontainer.json",
    "docker-compose*.yml", "docker-compose*.yaml", "compose.yml", "compose.yaml",
)
CI_ROOT_NAMES = (
    ".gitlab-ci.yml", ".travis.yml", "azure-pipelines.yml", "appveyor.yml",
    ".appveyor.yml", "Jenkinsfile", "bitbucket-pipelines.yml",
)
LICENSE_NAMES = ("LICENSE", "LICENSE.*", "LICENCE", "LICENCE.*", "COPYING", "COPYING.*")
CITATION_NAMES = ("CITATION.cff", "CITATION", "CITATION.*", "citation.cff")
CODEMETA_NAMES = ("codemeta.json", ".zenodo.json")
MAKEFILE_NAMES = ("Makefile", "makefile", "GNUmakefile", "*.mk")

SHELL_EXTS = {".sh", ".bash", ".zsh", ".bat", ".cmd", ".ps1"}
PYTHON_EXTS = {".py", ".pyw"}
TEST_CODE_EXTS = {".py", ".r", ".sh", ".jl"}
CONFIG_EXTS = {
    ".yml", ".yaml", ".json", ".toml", ".ini", ".cfg", ".conf", ".env", ".dvc",
    ".smk", ".nf", ".cwl", ".wdl",
}
CONFIG_NAMES = ("Snakefile", "*.Snakefile", "dvc.lock", "nextflow.config", ".python-version",
                "runtime.txt", ".tool-versions", ".R-version")
DATA_EXTS = {
    ".csv", ".tsv", ".xlsx", ".xls", ".parquet", ".feather", ".h5", ".hdf5", ".hdf",
    ".npy", ".npz", ".pkl", ".pickle", ".mat", ".nc", ".netcdf", ".dat", ".sav",
    ".fasta", ".fa", ".fastq", ".fq", ".bam", ".sam", ".vcf", ".bed", ".gtf", ".gff",
    ".h5ad", ".loom", ".mtx", ".rds", ".rdata", ".arff", ".jsonl", ".ndjson",
    ".zip", ".gz", ".tgz", ".bz2", ".xz", ".tar", ".sqlite", ".db", ".tif", ".tiff",
    ".nii", ".dcm", ".edf", ".fits",
}
TEST_DIRS = {"tests", "test", "testing"}


def _match(name: str, patterns: tuple[str, ...]) -> bool:
    return any(fnmatch.fnmatchcase(name, p) for p in patterns)


def _match_ci(name: str, patterns: tuple[str, ...]) -> bool:
    low = name.lower()
    return any(fnmatch.fnmatchcase(low, p.lower()) for p in patterns)


def classify_path(rel: str, head: bytes = b"") -> FileKind:
    """Return the kind of a file given its POSIX relative path and first bytes."""
    path = PurePosixPath(rel)
    name = path.name
    parts = path.parts[:-1]
    suffix = path.suffix.lower()

    if suffix == ".ipynb":
        return FileKind.NOTEBOOK
    if _match(name, LOCKFILE_NAMES):
        return FileKind.LOCKFILE
    if _match(name, MANIFEST_NAMES) or (
        parts and parts[-1] == "requirements" and suffix == ".txt"
    ):
        return FileKind.DEPENDENCY_MANIFEST
    if _match(name, CONTAINER_NAMES) or (".devcontainer" in parts and suffix == ".json"):
        return FileKind.CONTAINER_SPEC
    if _match(name, CI_ROOT_NAMES) or (
        len(parts) >= 2 and parts[-2:] == (".github", "workflows") and suffix in {".yml", ".yaml"}
    ) or (parts[-1:] == (".circleci",) and name == "config.yml"):
        return FileKind.CI_CONFIG
    if _match_ci(name, ("readme", "readme.*")):
        return FileKind.README
    if _match_ci(name, LICENSE_NAMES):
        return FileKind.LICENSE
    if _match(name, CITATION_NAMES):
        return FileKind.CITATION
    if name in CODEMETA_NAMES:
        return FileKind.CODEMETA
    if _is_test_file(name, parts, suffix):
        return FileKind.TEST_FILE
    if _match(name, MAKEFILE_NAMES):
        return FileKind.MAKEFILE
    shebang = head.split(b"\n", 1)[0] if head.startswith(b"#!") else b""
    if suffix in SHELL_EXTS or (not suffix and shebang and (b"sh" in shebang) and b"python" not in shebang):
        return FileKind.SHELL_SCRIPT
    if suffix in PYTHON_EXTS or (not suffix and b"python" in shebang):
        return FileKind.PYTHON_SOURCE
    if suffix in CONFIG_EXTS or _match(name, CONFIG_NAMES):
        return FileKind.CONFIG_FILE
    if suffix in DATA_EXTS:
        return FileKind.DATA_FILE
    return FileKind.OTHER


def _is_test_file(name: str, parts: tuple[str, ...], suffix: str) -> bool:
    if suffix == ".py" and (
        fnmatch.fnmatchcase(name, "test_*.py")
        or fnmatch.fnmatchcase(name, "*_test.py")
        or name == "conftest.py"
    ):
        return True
    return suffix in TEST_CODE_EXTS and any(p.lower() in TEST_DIRS for p in parts)


@dataclass(frozen=True)
class FileInventory:
    """Total partition of a snapshot's regular files into kinds."""

    files: dict[FileKind, tuple[str, ...]]
    unreadable: tuple[str, ...] = ()
    oversize: tuple[str, ...] = ()
    symlinks: tuple[str, ...] = ()
    submodules: tuple[str, ...] = ()
    rules_version: str = RULES_VERSION

    def of(self, *kinds: FileKind) -> tuple[str, ...]:
        out: list[str] = []
        for kind in kinds:
            out.extend(self.files.get(kind, ()))
        return tuple(sorted(out))

    @property
    def counts(self) -> dict[str, int]:
        return {kind.value: len(self.files.get(kind, ())) for kind in FileKind}

    @property
    def total(self) -> int:
        return sum(len(v) for v in self.files.values())

    def all_files(self) -> tuple[str, ...]:
        return self.of(*FileKind)

    def kind_of(self, rel: str) -> FileKind | None:
        for kind, paths in self.files.items():
            if rel in paths:
                return kind
        return None

    def is_scannable(self, rel: str) -> bool:
        return rel not in self.oversize and rel not in self.unreadable


def build_inventory(root: Path) -> FileInventory:
    """Walk ``root`` and classify every regular file.

    Symlinks are never followed (recorded instead); directories holding a
    ``.git`` file are treated as submodules and not recursed.
    """
    root = Path(root)
    buckets: dict[FileKind, list[str]] = {kind: [] for kind in FileKind}
    unreadable: list[str] = []
    oversize: list[str] = []
    symlinks: list[str] = []
    submodules: list[str] = []

    for dirpath, dirnames, filenames in os.walk(root, followlinks=False):
        here = Path(dirpath)
        rel_dir = here.relative_to(root)
        keep = []
        for d in sorted(dirnames):
            full = here / d
            rel = (rel_dir / d).as_posix()
            if d in VCS_DIRS:
                continue
            if full.is_symlink():
                symlinks.append(rel)
                continue
            if (full / ".git").is_file():
                submodules.append(rel)
                continue
            keep.append(d)
        dirnames[:] = keep
        for fname in sorted(filenames):
            full = here / fname
            rel = (rel_dir / fname).as_posix()
            if full.is_symlink():
                symlinks.append(rel)
                continue
            if not full.is_file():
                continue
            try:
                size = full.stat().st_size
                with open(full, "rb") as fh:
                    head = fh.read(128)
            except OSError as exc:
                logger.warning("unreadable file %s: %s", rel, exc)
                unreadable.append(rel)
                buckets[FileKind.OTHER].append(rel)
                continue
            if size > MAX_SCAN_BYTES:
                oversize.append(rel)
            buckets[classify_path(rel, head)].append(rel)

    return FileInventory(
        files={k: tuple(sorted(v)) for k, v in buckets.items()},
        unreadable=tuple(sorted(unreadable)),
        oversize=tuple(sorted(oversize)),
        symlinks=tuple(sorted(symlinks)),
        submodules=tuple(sorted(submodules)),
    )
