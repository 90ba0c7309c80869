"""Repository acquisition and parsing into analyzable models."""

from .acquire import (
    UNCOMMITTED,
    AcquisitionError,
    CloneError,
    EmptyRepositoryError,
    RepoSnapshot,
    UnreachableSourceError,
    acquire_repository,
    repo_id_for,
)
from .code import CodeUnit
from .deps import DependencySpec, normalize_name, parse_dependency_files
from .inventory import FileInventory, FileKind, build_inventory, classify_path
from .models import RepoModels, build_models
from .notebook import Cell, NotebookModel, NotebookParseError, parse_notebook, parse_notebook_text
from .readme import ReadmeModel, parse_readme, parse_readme_text


def classify_files(snapshot: RepoSnapshot) -> FileInventory:
    """Re-derive the inventory of an acquired snapshot."""
    return build_inventory(snapshot.root)


__all__ = [
    "UNCOMMITTED", "AcquisitionError", "CloneError", "EmptyRepositoryError", "RepoSnapshot",
    "UnreachableSourceError", "acquire_repository", "repo_id_for", "CodeUnit", "DependencySpec",
    "normalize_name", "parse_dependency_files", "FileInventory", "FileKind", "build_inventory",
    "classify_path", "classify_files", "RepoModels", "build_models", "Cell", "NotebookModel",
    "NotebookParseError", "parse_notebook", "parse_notebook_text", "ReadmeModel", "parse_readme",
    "parse_readme_text",
]
