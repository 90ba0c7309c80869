"""Category A: data accessibility."""

from __future__ import annotations

import re
from pathlib import PurePosixPath

from ..repo.inventory import FileKind
from ..repo.models import RepoModels
from ..repo.readme import count_words
from .base import ResultBuilder, SubMetricResult, analyzer
from .environment import make_targets

_URL = re.compile(r"https?://[^\s<>\"')\]]+", re.IGNORECASE)
_DOI = re.compile(r"(?:https?://(?:dx\.)?doi\.org/10\.\d{4,9}/\S+|\bdoi:\s*10\.\d{4,9}/\S+)", re.IGNORECASE)
ARCHIVAL_HOSTS = (
    "zenodo.org", "figshare.com", "datadryad.org", "osf.io", "dataverse", "pangaea.de",
    "ebi.ac.uk", "ncbi.nlm.nih.gov", "openneuro.org", "physionet.org", "synapse.org",
    "data.mendeley.com", "b2share", "researchdata", "archive.org", "dandiarchive.org",
    "proteomecentral", "massive.ucsd.edu", "cellxgene", "humancellatlas", "gdc.cancer.gov",
    "ukbiobank", "icpsr.umich.edu", "datacite.org", "hdl.handle.net",
)
PLATFORM_HOSTS = (
    "drive.google.com", "docs.google.com", "dropbox.com", "s3.amazonaws.com", "amazonaws.com",
    "storage.googleapis.com", "blob.core.windows.net", "kaggle.com", "huggingface.co",
    "onedrive.live.com", "1drv.ms", "box.com", "github.com", "githubusercontent.com",
    "gitlab.com", "bitbucket.org", "sharepoint.com", "mega.nz", "wetransfer.com",
)
WORKFLOW_ENGINE = re.compile(
    r"(^|/)(Snakefile|.*\.smk|dvc\.yaml|dvc\.lock|main\.nf|nextflow\.config|.*\.nf|.*\.cwl|.*\.wdl"
    r"|MLproject|kedro.yml|luigi\.cfg|airflow\.cfg|dag\.py|pipeline\.ya?ml|metaflow.*\.py|prefect.*\.py)$",
)
PIPELINE_TARGETS = {"all", "pipeline", "reproduce", "run", "analysis", "results", "figures", "paper", "data"}
RUN_ALL = re.compile(r"^(run[_-]?all|runall|run[_-]?pipeline|pipeline|reproduce|reproduce[_-]?all|run[_-]?everything|all)$", re.I)
DOWNLOAD = re.compile(
    r"(?:\bwget\s|\bcurl\s[^\n]*(?:-o|-O|>|https?://)|\burlretrieve\s*\(|\burlopen\s*\(|\brequests\.get\s*\("
    r"|\bgdown\b|\bkaggle\s+(?:datasets|competitions)\s+download|\bzenodo_get\b|\bload_dataset\s*\("
    r"|\bfetch_[a-z0-9_]+\s*\(|\bpooch\.|\bdownload\s*=\s*True|\bdvc\s+(?:pull|get|import)\b"
    r"|\bsnapshot_download\s*\(|\bhf_hub_download\s*\(|\bsynapseclient\b|\bosfclient\b|\bdownload_url\s*\(|\baws\s+s3\s+cp)",
    re.IGNORECASE,
)
DATA_WORD = re.compile(r"\b(data|dataset|datasets|database)\b", re.IGNORECASE)
DATA_DIR = re.compile(r"(?i)(^|[_\-])(data|datasets?|inputs?)([_\-]|$)")
DATA_HEADING = re.compile(r"\b(data|dataset|datasets|database|inputs?)\b", re.IGNORECASE)


def _text_sources(models: RepoModels):
    """(path, text) for READMEs, markdown docs, code, shell scripts and notebook markdown."""
    inv = models.inventory
    for r in models.readmes:
        yield r.path, r.text
    for rel in inv.of(FileKind.OTHER, FileKind.CONFIG_FILE, FileKind.SHELL_SCRIPT, FileKind.MAKEFILE,
                      FileKind.CITATION, FileKind.CODEMETA):
        if PurePosixPath(rel).suffix.lower() in (".md", ".rst", ".txt", ".sh", ".bash", ".yml", ".yaml",
                                                  ".cff", ".json", "") or rel.endswith("Makefile"):
            text = models.read_text(rel)
            if text is not None:
                yield rel, text
    for unit in models.code:
        yield unit.path, unit.text
    for nb in models.notebooks:
        yield nb.path, "\n".join(c.source for c in nb.markdown_cells)


def _host(url: str) -> str:
    return re.sub(r"^https?://", "", url.lower()).split("/", 1)[0]


@analyzer("data_description")
def data_description(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("data_description")
    best_words = -1
    best_path = ""
    inv = models.inventory
    readme_paths = set(inv.of(FileKind.README))
    # dedicated documents: READMEs inside data-ish dirs, DATA*.md files
    for rel in inv.all_files():
        p = PurePosixPath(rel)
        in_data_dir = any(DATA_DIR.search(part) for part in p.parts[:-1])
        is_readme = rel in readme_paths
        named = re.match(r"(?i)^(data|dataset|datasets|data[_-]?(description|dictionary|readme|availability|card))\b",
                         p.stem) and p.suffix.lower() in (".md", ".rst", ".txt", "")
        if (is_readme and in_data_dir) or named:
            text = models.read_text(rel) or ""
            words = count_words(text)
            rb.cite(rel, f"dedicated data documentation ({words} words)")
            if words > best_words:
                best_words, best_path = words, rel
    readme = models.readme
    if readme is not None:
        for section in readme.sections:
            if section.heading and DATA_HEADING.search(section.heading.text):
                words = section.word_count
                rb.cite(readme.path, f"data section '{section.heading.text}' ({words} words)")
                if words > best_words:
                    best_words, best_path = words, readme.path
    if best_words >= 200:
        return rb.result(100)
    if best_words >= 50:
        return rb.result(60)
    if best_path:
        return rb.result(30)
    mentions = [r.path for r in models.readmes if DATA_WORD.search(r.text)]
    mentions += [nb.path for nb in models.notebooks if any(DATA_WORD.search(c.source) for c in nb.markdown_cells)]
    for path in mentions[:3]:
        rb.cite(path, "data mentioned")
    if mentions:
        return rb.result(30)
    rb.cite("", "no data description")
    return rb.result(0)


@analyzer("data_pointer")
def data_pointer(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("data_pointer")
    tier = 0
    seen: set[tuple[str, str]] = set()
    for path, text in _text_sources(models):
        for m in _DOI.finditer(text):
            if (path, "doi") not in seen:
                seen.add((path, "doi"))
                rb.cite(path, "DOI link", pattern=m.group(0)[:120])
            tier = max(tier, 100)
        for m in _URL.finditer(text):
            url = m.group(0)
            host = _host(url)
            if any(h in host or h in url.lower() for h in ARCHIVAL_HOSTS):
                level, label = 75, "archival platform URL"
            elif any(host.endswith(h) for h in PLATFORM_HOSTS):
                # links to code hosts only count when they point at files or releases
                if host.endswith(("github.com", "gitlab.com", "bitbucket.org")) and not re.search(
                        r"/(releases|raw|blob|files|downloads|lfs)/", url):
                    continue
                level, label = 50, "generic platform URL"
            else:
                continue
            if (path, label) not in seen:
                seen.add((path, label))
                rb.cite(path, label, pattern=url[:120])
            tier = max(tier, level)
    if tier == 0:
        local = models.inventory.of(FileKind.DATA_FILE)
        if local:
            for rel in local[:5]:
                rb.cite(rel, "committed local data file")
            tier = 25
    if tier == 0:
        rb.cite("", "no data pointer")
    return rb.result(tier)


@analyzer("workflow_orchestration")
def workflow_orchestration(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("workflow_orchestration")
    inv = models.inventory
    tier = 0
    for rel in inv.all_files():
        if WORKFLOW_ENGINE.search(rel):
            rb.cite(rel, "workflow engine file")
            tier = 100
    if tier < 60:
        for rel in inv.of(FileKind.MAKEFILE):
            targets = [t for t in make_targets(models.read_text(rel) or "") if t.lower() in PIPELINE_TARGETS]
            if targets:
                rb.cite(rel, f"Makefile pipeline target(s): {', '.join(targets)}")
                tier = max(tier, 60)
    if tier < 40:
        for rel in inv.of(FileKind.SHELL_SCRIPT, FileKind.PYTHON_SOURCE):
            if RUN_ALL.match(PurePosixPath(rel).stem):
                rb.cite(rel, "run-all script")
                tier = 40
    if tier == 0:
        rb.cite("", "no workflow orchestration")
    return rb.result(tier)


@analyzer("data_acquisition")
def data_acquisition(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("data_acquisition")
    inv = models.inventory
    for rel in inv.all_files():
        if rel.endswith(".dvc") or PurePosixPath(rel).name in ("dvc.yaml", "dvc.lock", ".dvcignore"):
            rb.cite(rel, "data version control tracking")
    sources = [(u.path, u.text) for u in models.code]
    for rel in inv.of(FileKind.SHELL_SCRIPT, FileKind.MAKEFILE):
        text = models.read_text(rel)
        if text is not None:
            sources.append((rel, text))
    for path, text in sources:
        m = DOWNLOAD.search(text)
        if m:
            rb.cite(path, "automated download", line=text.count("\n", 0, m.start()) + 1, pattern=m.group(0).strip())
    if not any(e.path for e in rb.evidence):
        rb.cite("", "no data acquisition script or command")
        return rb.result(0)
    return rb.result(100)
