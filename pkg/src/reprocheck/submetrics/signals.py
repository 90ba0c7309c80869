"""Category S: reproducibility signals."""

from __future__ import annotations

import re
from pathlib import PurePosixPath

from ..repo.inventory import FileKind
from ..repo.models import RepoModels
from .base import ResultBuilder, SubMetricResult, analyzer

OUTPUT_DIRS = {"results", "result", "output", "outputs", "expected", "expected_output", "expected_outputs",
               "reference", "reference_output", "figures", "figs", "fig", "plots"}
FIGURE_EXTS = {".png", ".jpg", ".jpeg", ".svg", ".pdf", ".eps", ".tif", ".tiff", ".gif"}
NON_RESULT_DIRS = {"docs", "doc", "assets", "static", "images", "img", ".github", "logo", "media"}
NON_RESULT_NAMES = re.compile(r"(?i)logo|banner|badge|icon|screenshot|architecture|overview|diagram")
PLACEHOLDERS = {".gitkeep", ".keep", ".gitignore", "README.md", "readme.md"}
CLI_PARSING = re.compile(
    r"\b(?:import\s+argparse|from\s+argparse|argparse\.ArgumentParser|import\s+click|@click\.|import\s+typer"
    r"|typer\.Typer|import\s+fire|fire\.Fire|from\s+docopt|import\s+docopt|sys\.argv\[|@hydra\.main|OmegaConf\.load"
    r"|configparser\.ConfigParser|yaml\.safe_load|yaml\.load|json\.load\s*\(\s*open\s*\([^)]*conf|tomllib\.load|absl\.flags)"
)
PARTIAL_CONFIG = re.compile(r"\bos\.environ(?:\.get)?\s*[\[(]|\bos\.getenv\s*\(|\bpapermill\b")
CONFIG_NAME = re.compile(r"(?i)(^|[_\-.])(config|conf|cfg|settings|params|parameters|hparams|hyperparameters|experiment)s?([_\-.]|$)")
CONSTANTS_MODULE = re.compile(r"(?i)^(config|configs|settings|params|parameters|constants|hparams)$")
GPU_IMPORTS = {"cupy", "pycuda", "cudf", "cuml", "cugraph", "tensorrt", "nvidia", "pynvml", "GPUtil"}
GPU_CODE = re.compile(
    r"\.cuda\(\)|\.to\(\s*['\"]cuda|device\(\s*['\"]cuda|['\"]cuda:\d|torch\.cuda\.|tf\.config\.list_physical_devices\(\s*['\"]GPU"
    r"|tf\.test\.is_gpu_available|numba\.cuda|from\s+numba\s+import\s+cuda|jax\.devices\(\s*['\"]gpu"
)
GPU_DEP = re.compile(r"(?i)cuda|cupy|pycuda|tensorflow-gpu|nvidia-|cudnn|gpu")
GPU_DECLARED = re.compile(r"(?i)\b(gpu|cuda|nvidia|vram|cudnn|graphics card|tesla|a100|v100|rtx)\b")


@analyzer("seed_management")
def seed_management(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("seed_management")
    pats = models.patterns
    stochastic = seeded = 0
    for unit in models.code:
        rand = next((m for p in pats.randomness for m in [p.search(unit.text)] if m), None)
        if rand is None:
            continue
        stochastic += 1
        seed = next((m for p in pats.seeds for m in [p.search(unit.text)] if m), None)
        if seed is not None:
            seeded += 1
            rb.cite(unit.path, "stochastic file with seed", line=unit.line_of(seed.start()), pattern=seed.group(0))
        else:
            rb.cite(unit.path, "stochastic file without seed", line=unit.line_of(rand.start()), pattern=rand.group(0))
    if stochastic == 0:
        return rb.na("no stochastic operations detected")
    return rb.result(100.0 * seeded / stochastic)


def is_monotonic(counts: list[int]) -> bool:
    return all(a < b for a, b in zip(counts, counts[1:]))


@analyzer("notebook_exec_order")
def notebook_exec_order(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("notebook_exec_order")
    judged = ordered = 0
    for err in models.notebook_errors:
        judged += 1
        rb.cite(err.path, f"malformed notebook counted as non-monotonic: {err.reason}")
    for nb in models.notebooks:
        counts = nb.execution_counts
        if not counts:
            continue
        judged += 1
        if is_monotonic(counts):
            ordered += 1
            rb.cite(nb.path, f"monotonic execution counts ({len(counts)} executed cells)")
        else:
            rb.cite(nb.path, "non-monotonic execution counts", pattern=str(counts[:20]))
    if judged == 0:
        return rb.na("no executed notebooks")
    return rb.result(100.0 * ordered / judged)


@analyzer("test_file_presence")
def test_file_presence(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("test_file_presence")
    tests = models.inventory.of(FileKind.TEST_FILE)
    for rel in tests:
        rb.cite(rel, "test file")
    if not tests:
        rb.cite("", "no test files")
    return rb.result(100.0 * min(len(tests) / 2, 1.0))


def _is_result_figure(rel: str) -> bool:
    p = PurePosixPath(rel)
    if p.suffix.lower() not in FIGURE_EXTS:
        return False
    if any(part.lower() in NON_RESULT_DIRS for part in p.parts[:-1]):
        return False
    return not NON_RESULT_NAMES.search(p.stem)


@analyzer("expected_outputs")
def expected_outputs(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("expected_outputs")
    tier = 0
    placeholder_only = []
    output_dirs: dict[str, list[str]] = {}
    for rel in models.inventory.all_files():
        p = PurePosixPath(rel)
        for i, part in enumerate(p.parts[:-1]):
            if part.lower() in OUTPUT_DIRS:
                output_dirs.setdefault("/".join(p.parts[:i + 1]), []).append(p.name)
                break
    for d, names in sorted(output_dirs.items()):
        real = [n for n in names if n not in PLACEHOLDERS]
        if real:
            rb.cite(f"{d}/{real[0]}", f"reference output directory '{d}' ({len(real)} files)")
            tier = 100
        else:
            placeholder_only.append(d)
    if tier < 100:
        for rel in models.inventory.all_files():
            if _is_result_figure(rel):
                rb.cite(rel, "committed result figure")
                tier = 100
                break
    if tier < 100:
        for nb in models.notebooks:
            if nb.has_outputs():
                rb.cite(nb.path, "notebook with stored outputs")
                tier = 50
        for d in placeholder_only:
            rb.cite(d, "output directory holding only placeholders")
            tier = max(tier, 50)
    if tier == 0:
        rb.cite("", "no committed outputs")
    return rb.result(tier)


@analyzer("ci_presence")
def ci_presence(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("ci_presence")
    ci = models.inventory.of(FileKind.CI_CONFIG)
    for rel in ci:
        rb.cite(rel, "CI configuration")
    if not ci:
        rb.cite("", "no CI configuration")
    return rb.result(100 if ci else 0)


@analyzer("config_externalised")
def config_externalised(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("config_externalised")
    inv = models.inventory
    tier = 0
    for rel in inv.of(FileKind.CONFIG_FILE):
        p = PurePosixPath(rel)
        if p.name.startswith("."):
            continue
        if CONFIG_NAME.search(p.stem) or any(part.lower() in ("config", "configs", "conf") for part in p.parts[:-1]):
            rb.cite(rel, "configuration file")
            tier = 100
    for unit in models.code:
        if unit.origin == "test":
            continue
        m = CLI_PARSING.search(unit.text)
        if m:
            rb.cite(unit.path, "parameters loaded from CLI or config", line=unit.line_of(m.start()), pattern=m.group(0))
            tier = 100
    if tier < 100:
        for unit in models.code:
            if unit.origin == "test":
                continue
            m = PARTIAL_CONFIG.search(unit.text)
            if m:
                rb.cite(unit.path, "environment-variable parameters", line=unit.line_of(m.start()), pattern=m.group(0))
                tier = 50
            elif CONSTANTS_MODULE.match(PurePosixPath(unit.path).stem):
                rb.cite(unit.path, "parameters collected in a constants module")
                tier = 50
    if tier == 0:
        rb.cite("", "parameters hardcoded")
    return rb.result(tier)


@analyzer("hardware_requirements")
def hardware_requirements(models: RepoModels) -> SubMetricResult:
    rb = ResultBuilder("hardware_requirements")
    gpu_sources: list[str] = []
    for unit in models.code:
        gpu_imports = [n for n in unit.imports if n in GPU_IMPORTS]
        m = GPU_CODE.search(unit.text)
        if gpu_imports or m:
            gpu_sources.append(unit.path)
            rb.cite(unit.path, "GPU usage", pattern=(gpu_imports[0] if gpu_imports else m.group(0)))
    gpu_deps = [name for name in models.deps.declared if GPU_DEP.search(name)]
    if gpu_deps and models.deps.source_files:
        rb.cite(models.deps.source_files[0], "GPU package declared", pattern=gpu_deps[0])
    if not gpu_sources and not gpu_deps:
        return rb.na("no GPU packages detected")

    declared = []
    for readme in models.readmes:
        m = GPU_DECLARED.search(readme.text)
        if m:
            declared.append((readme.path, m.group(0)))
    if gpu_deps:
        declared.append((models.deps.source_files[0], gpu_deps[0]))
    for rel in models.inventory.of(FileKind.CONTAINER_SPEC):
        text = models.read_text(rel) or ""
        if re.search(r"(?i)nvidia/cuda|cuda|gpus?\b", text):
            declared.append((rel, "GPU container base"))
    for path, pattern in declared:
        rb.cite(path, "hardware requirement declared", pattern=pattern)
    return rb.result(100 if declared else 0)
