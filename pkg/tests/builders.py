"""Synthetic repository trees used across the test suite."""

from __future__ import annotations

import json
import os
import subprocess
from pathlib import Path


def notebook(cells: list[tuple], nbformat: int = 4) -> str:
    """Cells as ("code", source, count, outputs) or ("md", source)."""
    out = []
    for c in cells:
        if c[0] == "md":
            out.append({"cell_type": "markdown", "metadata": {}, "source": c[1]})
        else:
            src = c[1]
            count = c[2] if len(c) > 2 else None
            outputs = c[3] if len(c) > 3 else []
            out.append({"cell_type": "code", "metadata": {}, "source": src,
                        "execution_count": count, "outputs": outputs})
    if nbformat == 3:
        for cell in out:
            if cell["cell_type"] == "code":
                cell["input"] = cell.pop("source")
                cell["prompt_number"] = cell.pop("execution_count")
        return json.dumps({"nbformat": 3, "worksheets": [{"cells": out}], "metadata": {}})
    return json.dumps({"nbformat": 4, "nbformat_minor": 5, "metadata": {}, "cells": out})


def stream(text: str) -> dict:
    return {"output_type": "stream", "name": "stdout", "text": text}


def result(text: str, count: int = 1) -> dict:
    return {"output_type": "execute_result", "execution_count": count, "metadata": {},
            "data": {"text/plain": text}}


def write_tree(root: Path, files: dict[str, str | bytes]) -> Path:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    for rel, content in files.items():
        p = root / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, bytes):
            p.write_bytes(content)
        else:
            p.write_text(content, encoding="utf-8")
    return root


def git_commit(root: Path, message: str = "initial") -> str:
    env = {**os.environ, "GIT_AUTHOR_NAME": "t", "GIT_AUTHOR_EMAIL": "t@example.org",
           "GIT_COMMITTER_NAME": "t", "GIT_COMMITTER_EMAIL": "t@example.org",
           "GIT_AUTHOR_DATE": "2020-01-01T00:00:00Z", "GIT_COMMITTER_DATE": "2020-01-01T00:00:00Z"}
    run = lambda *a: subprocess.run(["git", *a], cwd=root, env=env, check=True, capture_output=True, text=True)
    if not (Path(root) / ".git").exists():
        run("init", "-q", "-b", "main")
    run("add", "-A")
    run("commit", "-q", "-m", message)
    return run("rev-parse", "HEAD").stdout.strip()


DATA_PROSE = " ".join(
    ["The dataset contains single-cell expression counts for each sample together with per-cell metadata."] * 25
)

GOLD_README = f"""# Gold pipeline

A fully specified analysis.

## Installation

```bash
pip install -r requirements.txt
```

## Usage

```bash
python run.py --config config.yaml
```

## Expected output

Running the pipeline writes `results/table.csv`.

## Requirements

Python 3.11 on any operating system.

## Data

Raw data are archived at https://doi.org/10.5281/zenodo.1234567 and fetched by `scripts/download_data.sh`.
{DATA_PROSE}
"""

GOLD_RUN = '''"""Entry point of the analysis."""
# The pipeline is seeded so that every run gives identical results.
# Parameters come from a YAML file passed on the command line.
import argparse

import numpy as np
import pandas as pd


def load(path):
    """Read the input table."""
    # plain CSV input
    return pd.read_csv(path)


def main():
    """Run the whole analysis."""
    # parse the configuration path
    parser = argparse.ArgumentParser()
    parser.add_argument("--config")
    args = parser.parse_args()
    # fixed generator seed
    rng = np.random.default_rng(42)
    return rng.normal(size=3), args


if __name__ == "__main__":
    main()
'''


def gold_files() -> dict[str, str]:
    return {
        "README.md": GOLD_README,
        "requirements.txt": "numpy==1.26.4\npandas==2.2.1\n",
        "poetry.lock": '[[package]]\nname = "numpy"\nversion = "1.26.4"\n\n[[package]]\nname = "pandas"\nversion = "2.2.1"\n',
        "Dockerfile": "FROM python:3.11-slim\nCOPY requirements.txt .\nRUN pip install -r requirements.txt\n",
        ".python-version": "3.11.8\n",
        "Makefile": "setup:\n\tpip install -r requirements.txt\n\nall: results\n\nresults:\n\tpython run.py --config config.yaml\n",
        "Snakefile": "rule all:\n    input: 'results/table.csv'\n",
        "scripts/download_data.sh": "#!/bin/bash\nwget https://zenodo.org/record/1234567/files/data.csv -O data.csv\n",
        "run.py": GOLD_RUN,
        "config.yaml": "alpha: 0.5\n",
        "tests/test_run.py": "import run\n\n\ndef test_main():\n    assert run.main() is not None\n",
        "tests/test_load.py": "def test_nothing():\n    assert True\n",
        ".github/workflows/ci.yml": "on: push\njobs:\n  test:\n    runs-on: ubuntu-latest\n",
        "results/table.csv": "a,b\n1,2\n",
        "LICENSE": "MIT License\n",
        "CITATION.cff": "cff-version: 1.2.0\ntitle: gold\n",
        "codemeta.json": '{"name": "gold"}\n',
        "analysis.ipynb": notebook([
            ("md", "# Analysis\nLoad and summarise."),
            ("code", "import numpy as np", 1),
            ("md", "Draw seeded samples."),
            ("code", "rng = np.random.default_rng(0)\nx = rng.normal(size=5)", 2),
            ("md", "Summary."),
            ("code", "x.mean()", 3, [result("0.1")]),
        ]),
    }


# metrics the gold fixture is built to max out
GOLD_TARGETS = (
    "dep_pinning", "container_spec", "env_bootstrap", "runtime_version", "data_description",
    "data_pointer", "workflow_orchestration", "data_acquisition", "doc_structure",
    "install_instructions", "usage_examples", "inline_explanation", "entry_point", "docstring_coverage",
    "reuse_metadata", "no_absolute_paths", "import_resolvability", "no_hardcoded_creds",
    "no_silent_failures", "seed_management", "notebook_exec_order", "test_file_presence",
    "expected_outputs", "ci_presence", "config_externalised",
)


# the community profile exactly as published, comment included
BIOINFORMATICS_YAML = """\
name: bioinformatics-v1
version: "1.0"
categories:
  E: {weight: 0.35, tau: 40, k: 1.5}
  A: {weight: 0.40, tau: 30, k: 1.5}  # FAIR data priority
  D: {weight: 0.10, tau: 20, k: 1.2}
  C: {weight: 0.05, tau: 25, k: 1.2}
  S: {weight: 0.10, tau: 30, k: 1.2}
"""


def install_dep_files() -> dict[str, str]:
    """Environment specified explicitly (pins, container) but documentation is thin."""
    return {
        "README.md": "# Model\n\n## Install\n\n```\npip install -r requirements.txt\n```\n",
        "requirements.txt": "numpy==1.19.0\nscipy==1.2.0\ntensorflow==1.15.0\n",
        "Dockerfile": "FROM python:3.7\nRUN pip install -r requirements.txt\n",
        "model.py": "import numpy as np\nimport scipy\nimport tensorflow as tf\n\n\ndef fit(x):\n    return np.mean(x)\n",
        "data/train.csv": "x,y\n1,2\n",
    }


def missing_module_files() -> dict[str, str]:
    """No dependency declaration at all while code imports third-party packages."""
    return {
        "README.md": "# Notebook project\n\nSome exploratory analysis on our data.\n",
        "analysis.ipynb": notebook([
            ("code", "import pandas as pd\nimport seaborn as sns\nfrom sklearn.cluster import KMeans", 1),
            ("code", "df = pd.read_csv('/home/alice/data/table.csv')", 2),
            ("code", "KMeans(4).fit(df)", 3),
        ]),
        "helpers.py": "import umap\n\n\ndef embed(x):\n    try:\n        return umap.UMAP().fit_transform(x)\n    except:\n        pass\n",
    }


def missing_data_files() -> dict[str, str]:
    """Code expects data that the repository neither contains nor points to."""
    return {
        "README.md": "# Analysis\n\nRun the notebook.\n",
        "process.ipynb": notebook([
            ("code", "import numpy as np\nx = np.loadtxt('input/measurements.txt')", 2),
            ("code", "np.random.shuffle(x)", 1),
        ]),
    }


def code_error_files() -> dict[str, str]:
    """Reasonable documentation and dependency list, no pins or container."""
    return {
        "README.md": "# Project\n\n## Installation\n\nInstall the dependencies listed in requirements.txt.\n\n"
                     "## Usage\n\n```\npython main.py\n```\n",
        "requirements.txt": "numpy\nmatplotlib>=3.0\n",
        "main.py": "import numpy as np\nimport matplotlib.pyplot as plt\n\n\ndef plot():\n    plt.plot(np.arange(3))\n",
        "LICENSE": "BSD\n",
    }


def gpu_files() -> dict[str, str]:
    return {
        "README.md": "# Trainer\n\n## Requirements\n\nRequires an NVIDIA GPU with 16 GB of memory.\n",
        "requirements.txt": "torch==2.1.0\n",
        "train.py": "import torch\n\nmodel = torch.nn.Linear(2, 2).cuda()\ntorch.manual_seed(0)\nx = torch.randn(3, 2)\n",
        "environment.yml": "name: t\ndependencies:\n  - python=3.10\n  - pip\n",
    }


def smelly_files() -> dict[str, str]:
    return {
        "README.md": "# Utilities\n",
        "a.py": 'API_KEY = "sk-live-1234567890abcdef"\nPATH = "/Users/bob/project/data"\n',
        "b.py": "import os\n\n\ndef f():\n    try:\n        os.remove('x')\n    except Exception:\n        pass\n",
        "c.py": "# clean file\nx = 1\n",
        "setup.py": "from setuptools import setup\nsetup(name='u', install_requires=['requests>=2'])\n",
    }


def notebooks_only_files() -> dict[str, str]:
    return {
        "nb/ordered.ipynb": notebook([("code", "a = 1", 1), ("code", "b = 2", 2), ("code", "c = 3", 5)]),
        "nb/shuffled.ipynb": notebook([("code", "a = 1", 3), ("code", "b = 2", 1), ("code", "c = 3", 2)]),
        "nb/unexecuted.ipynb": notebook([("code", "a = 1"), ("md", "text")]),
        "nb/legacy.ipynb": notebook([("code", "import random\nrandom.seed(1)\nrandom.random()", 1)], nbformat=3),
    }


def readme_only_files() -> dict[str, str]:
    return {"README.md": "# Placeholder\n\nCode coming soon.\n"}


def mixed_files() -> dict[str, str]:
    return {
        "README.rst": "Pipeline\n========\n\nUsage\n-----\n\n.. code::\n\n   make all\n",
        "environment.yml": "name: x\ndependencies:\n  - numpy=1.26\n  - scipy=1.11\n",
        "Makefile": "all:\n\tpython analysis.py\n",
        "analysis.py": "import numpy as np\nimport scipy.stats\nfrom random import shuffle\n\nshuffle([1, 2])\n",
        "run_all.sh": "#!/bin/sh\nmake all\n",
        "figures/fig1.png": b"\x89PNG\r\n\x1a\n",
    }


ARCHETYPES = {
    "gold": gold_files,
    "install_dep": install_dep_files,
    "missing_module": missing_module_files,
    "missing_data": missing_data_files,
    "code_error": code_error_files,
}

FIXTURE_REPOS = {
    **ARCHETYPES,
    "gpu": gpu_files,
    "smelly": smelly_files,
    "notebooks_only": notebooks_only_files,
    "readme_only": readme_only_files,
    "mixed": mixed_files,
}


def build(root: Path, name: str) -> Path:
    return write_tree(Path(root) / name, FIXTURE_REPOS[name]())
