"""Output determinism between two executions of the same notebooks."""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Mapping

from .repo.notebook import NotebookModel, parse_notebook

NUMERIC_TOLERANCE = 1e-6
_NUMBER = re.compile(r"[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?|[-+]?(?:nan|inf)\b", re.IGNORECASE)


class DeterminismError(ValueError):
    pass


def _payload(output: dict) -> list:
    """Comparable content of one output, ignoring counts and metadata."""
    kind = output.get("output_type", "")
    if kind == "stream":
        return [kind, output.get("name", ""), _join(output.get("text", ""))]
    if kind == "error":
        return [kind, output.get("ename", ""), output.get("evalue", "")]
    data = output.get("data") or {}
    if not data:
        # nbformat 3 keeps mime payloads at the top level
        data = {k: v for k, v in output.items() if k not in ("output_type", "metadata", "prompt_number",
                                                              "execution_count")}
    return [kind if kind != "pyout" else "execute_result",
            {k: _join(v) for k, v in sorted(data.items())}]


def _join(v) -> str:
    if isinstance(v, list):
        return "".join(str(x) for x in v)
    if isinstance(v, (dict, int, float)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _split(text: str) -> tuple[list[str], list[float]]:
    parts, nums, last = [], [], 0
    for m in _NUMBER.finditer(text):
        parts.append(text[last:m.start()])
        nums.append(float(m.group(0)))
        last = m.end()
    parts.append(text[last:])
    return parts, nums


def text_matches(a: str, b: str, tol: float = NUMERIC_TOLERANCE) -> bool:
    """Exact match on non-numeric text, numeric tokens within an absolute tolerance."""
    if a == b:
        return True
    pa, na = _split(a)
    pb, nb = _split(b)
    if pa != pb or len(na) != len(nb):
        return False
    for x, y in zip(na, nb):
        if x != x and y != y:  # both nan
            continue
        if x == y:
            continue
        if not abs(x - y) <= tol:
            return False
    return True


def _values_match(a, b, tol: float) -> bool:
    if isinstance(a, str) and isinstance(b, str):
        return text_matches(a, b, tol)
    if isinstance(a, dict) and isinstance(b, dict):
        if a.keys() != b.keys():
            return False
        for k in a:
            va, vb = a[k], b[k]
            # binary payloads (images) compare exactly
            if k.startswith("image/") or k == "application/pdf":
                if va != vb:
                    return False
            elif not _values_match(va, vb, tol):
                return False
        return True
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(_values_match(x, y, tol) for x, y in zip(a, b))
    return a == b


def cell_outputs_match(a: tuple[dict, ...], b: tuple[dict, ...], tol: float = NUMERIC_TOLERANCE) -> bool:
    pa = [_payload(o) for o in a]
    pb = [_payload(o) for o in b]
    return _values_match(pa, pb, tol)


def compare_notebooks(a: NotebookModel, b: NotebookModel, tol: float = NUMERIC_TOLERANCE) -> tuple[int, int]:
    """(matching, compared) output cells; a cell is compared when either run produced output for it."""
    ca, cb = a.code_cells, b.code_cells
    matching = compared = 0
    for i in range(max(len(ca), len(cb))):
        oa = ca[i].outputs if i < len(ca) else ()
        ob = cb[i].outputs if i < len(cb) else ()
        if not oa and not ob:
            continue
        compared += 1
        if i < len(ca) and i < len(cb) and cell_outputs_match(oa, ob, tol):
            matching += 1
    return matching, compared


def output_determinism(run_a: Mapping[str, NotebookModel], run_b: Mapping[str, NotebookModel],
                       tol: float = NUMERIC_TOLERANCE) -> float | None:
    """Percentage of compared output cells that match; ``None`` when nothing is comparable."""
    if set(run_a) != set(run_b):
        only_a = sorted(set(run_a) - set(run_b))
        only_b = sorted(set(run_b) - set(run_a))
        raise DeterminismError(f"notebook sets differ (only in first: {only_a}, only in second: {only_b})")
    matching = compared = 0
    for path in sorted(run_a):
        m, c = compare_notebooks(run_a[path], run_b[path], tol)
        matching += m
        compared += c
    if compared == 0:
        return None
    return 100.0 * matching / compared


def load_run(directory: str | Path) -> dict[str, NotebookModel]:
    root = Path(directory)
    if not root.is_dir():
        raise DeterminismError(f"not a directory: {root}")
    return {p.relative_to(root).as_posix(): parse_notebook(p, p.relative_to(root).as_posix())
            for p in sorted(root.rglob("*.ipynb")) if ".ipynb_checkpoints" not in p.parts}


def determinism_between(dir_a: str | Path, dir_b: str | Path, tol: float = NUMERIC_TOLERANCE) -> float | None:
    return output_determinism(load_run(dir_a), load_run(dir_b), tol)
