"""Provenance records: self-contained JSON binding scores to commit, rubric and evidence."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import replace
from importlib import resources
from pathlib import Path

from . import __version__
from .assess import Assessment
from .rubric import RubricProfile, rubric_from_dict, validate_rubric
from .scoring import ExecutionEvidence, compose, score_results
from .submetrics.base import CATEGORIES, REGISTRY, SPECS, Evidence, SubMetricResult

SCHEMA_VERSION = 1
TOOL_NAME = "reprocheck"


class ProvenanceError(ValueError):
    pass


def utc_timestamp() -> str:
    """Current UTC time, or SOURCE_DATE_EPOCH when set, as ISO-8601."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch and epoch.isdigit() else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def canonical_json(obj) -> str:
    """Sorted keys, fixed separators, shortest round-trip float repr."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _result_dict(r: SubMetricResult) -> dict:
    return {
        "id": r.id,
        "category": r.category,
        "metric_type": r.metric_type,
        "score": r.score,
        "applicable": r.applicable,
        "evidence": [e.to_dict() for e in r.evidence],
    }


def _rubric_dict(rubric: RubricProfile) -> dict:
    d = rubric.to_dict()
    d["effective_submetric_weights"] = {
        c: rubric.submetric_weights(c) for c in CATEGORIES
    }
    return d


def assessment_to_record(a: Assessment, timestamp: str | None = None) -> dict:
    sc = a.scorecard
    bd = sc.breakdown
    comp = sc.composite
    record = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": TOOL_NAME, "version": __version__},
        "repo": {"source": a.source, "repo_id": a.repo_id, "commit_id": a.commit_id},
        "timestamp": timestamp or utc_timestamp(),
        "rubric": _rubric_dict(a.rubric),
        "submetrics": [_result_dict(r) for r in a.results],
        "categories": {
            c: {
                "raw": sc.categories[c].raw,
                "applicable": sc.categories[c].applicable,
                "gated": bd.gated[c],
                "contribution": bd.contributions[c],
            }
            for c in CATEGORIES
        },
        "sigma": sc.sigma,
        "penalties": {"hard": bd.p_hard, "seed": bd.p_seed, "flags": bd.penalty_flags},
        "rrs_unclamped": bd.unclamped,
        "rrs": bd.rrs,
        "execution_evidence": a.evidence.to_dict() if a.evidence is not None else None,
        "ros": comp.ros,
        "alpha": comp.alpha,
        "rcs": comp.rcs,
        "skipped": [{"path": p, "reason": why} for p, why in a.skipped],
        "recomputed_from": a.recomputed_from,
    }
    return record


def emit_provenance(assessment: Assessment, snapshot=None, timestamp: str | None = None) -> str:
    """Serialized record; ``snapshot`` only cross-checks the commit identity when given."""
    if snapshot is not None and snapshot.commit_id != assessment.commit_id:
        raise ProvenanceError(f"commit mismatch: {snapshot.commit_id} != {assessment.commit_id}")
    try:
        return canonical_json(assessment_to_record(assessment, timestamp))
    except (TypeError, ValueError) as exc:
        raise RuntimeError(f"provenance serialization failed: {exc}") from exc


def strip_timestamp(record_text: str) -> str:
    """Record text with the timestamp blanked, for comparisons."""
    doc = json.loads(record_text)
    doc["timestamp"] = ""
    return canonical_json(doc)


def record_identity(record: dict) -> dict:
    digest = hashlib.sha256(canonical_json(record).encode("utf-8")).hexdigest()
    return {
        "repo_id": record["repo"]["repo_id"],
        "commit_id": record["repo"]["commit_id"],
        "rubric": {"name": record["rubric"]["name"], "version": record["rubric"]["version"]},
        "timestamp": record["timestamp"],
        "sha256": digest,
    }


def load_record(path: str | Path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ProvenanceError(f"{path}: unreadable provenance record ({exc})") from exc
    check_record(doc)
    return doc


def check_record(record) -> None:
    if not isinstance(record, dict):
        raise ProvenanceError("record must be a JSON object")
    version = record.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ProvenanceError(f"unsupported schema version {version!r} (supported: {SCHEMA_VERSION})")
    for key in ("repo", "rubric", "submetrics", "rrs"):
        if key not in record:
            raise ProvenanceError(f"record missing {key!r}")
    ids = [s.get("id") for s in record["submetrics"]]
    if sorted(ids) != sorted(SPECS):
        raise ProvenanceError("record does not hold exactly one entry per registered sub-metric")


def results_from_record(record: dict) -> tuple[SubMetricResult, ...]:
    by_id = {s["id"]: s for s in record["submetrics"]}
    out = []
    for spec in REGISTRY:
        s = by_id[spec.id]
        score = s["score"]
        out.append(SubMetricResult(
            id=spec.id,
            category=spec.category,
            metric_type=spec.metric_type,
            score=None if score is None else float(score),
            evidence=tuple(Evidence.from_dict(e) for e in s.get("evidence", [])),
        ))
    return tuple(out)


def rubric_from_record(record: dict) -> RubricProfile:
    doc = {k: v for k, v in record["rubric"].items() if k != "effective_submetric_weights"}
    return rubric_from_dict(doc, "record rubric")


def evidence_from_record(record: dict) -> ExecutionEvidence | None:
    doc = record.get("execution_evidence")
    return ExecutionEvidence.from_dict(doc) if doc is not None else None


def assessment_from_record(record: dict) -> Assessment:
    """Rebuild the assessment a record was emitted from."""
    check_record(record)
    rubric = rubric_from_record(record)
    results = results_from_record(record)
    evidence = evidence_from_record(record)
    repo = record["repo"]
    return Assessment(
        source=repo["source"],
        repo_id=repo["repo_id"],
        commit_id=repo["commit_id"],
        rubric=rubric,
        results=results,
        scorecard=score_results(results, rubric, evidence),
        evidence=evidence,
        skipped=tuple((s["path"], s["reason"]) for s in record.get("skipped", [])),
        recomputed_from=record.get("recomputed_from"),
    )


def recompute_from_provenance(record: dict, new_rubric: RubricProfile) -> Assessment:
    """Rescore recorded sub-metric results under ``new_rubric``; the record itself is not modified."""
    errors = validate_rubric(new_rubric)
    if errors:
        raise ProvenanceError("invalid rubric: " + "; ".join(errors))
    base = assessment_from_record(record)
    return replace(base.rescored(new_rubric), recomputed_from=record_identity(record))


def compose_record(record: dict, evidence: ExecutionEvidence) -> dict:
    """Copy of ``record`` with ROS, coverage weight and RCS from ``evidence``; RRS untouched."""
    check_record(record)
    comp = compose(float(record["rrs"]), evidence)
    out = json.loads(json.dumps(record))
    out["execution_evidence"] = evidence.to_dict()
    out["ros"] = comp.ros
    out["alpha"] = comp.alpha
    out["rcs"] = comp.rcs
    return out


def rrs_from_record(record: dict) -> float:
    """Re-derive RRS from the recorded raws and rubric alone."""
    from .scoring import compute_rrs

    raws = {c: record["categories"][c]["raw"] for c in CATEGORIES}
    return compute_rrs(raws, rubric_from_record(record), record.get("sigma")).rrs


def schema() -> dict:
    return json.loads(resources.files("reprocheck.data").joinpath("provenance.schema.json").read_text("utf-8"))
