"""End-to-end assessment: acquire, parse, evaluate, score."""

from __future__ import annotations

import tempfile
from dataclasses import dataclass, replace

from .patterns import PatternSet
from .repo import RepoSnapshot, acquire_repository, build_models
from .repo.acquire import is_remote
from .rubric import RubricProfile, default_rubric
from .scoring import ExecutionEvidence, Scorecard, score_results
from .submetrics import evaluate_all
from .submetrics.base import SubMetricResult


@dataclass(frozen=True)
class Assessment:
    source: str
    repo_id: str
    commit_id: str
    rubric: RubricProfile
    results: tuple[SubMetricResult, ...]
    scorecard: Scorecard
    evidence: ExecutionEvidence | None = None
    skipped: tuple[tuple[str, str], ...] = ()
    recomputed_from: dict | None = None

    @property
    def rrs(self) -> float:
        return self.scorecard.rrs

    @property
    def ros(self) -> float | None:
        return self.scorecard.composite.ros

    @property
    def alpha(self) -> float:
        return self.scorecard.composite.alpha

    @property
    def rcs(self) -> float:
        return self.scorecard.composite.rcs

    @property
    def raws(self) -> dict[str, float]:
        return {c: s.raw for c, s in self.scorecard.categories.items()}

    def result(self, metric_id: str) -> SubMetricResult:
        return next(r for r in self.results if r.id == metric_id)

    def rescored(self, rubric: RubricProfile | None = None,
                 evidence: ExecutionEvidence | None = None) -> "Assessment":
        """Same sub-metric results under another rubric and/or execution evidence."""
        rubric = rubric or self.rubric
        evidence = evidence if evidence is not None else self.evidence
        return replace(self, rubric=rubric, evidence=evidence,
                       scorecard=score_results(self.results, rubric, evidence))


def assess_snapshot(snapshot: RepoSnapshot, rubric: RubricProfile | None = None,
                    evidence: ExecutionEvidence | None = None, patterns: PatternSet | None = None,
                    jobs: int = 1) -> Assessment:
    rubric = rubric or default_rubric()
    models = build_models(snapshot, patterns)
    results = tuple(evaluate_all(models, jobs=jobs))
    return Assessment(
        source=snapshot.source,
        repo_id=snapshot.repo_id,
        commit_id=snapshot.commit_id,
        rubric=rubric,
        results=results,
        scorecard=score_results(results, rubric, evidence),
        evidence=evidence,
        skipped=models.skipped,
    )


def assess_source(source: str, rubric: RubricProfile | None = None, evidence: ExecutionEvidence | None = None,
                  patterns: PatternSet | None = None, workdir: str | None = None, jobs: int = 1) -> Assessment:
    """Acquire ``source`` (local path or git URL) and assess it.

    Remote sources are cloned into ``workdir`` when given, otherwise into a
    temporary directory removed once scoring is done.
    """
    if workdir is None and is_remote(source):
        with tempfile.TemporaryDirectory(prefix="reprocheck-") as tmp:
            snapshot = acquire_repository(source, workdir=tmp)
            return assess_snapshot(snapshot, rubric, evidence, patterns, jobs)
    snapshot = acquire_repository(source, workdir=workdir)
    return assess_snapshot(snapshot, rubric, evidence, patterns, jobs)
