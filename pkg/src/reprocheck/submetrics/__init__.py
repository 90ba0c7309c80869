"""The 26 rule-based sub-metrics and their evaluation."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

from ..repo.models import RepoModels
from . import data_access, documentation, environment, portability, signals  # noqa: F401  (registers analyzers)
from .base import (
    ANALYZERS,
    BINARY,
    CATEGORIES,
    CATEGORY_NAMES,
    CONTINUOUS,
    REGISTRY,
    SEED_METRIC,
    SPECS,
    TIERED,
    Evidence,
    ResultBuilder,
    SubMetricResult,
    SubMetricSpec,
    default_weights,
    ids_in,
)

logger = logging.getLogger(__name__)


def evaluate_submetric(metric_id: str, models: RepoModels) -> SubMetricResult:
    """Run one analyzer; internal failures degrade to a warning result instead of raising."""
    if metric_id not in SPECS:
        raise KeyError(f"unknown sub-metric {metric_id!r}")
    try:
        return ANALYZERS[metric_id](models)
    except Exception as exc:  # analyzer defect or unexpected file content
        logger.warning("analyzer %s failed: %s", metric_id, exc)
        spec = SPECS[metric_id]
        note = f"warning: analyzer failed ({type(exc).__name__}: {exc})"
        return SubMetricResult(metric_id, spec.category, spec.metric_type,
                               None if spec.can_be_na else 0.0, (Evidence("", note),))


def evaluate_all(models: RepoModels, jobs: int = 1) -> list[SubMetricResult]:
    """One result per registered sub-metric, in registry order."""
    ids = [s.id for s in REGISTRY]
    if jobs <= 1:
        return [evaluate_submetric(i, models) for i in ids]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda i: evaluate_submetric(i, models), ids))


__all__ = [
    "BINARY", "CATEGORIES", "CATEGORY_NAMES", "CONTINUOUS", "REGISTRY", "SEED_METRIC", "SPECS", "TIERED",
    "Evidence", "ResultBuilder", "SubMetricResult", "SubMetricSpec", "default_weights", "ids_in",
    "evaluate_submetric", "evaluate_all",
]
