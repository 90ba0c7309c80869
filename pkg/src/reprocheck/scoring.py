"""Scoring algebra: gate, category aggregation, penalties, RRS, ROS, coverage weight and RCS."""

from __future__ import annotations

import json
import math
from decimal import Decimal
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .rubric import RubricProfile, validate_rubric
from .submetrics.base import CATEGORIES, SPECS, SubMetricResult

HARD_PENALTY_E = 20.0
HARD_PENALTY_A = 15.0
HARD_THRESHOLD = 10.0
SEED_PENALTY = 10.0
SEED_THRESHOLD = 50.0
ALPHA_MAX = 0.70
ALPHA_MIN = 0.10

COMPONENTS = ("I", "X", "delta", "N", "E_prime", "T")
COMPONENT_WEIGHTS = {"I": 0.30, "X": 0.25, "delta": 0.20, "N": 0.10, "E_prime": 0.10, "T": 0.05}
FAILURE_MODES = ("success", "install_dep", "missing_module", "missing_data", "code_error")


def gate(x: float, tau: float, k: float) -> float:
    """Linear above the threshold, power-law compressed below it; value in [0, 1]."""
    if not 0.0 <= x <= 100.0:
        raise ValueError(f"gate: score {x} outside [0, 100]")
    if not 0.0 < tau <= 100.0:
        raise ValueError(f"gate: threshold {tau} outside (0, 100]")
    if k < 1.0:
        raise ValueError(f"gate: exponent {k} below 1")
    if x >= tau:
        return x / 100.0
    return (x / tau) ** k * tau / 100.0


@dataclass(frozen=True)
class CategoryScore:
    category: str
    raw: float
    applicable: bool = True


def aggregate_category(results: Iterable[SubMetricResult], weights: Mapping[str, float]) -> CategoryScore:
    """Weighted mean of applicable sub-metric scores, weights renormalised over the applicable set."""
    results = list(results)
    for r in results:
        if r.id not in SPECS:
            raise KeyError(f"unknown sub-metric {r.id!r}")
    category = results[0].category if results else ""
    num = den = 0.0
    for r in results:
        if r.score is None:
            continue
        w = float(weights[r.id])
        num += w * r.score
        den += w
    if den <= 0.0:
        return CategoryScore(category, 0.0, applicable=False)
    return CategoryScore(category, min(max(num / den, 0.0), 100.0))


def category_scores(results: Iterable[SubMetricResult], rubric: RubricProfile) -> dict[str, CategoryScore]:
    by_cat: dict[str, list[SubMetricResult]] = {c: [] for c in CATEGORIES}
    for r in results:
        by_cat[r.category].append(r)
    out = {}
    for c in CATEGORIES:
        score = aggregate_category(by_cat[c], rubric.submetric_weights(c))
        out[c] = CategoryScore(c, score.raw, score.applicable)
    return out


def hard_penalty(e_raw: float, a_raw: float) -> float:
    return HARD_PENALTY_E * (e_raw < HARD_THRESHOLD) + HARD_PENALTY_A * (a_raw < HARD_THRESHOLD)


def seed_penalty(sigma: float | None) -> float:
    if sigma is None:
        return 0.0
    return SEED_PENALTY if sigma < SEED_THRESHOLD else 0.0


@dataclass(frozen=True)
class RRSBreakdown:
    raws: dict[str, float]
    gated: dict[str, float]
    contributions: dict[str, float]  # 100 · w_i · g_i
    p_hard: float
    p_seed: float
    unclamped: float
    rrs: float

    @property
    def penalty_flags(self) -> dict[str, bool]:
        return {
            "E_below_10": self.raws["E"] < HARD_THRESHOLD,
            "A_below_10": self.raws["A"] < HARD_THRESHOLD,
            "seed_below_50": self.p_seed > 0,
        }


def compute_rrs(raws: Mapping[str, float], rubric: RubricProfile, sigma: float | None) -> RRSBreakdown:
    errors = validate_rubric(rubric)
    if errors:
        raise ValueError("invalid rubric: " + "; ".join(errors))
    gated = {}
    contributions = {}
    for c in CATEGORIES:
        p = rubric.categories[c]
        gated[c] = gate(float(raws[c]), p.tau, p.k)
        contributions[c] = 100.0 * p.weight * gated[c]
    p_hard = hard_penalty(raws["E"], raws["A"])
    p_seed = seed_penalty(sigma)
    unclamped = sum(contributions[c] for c in CATEGORIES) - p_hard - p_seed
    return RRSBreakdown(
        raws={c: float(raws[c]) for c in CATEGORIES},
        gated=gated,
        contributions=contributions,
        p_hard=p_hard,
        p_seed=p_seed,
        unclamped=unclamped,
        rrs=min(max(unclamped, 0.0), 100.0),
    )


class EvidenceError(ValueError):
    pass


@dataclass(frozen=True)
class ExecutionEvidence:
    """Execution-probe components on [0, 100]; ``None`` marks an unavailable probe."""

    I: float | None = None
    X: float | None = None
    delta: float | None = None
    N: float | None = None
    E_prime: float | None = None
    T: float | None = None

    def __post_init__(self):
        for name in COMPONENTS:
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise EvidenceError(f"component {name}: not a number ({v!r})")
            if not 0.0 <= v <= 100.0:
                raise EvidenceError(f"component {name}: {v} outside [0, 100]")
            object.__setattr__(self, name, float(v))

    @property
    def available(self) -> dict[str, float]:
        return {n: getattr(self, n) for n in COMPONENTS if getattr(self, n) is not None}

    def to_dict(self) -> dict:
        return {"components": self.available}

    @classmethod
    def from_dict(cls, doc) -> "ExecutionEvidence":
        if not isinstance(doc, dict):
            raise EvidenceError("evidence document must be an object")
        extra = set(doc) - {"components"}
        if extra:
            raise EvidenceError(f"unknown top-level keys: {', '.join(sorted(extra))}")
        comps = doc.get("components") or {}
        if not isinstance(comps, dict):
            raise EvidenceError("components must be an object")
        unknown = set(comps) - set(COMPONENTS)
        if unknown:
            raise EvidenceError(f"unknown components: {', '.join(sorted(unknown))}")
        return cls(**{k: v for k, v in comps.items() if v is not None})

    @classmethod
    def from_json(cls, text: str) -> "ExecutionEvidence":
        try:
            doc = json.loads(text) if text.strip() else {}
        except json.JSONDecodeError as exc:
            raise EvidenceError(f"malformed JSON: {exc}") from exc
        return cls.from_dict(doc)


def available_weight(evidence: ExecutionEvidence) -> float:
    return math.fsum(COMPONENT_WEIGHTS[n] for n in evidence.available)


def compute_ros(evidence: ExecutionEvidence) -> float | None:
    avail = evidence.available
    if not avail:
        return None
    num = sum(COMPONENT_WEIGHTS[n] * y for n, y in avail.items())
    return num / available_weight(evidence)


def compute_alpha(evidence: ExecutionEvidence) -> float:
    if not evidence.available:
        return 0.0
    # decimal product so that e.g. 0.75 * 0.70 lands on 0.525 rather than one ulp below
    alpha = float(Decimal(repr(min(available_weight(evidence), 1.0))) * Decimal(repr(ALPHA_MAX)))
    return max(alpha, ALPHA_MIN)


def compute_rcs(rrs: float, ros: float | None, alpha: float) -> float:
    if ros is None:
        return rrs
    return (1.0 - alpha) * rrs + alpha * ros


@dataclass(frozen=True)
class Composite:
    ros: float | None
    alpha: float
    rcs: float


def compose(rrs: float, evidence: ExecutionEvidence | None) -> Composite:
    evidence = evidence or ExecutionEvidence()
    ros = compute_ros(evidence)
    alpha = compute_alpha(evidence)
    return Composite(ros, alpha, compute_rcs(rrs, ros, alpha))


def derive_proxy_evidence(failure_mode: str, success_nb_count: int, total_exec_count: int) -> ExecutionEvidence:
    """Four proxy components from a failure-mode label and notebook execution counts."""
    if failure_mode not in FAILURE_MODES:
        raise ValueError(f"unknown failure mode {failure_mode!r}")
    if success_nb_count < 0 or total_exec_count < 0 or success_nb_count > total_exec_count:
        raise ValueError(f"invalid counts: {success_nb_count} successful of {total_exec_count}")
    return ExecutionEvidence(
        I=0.0 if failure_mode == "install_dep" else 100.0,
        X=100.0 if failure_mode == "success" else 0.0,
        N=100.0 * success_nb_count / total_exec_count if total_exec_count else None,
        E_prime=0.0 if failure_mode == "missing_module" else 100.0,
    )


@dataclass(frozen=True)
class Scorecard:
    """Everything derived from sub-metric results under one rubric."""

    categories: dict[str, CategoryScore]
    sigma: float | None
    breakdown: RRSBreakdown
    composite: Composite = field(default_factory=lambda: Composite(None, 0.0, 0.0))

    @property
    def rrs(self) -> float:
        return self.breakdown.rrs


def score_results(results: Iterable[SubMetricResult], rubric: RubricProfile,
                  evidence: ExecutionEvidence | None = None) -> Scorecard:
    results = list(results)
    cats = category_scores(results, rubric)
    sigma = next((r.score for r in results if r.id == "seed_management"), None)
    breakdown = compute_rrs({c: s.raw for c, s in cats.items()}, rubric, sigma)
    return Scorecard(cats, sigma, breakdown, compose(breakdown.rrs, evidence))
