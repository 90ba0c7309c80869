"""Sub-metric result types and the 26-entry registry."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

CATEGORIES = ("E", "A", "D", "C", "S")

CATEGORY_NAMES = {
    "E": "Environment specification",
    "A": "Data accessibility",
    "D": "Documentation",
    "C": "Code portability",
    "S": "Reproducibility signals",
}

BINARY = "binary"
CONTINUOUS = "continuous"
TIERED = "tiered"


@dataclass(frozen=True)
class Evidence:
    path: str
    note: str
    line: int | None = None
    pattern: str | None = None

    def to_dict(self) -> dict:
        return {"path": self.path, "line": self.line, "pattern": self.pattern, "note": self.note}

    @classmethod
    def from_dict(cls, d: dict) -> "Evidence":
        return cls(path=d["path"], note=d.get("note", ""), line=d.get("line"), pattern=d.get("pattern"))


@dataclass(frozen=True)
class SubMetricResult:
    """Score in [0, 100], or ``None`` when the metric is not applicable."""

    id: str
    category: str
    metric_type: str
    score: float | None
    evidence: tuple[Evidence, ...] = ()

    @property
    def applicable(self) -> bool:
        return self.score is not None


@dataclass(frozen=True)
class SubMetricSpec:
    id: str
    category: str
    weight: float
    metric_type: str
    tiers: tuple[float, ...] = ()
    can_be_na: bool = False


REGISTRY: tuple[SubMetricSpec, ...] = (
    SubMetricSpec("dep_pinning", "E", 0.25, TIERED, (0, 25, 40, 75, 100)),
    SubMetricSpec("container_spec", "E", 0.30, TIERED, (0, 60, 100)),
    SubMetricSpec("env_bootstrap", "E", 0.25, BINARY),
    SubMetricSpec("runtime_version", "E", 0.20, BINARY),
    SubMetricSpec("data_description", "A", 0.20, TIERED, (0, 30, 60, 100)),
    SubMetricSpec("data_pointer", "A", 0.30, TIERED, (0, 25, 50, 75, 100)),
    SubMetricSpec("workflow_orchestration", "A", 0.20, TIERED, (0, 40, 60, 100)),
    SubMetricSpec("data_acquisition", "A", 0.30, BINARY),
    SubMetricSpec("doc_structure", "D", 0.25, CONTINUOUS),
    SubMetricSpec("install_instructions", "D", 0.20, TIERED, (0, 30, 60, 100)),
    SubMetricSpec("usage_examples", "D", 0.20, TIERED, (0, 40, 60, 100)),
    SubMetricSpec("inline_explanation", "D", 0.15, CONTINUOUS, can_be_na=True),
    SubMetricSpec("entry_point", "D", 0.10, BINARY),
    SubMetricSpec("docstring_coverage", "D", 0.05, CONTINUOUS, can_be_na=True),
    SubMetricSpec("reuse_metadata", "D", 0.05, TIERED, (0, 33, 66, 100)),
    SubMetricSpec("no_absolute_paths", "C", 0.40, CONTINUOUS, can_be_na=True),
    SubMetricSpec("import_resolvability", "C", 0.35, CONTINUOUS, can_be_na=True),
    SubMetricSpec("no_hardcoded_creds", "C", 0.15, CONTINUOUS, can_be_na=True),
    SubMetricSpec("no_silent_failures", "C", 0.10, CONTINUOUS, can_be_na=True),
    SubMetricSpec("seed_management", "S", 0.30, CONTINUOUS, can_be_na=True),
    SubMetricSpec("notebook_exec_order", "S", 0.20, CONTINUOUS, can_be_na=True),
    SubMetricSpec("test_file_presence", "S", 0.18, CONTINUOUS),
    SubMetricSpec("expected_outputs", "S", 0.12, TIERED, (0, 50, 100)),
    SubMetricSpec("ci_presence", "S", 0.10, BINARY),
    SubMetricSpec("config_externalised", "S", 0.06, TIERED, (0, 50, 100)),
    SubMetricSpec("hardware_requirements", "S", 0.04, BINARY, can_be_na=True),
)

SPECS: dict[str, SubMetricSpec] = {s.id: s for s in REGISTRY}

SEED_METRIC = "seed_management"


def default_weights() -> dict[str, float]:
    return {s.id: s.weight for s in REGISTRY}


def ids_in(category: str) -> list[str]:
    return [s.id for s in REGISTRY if s.category == category]


Analyzer = Callable[..., SubMetricResult]
ANALYZERS: dict[str, Analyzer] = {}


def analyzer(metric_id: str) -> Callable[[Analyzer], Analyzer]:
    if metric_id not in SPECS:
        raise KeyError(f"unknown sub-metric {metric_id!r}")

    def deco(fn: Analyzer) -> Analyzer:
        ANALYZERS[metric_id] = fn
        return fn

    return deco


@dataclass
class ResultBuilder:
    """Accumulates evidence for one metric and emits a checked result."""

    metric_id: str
    evidence: list[Evidence] = field(default_factory=list)

    def cite(self, path: str, note: str, line: int | None = None, pattern: str | None = None) -> None:
        self.evidence.append(Evidence(path, note, line, pattern))

    def result(self, score: float | None) -> SubMetricResult:
        spec = SPECS[self.metric_id]
        if score is not None:
            score = float(score)
            if not 0.0 <= score <= 100.0:
                raise ValueError(f"{self.metric_id}: score {score} outside [0, 100]")
            if spec.metric_type == BINARY and score not in (0.0, 100.0):
                raise ValueError(f"{self.metric_id}: binary metric emitted {score}")
            if spec.metric_type == TIERED and score not in spec.tiers:
                raise ValueError(f"{self.metric_id}: {score} not a declared tier")
            if score > 0 and not any(e.path for e in self.evidence):
                raise ValueError(f"{self.metric_id}: non-zero score without file evidence")
        elif not spec.can_be_na:
            raise ValueError(f"{self.metric_id} cannot be not-applicable")
        return SubMetricResult(
            id=self.metric_id,
            category=spec.category,
            metric_type=spec.metric_type,
            score=score,
            evidence=tuple(self.evidence),
        )

    def na(self, note: str) -> SubMetricResult:
        self.evidence.append(Evidence("", note))
        return self.result(None)
