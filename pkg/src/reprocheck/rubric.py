"""Community rubric profiles: category weights, gate parameters and sub-metric weight overrides."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping

import yaml

from . import __version__
from .submetrics.base import CATEGORIES, SPECS, default_weights, ids_in

WEIGHT_TOLERANCE = 0.01
TOP_LEVEL_KEYS = {"name", "version", "categories", "submetrics"}
CATEGORY_KEYS = ("weight", "tau", "k")


class RubricError(ValueError):
    """A rubric document failed to parse or validate; ``errors`` lists every problem found."""

    def __init__(self, errors: list[str], source: str = "<rubric>"):
        self.errors = list(errors)
        self.source = source
        super().__init__(f"{source}: " + "; ".join(self.errors))


@dataclass(frozen=True)
class CategoryPolicy:
    weight: float
    tau: float
    k: float

    def to_dict(self) -> dict:
        return {"weight": self.weight, "tau": self.tau, "k": self.k}


DEFAULT_POLICIES = {
    "E": CategoryPolicy(0.30, 40.0, 1.5),
    "A": CategoryPolicy(0.25, 30.0, 1.5),
    "D": CategoryPolicy(0.20, 20.0, 1.2),
    "C": CategoryPolicy(0.15, 25.0, 1.2),
    "S": CategoryPolicy(0.10, 30.0, 1.2),
}


@dataclass(frozen=True)
class RubricProfile:
    name: str
    version: str
    categories: Mapping[str, CategoryPolicy] = field(default_factory=lambda: dict(DEFAULT_POLICIES))
    submetrics: Mapping[str, float] = field(default_factory=dict)  # overrides only

    def __getattr__(self, item: str) -> CategoryPolicy:
        # profile.E, profile.A, ... as shorthand for profile.categories[...]
        if item in CATEGORIES:
            return self.categories[item]
        raise AttributeError(item)

    def weight(self, category: str) -> float:
        return self.categories[category].weight

    @property
    def weights(self) -> dict[str, float]:
        return {c: self.categories[c].weight for c in CATEGORIES}

    def submetric_weights(self, category: str) -> dict[str, float]:
        """Effective within-category weights: defaults with this profile's overrides applied."""
        base = default_weights()
        return {i: float(self.submetrics.get(i, base[i])) for i in ids_in(category)}

    def with_weights(self, weights: Mapping[str, float], name: str | None = None) -> "RubricProfile":
        cats = {c: replace(self.categories[c], weight=float(weights.get(c, self.categories[c].weight)))
                for c in CATEGORIES}
        return replace(self, name=name or self.name, categories=cats)

    def with_gates(self, tau: float | None = None, k: float | None = None,
                   name: str | None = None) -> "RubricProfile":
        cats = {c: replace(p, tau=p.tau if tau is None else float(tau), k=p.k if k is None else float(k))
                for c, p in self.categories.items()}
        return replace(self, name=name or self.name, categories=cats)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "version": self.version,
            "categories": {c: self.categories[c].to_dict() for c in CATEGORIES},
        }
        if self.submetrics:
            d["submetrics"] = {i: float(self.submetrics[i]) for i in SPECS if i in self.submetrics}
        return d


def default_rubric() -> RubricProfile:
    return RubricProfile(name="default", version=__version__)


def _number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate_rubric(profile: RubricProfile) -> list[str]:
    """Every violation in the profile; an empty list means valid."""
    errors: list[str] = []
    if not str(profile.name).strip():
        errors.append("name: must be non-empty")
    if not str(profile.version).strip():
        errors.append("version: must be non-empty")
    missing = [c for c in CATEGORIES if c not in profile.categories]
    if missing:
        errors.append(f"categories: missing {', '.join(missing)}")
    total = 0.0
    for c in CATEGORIES:
        p = profile.categories.get(c)
        if p is None:
            continue
        if not _number(p.weight) or p.weight < 0 or p.weight > 1:
            errors.append(f"categories.{c}.weight: must be a number in [0, 1] (got {p.weight!r})")
        else:
            total += p.weight
        if not _number(p.tau) or not 0 < p.tau <= 100:
            errors.append(f"categories.{c}.tau: gate threshold must be in (0, 100] (got {p.tau!r})")
        if not _number(p.k) or p.k < 1:
            errors.append(f"categories.{c}.k: gate exponent below 1 (got {p.k!r})")
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        errors.append(f"categories: category weight sum out of tolerance ({total:.4f}, expected 1.0 ± {WEIGHT_TOLERANCE})")

    overridden = set()
    for i, w in profile.submetrics.items():
        if i not in SPECS:
            errors.append(f"submetrics.{i}: unknown sub-metric")
            continue
        if not _number(w) or w < 0 or w > 1:
            errors.append(f"submetrics.{i}: weight must be a number in [0, 1] (got {w!r})")
            continue
        overridden.add(SPECS[i].category)
    for c in CATEGORIES:
        if c in overridden:
            s = sum(profile.submetric_weights(c).values())
            if abs(s - 1.0) > WEIGHT_TOLERANCE:
                errors.append(f"submetrics: category {c} sub-metric weight sum out of tolerance ({s:.4f})")
    return errors


def rubric_from_dict(doc, source: str = "<rubric>") -> RubricProfile:
    """Build and validate a profile from a parsed document; raises RubricError with all diagnostics."""
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise RubricError(["document: top level must be a mapping"], source)
    errors: list[str] = []
    for key in sorted(set(doc) - TOP_LEVEL_KEYS, key=str):
        errors.append(f"{key}: unknown key")

    def text(key: str) -> str:
        value = doc.get(key)
        if value is None or isinstance(value, (dict, list, bool)):
            errors.append(f"{key}: required non-empty string")
            return ""
        return str(value)

    name, version = text("name"), text("version")
    cats = dict(DEFAULT_POLICIES)
    raw_cats = doc.get("categories") or {}
    if not isinstance(raw_cats, dict):
        errors.append("categories: must be a mapping")
        raw_cats = {}
    for c, entry in raw_cats.items():
        if c not in CATEGORIES:
            errors.append(f"categories.{c}: unknown category")
            continue
        if not isinstance(entry, dict):
            errors.append(f"categories.{c}: must be a mapping of weight/tau/k")
            continue
        for key in sorted(set(entry) - set(CATEGORY_KEYS), key=str):
            errors.append(f"categories.{c}.{key}: unknown key")
        fields = DEFAULT_POLICIES[c].to_dict()
        for key in CATEGORY_KEYS:
            if key in entry:
                if not _number(entry[key]):
                    errors.append(f"categories.{c}.{key}: must be a number (got {entry[key]!r})")
                else:
                    fields[key] = float(entry[key])
        cats[c] = CategoryPolicy(**fields)

    subs: dict[str, float] = {}
    raw_subs = doc.get("submetrics") or {}
    if not isinstance(raw_subs, dict):
        errors.append("submetrics: must be a mapping of sub-metric id to weight")
        raw_subs = {}
    for i, w in raw_subs.items():
        if i not in SPECS:
            errors.append(f"submetrics.{i}: unknown sub-metric")
        elif not _number(w):
            errors.append(f"submetrics.{i}: must be a number (got {w!r})")
        else:
            subs[i] = float(w)

    if errors:
        raise RubricError(errors, source)
    profile = RubricProfile(name=name, version=version, categories=cats, submetrics=subs)
    errors = validate_rubric(profile)
    if errors:
        raise RubricError(errors, source)
    return profile


def load_rubric(document: str, source: str = "<rubric>") -> RubricProfile:
    try:
        doc = yaml.safe_load(document)
    except yaml.YAMLError as exc:
        raise RubricError([f"malformed YAML: {exc}"], source) from exc
    return rubric_from_dict(doc, source)


def load_rubric_file(path: str | Path) -> RubricProfile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise RubricError([f"cannot read rubric file: {exc.strerror or exc}"], str(p)) from exc
    return load_rubric(text, str(p))


def bundled_rubric(name: str) -> RubricProfile:
    """One of the profiles shipped with the package, e.g. ``bioinformatics-v1``."""
    ref = resources.files("reprocheck") / "data" / "rubrics" / f"{name}.yaml"
    if not ref.is_file():
        raise RubricError([f"no bundled rubric named {name!r}"], name)
    return load_rubric(ref.read_text(encoding="utf-8"), name)


def resolve_rubric(spec: str | None) -> RubricProfile:
    """A file path, a bundled profile name, or the default when ``spec`` is empty."""
    if not spec:
        return default_rubric()
    if Path(spec).exists():
        return load_rubric_file(spec)
    return bundled_rubric(spec)


def dump_rubric(profile: RubricProfile) -> str:
    return yaml.safe_dump(profile.to_dict(), sort_keys=False)
