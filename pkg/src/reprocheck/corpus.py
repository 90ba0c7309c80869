"""Labeled corpora of provenance records and the diagnostics run over them."""

from __future__ import annotations

import csv
import itertools
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .provenance import ProvenanceError, check_record, results_from_record
from .rubric import RubricProfile, validate_rubric
from .scoring import FAILURE_MODES, compose, compute_rrs, category_scores, derive_proxy_evidence
from .stats import (
    StatsError,
    auc_roc,
    benjamini_hochberg,
    bootstrap_ci,
    cohens_d,
    kendall_tau,
    kruskal_wallis,
    ks_test,
    point_biserial,
)
from .submetrics.base import CATEGORIES, REGISTRY, SubMetricResult

logger = logging.getLogger(__name__)

# install errors first, success only when nothing failed
PRIORITY = ("install_dep", "missing_module", "missing_data", "code_error", "success")
LABEL_COLUMNS = ("repo_id", "failure_mode", "success_nb_count", "total_exec_count")
ANALYSES = ("categories", "pairwise", "submetrics", "auc", "perturbation", "loco", "grid", "gate", "ros")


class CorpusError(ValueError):
    pass


def aggregate_failure_mode(notebook_labels: Iterable[str]) -> str:
    labels = list(notebook_labels)
    if not labels:
        raise CorpusError("no notebook labels")
    unknown = sorted(set(labels) - set(PRIORITY))
    if unknown:
        raise CorpusError(f"unknown failure mode(s): {', '.join(unknown)}")
    return next(mode for mode in PRIORITY if mode in labels)


@dataclass(frozen=True)
class CorpusRecord:
    repo_id: str
    failure_mode: str
    success_nb_count: int
    total_exec_count: int
    results: tuple[SubMetricResult, ...]
    record: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def label(self) -> int:
        return int(self.failure_mode == "success")

    @cached_property
    def sigma(self) -> float | None:
        return next((r.score for r in self.results if r.id == "seed_management"), None)

    def raws(self, rubric: RubricProfile) -> dict[str, float]:
        return {c: s.raw for c, s in category_scores(self.results, rubric).items()}

    def score(self, metric_id: str) -> float | None:
        return next(r.score for r in self.results if r.id == metric_id)


def load_labels(path: str | Path) -> dict[str, tuple[str, int, int]]:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read label file {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        missing = [c for c in LABEL_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise CorpusError(f"label file lacks column(s): {', '.join(missing)}")
        labels = {}
        for lineno, row in enumerate(reader, start=2):
            mode = row["failure_mode"].strip()
            if mode not in FAILURE_MODES:
                raise CorpusError(f"{path}:{lineno}: unknown failure mode {mode!r}")
            try:
                k, m = int(row["success_nb_count"]), int(row["total_exec_count"])
            except ValueError as exc:
                raise CorpusError(f"{path}:{lineno}: counts must be integers") from exc
            labels[row["repo_id"].strip()] = (mode, k, m)
    return labels


def make_record(record: dict, failure_mode: str, success_nb_count: int = 0, total_exec_count: int = 0) -> CorpusRecord:
    check_record(record)
    return CorpusRecord(
        repo_id=record["repo"]["repo_id"],
        failure_mode=failure_mode,
        success_nb_count=success_nb_count,
        total_exec_count=total_exec_count,
        results=results_from_record(record),
        record=record,
    )


def load_corpus(directory: str | Path, labels_csv: str | Path) -> list[CorpusRecord]:
    """Pair every provenance record in ``directory`` with its label row; unmatched entries are skipped."""
    labels = load_labels(labels_csv)
    root = Path(directory)
    if not root.is_dir():
        raise CorpusError(f"not a directory: {root}")
    corpus = []
    seen = set()
    for path in sorted(root.rglob("*.json")):
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
            check_record(record)
        except (json.JSONDecodeError, ProvenanceError, OSError) as exc:
            logger.warning("skipping %s: %s", path, exc)
            continue
        rid = record["repo"]["repo_id"]
        if rid not in labels:
            logger.warning("no label for %s (%s)", rid, path.name)
            continue
        if rid in seen:
            logger.warning("duplicate record for %s (%s) ignored", rid, path.name)
            continue
        seen.add(rid)
        corpus.append(make_record(record, *labels[rid]))
    for rid in sorted(set(labels) - seen):
        logger.warning("label without record: %s", rid)
    return corpus


class Rescorer:
    """RRS of every corpus record under varying rubrics.

    Category raws depend only on sub-metric weights, so they are cached per
    sub-metric weighting and only the rubric's category layer is re-applied.
    """

    def __init__(self, corpus: Sequence[CorpusRecord]):
        self.corpus = list(corpus)
        self._raws: dict[tuple, list[dict[str, float]]] = {}

    def raws(self, rubric: RubricProfile) -> list[dict[str, float]]:
        key = tuple(sorted(rubric.submetrics.items()))
        if key not in self._raws:
            self._raws[key] = [r.raws(rubric) for r in self.corpus]
        return self._raws[key]

    def rrs(self, rubric: RubricProfile) -> np.ndarray:
        return np.array([compute_rrs(raw, rubric, rec.sigma).rrs
                         for raw, rec in zip(self.raws(rubric), self.corpus)])

    @property
    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.corpus])


def _redistribute(weights: dict[str, float], category: str, new_weight: float) -> dict[str, float]:
    """Set one weight and scale the others proportionally so the total stays 1."""
    rest = 1.0 - weights[category]
    if rest <= 0.0:
        raise CorpusError(f"cannot redistribute: category {category} holds all weight")
    scale = (1.0 - new_weight) / rest
    out = {c: (new_weight if c == category else w * scale) for c, w in weights.items()}
    assert abs(sum(out.values()) - 1.0) < 1e-9
    return out


def perturbation_factors(span: float, steps: int) -> list[float]:
    if not 0.0 <= span < 1.0:
        raise CorpusError("span must lie in [0, 1)")
    if steps < 1:
        raise CorpusError("steps must be at least 1")
    return [1.0 - span + 2.0 * span * i / steps for i in range(steps + 1)]


def weight_perturbation(corpus: Sequence[CorpusRecord], rubric: RubricProfile, span: float = 0.5,
                        steps: int = 20, rescorer: Rescorer | None = None) -> dict:
    """Minimum Kendall tau of the RRS ranking versus baseline as each category weight is swept."""
    if not corpus:
        raise CorpusError("empty corpus")
    rescorer = rescorer or Rescorer(corpus)
    base = rescorer.rrs(rubric)
    out = {}
    for c in CATEGORIES:
        sweep = []
        notes = set()
        for f in perturbation_factors(span, steps):
            w = _redistribute(rubric.weights, c, rubric.weight(c) * f)
            variant = rubric.with_weights(w)
            assert not validate_rubric(variant), validate_rubric(variant)
            tau = kendall_tau(base, rescorer.rrs(variant))
            if tau is None:
                notes.add("degenerate ranking")
                tau = 1.0
            sweep.append({"factor": f, "weight": w[c], "tau": tau})
        out[c] = {"min_tau": min(s["tau"] for s in sweep), "sweep": sweep, "notes": sorted(notes)}
    return out


def loco_analysis(corpus: Sequence[CorpusRecord], rubric: RubricProfile,
                  rescorer: Rescorer | None = None) -> dict:
    rescorer = rescorer or Rescorer(corpus)
    y = rescorer.labels
    baseline = auc_roc(rescorer.rrs(rubric), y)
    rows = {}
    for c in CATEGORIES:
        w = rubric.weights
        if w[c] == 0.0:
            variant = rubric
        else:
            rest = 1.0 - w[c]
            variant = rubric.with_weights({k: (0.0 if k == c else v / rest) for k, v in w.items()})
        auc = auc_roc(rescorer.rrs(variant), y)
        rows[c] = {"auc": auc, "delta": auc - baseline}
    return {"baseline": baseline, "removed": rows}


def simplex_grid(step: float = 0.1, floor: float = 0.1, parts: int = len(CATEGORIES)) -> list[tuple[float, ...]]:
    """Weight vectors in multiples of ``step``, each at least ``floor``, summing to one."""
    units = round(1.0 / step)
    floor_units = round(floor / step)
    if units <= 0 or abs(units * step - 1.0) > 1e-9 or abs(floor_units * step - floor) > 1e-9:
        raise CorpusError(f"step {step} and floor {floor} do not tile the unit simplex")
    if floor_units * parts > units:
        raise CorpusError(f"infeasible grid: {parts} x floor {floor} exceeds 1")
    free = units - floor_units * parts
    grid = []
    # stars and bars over the free units
    for bars in itertools.combinations(range(free + parts - 1), parts - 1):
        prev = -1
        counts = []
        for b in bars + (free + parts - 1,):
            counts.append(b - prev - 1)
            prev = b
        grid.append(tuple((floor_units + k) / units for k in counts))
    return grid


def grid_search_weights(corpus: Sequence[CorpusRecord], rubric: RubricProfile, step: float = 0.1,
                        floor: float = 0.1, rescorer: Rescorer | None = None) -> dict:
    rescorer = rescorer or Rescorer(corpus)
    y = rescorer.labels
    grid = simplex_grid(step, floor)
    best_auc, best = -1.0, None
    for vec in grid:
        variant = rubric.with_weights(dict(zip(CATEGORIES, vec)))
        auc = auc_roc(rescorer.rrs(variant), y)
        if auc > best_auc:
            best_auc, best = auc, vec
    return {
        "n_configs": len(grid),
        "best_weights": dict(zip(CATEGORIES, best)),
        "best_auc": best_auc,
        "baseline_auc": auc_roc(rescorer.rrs(rubric), y),
        "baseline_in_grid": any(all(abs(a - b) < 1e-9 for a, b in zip(vec, rubric.weights.values()))
                                for vec in grid),
    }


def gate_sweep(corpus: Sequence[CorpusRecord], rubric: RubricProfile,
               taus: Iterable[float] = range(10, 71, 10), rescorer: Rescorer | None = None) -> dict:
    """AUC with every threshold set to each tau, and with all exponents linear."""
    rescorer = rescorer or Rescorer(corpus)
    y = rescorer.labels
    by_tau = {str(t): auc_roc(rescorer.rrs(rubric.with_gates(tau=t)), y) for t in taus}
    vals = list(by_tau.values())
    return {
        "tau": by_tau,
        "tau_span": max(vals) - min(vals),
        "linear_k": auc_roc(rescorer.rrs(rubric.with_gates(k=1.0)), y),
        "default": auc_roc(rescorer.rrs(rubric), y),
    }


def ros_by_mode(corpus: Sequence[CorpusRecord], rubric: RubricProfile,
                rescorer: Rescorer | None = None) -> dict:
    """Per failure mode: mean proxy components, ROS, RCS and RRS."""
    rescorer = rescorer or Rescorer(corpus)
    rrs = rescorer.rrs(rubric)
    rows: dict[str, dict[str, list[float]]] = {}
    for rec, r in zip(corpus, rrs):
        ev = derive_proxy_evidence(rec.failure_mode, rec.success_nb_count, rec.total_exec_count)
        comp = compose(float(r), ev)
        row = rows.setdefault(rec.failure_mode, {k: [] for k in ("I", "X", "N", "E_prime", "ROS", "RCS", "RRS")})
        for name, value in ev.available.items():
            row[name].append(value)
        row["ROS"].append(comp.ros)
        row["RCS"].append(comp.rcs)
        row["RRS"].append(float(r))
    return {mode: {k: (float(np.mean(v)) if v else None) for k, v in rows[mode].items()}
            for mode in FAILURE_MODES if mode in rows}


def _groups(values: Sequence[float], corpus: Sequence[CorpusRecord]) -> dict[str, list[float]]:
    g: dict[str, list[float]] = {}
    for v, rec in zip(values, corpus):
        g.setdefault(rec.failure_mode, []).append(v)
    return {m: g[m] for m in FAILURE_MODES if m in g}


def category_discriminability(corpus: Sequence[CorpusRecord], rubric: RubricProfile,
                              rescorer: Rescorer | None = None) -> dict:
    rescorer = rescorer or Rescorer(corpus)
    raws = rescorer.raws(rubric)
    y = rescorer.labels
    out = {}
    for c in CATEGORIES:
        vals = [r[c] for r in raws]
        groups = _groups(vals, corpus)
        entry = {"weight": rubric.weight(c), "means": {m: float(np.mean(v)) for m, v in groups.items()}}
        if len(groups) >= 2:
            kw = kruskal_wallis(list(groups.values()))
            entry.update(H=kw.H, p_kw=kw.p, df=kw.df)
        pb = point_biserial(vals, y)
        entry.update(r_pb=pb.r, p_pb=pb.p)
        out[c] = entry
    return out


def pairwise_effects(corpus: Sequence[CorpusRecord], rubric: RubricProfile,
                     rescorer: Rescorer | None = None) -> dict:
    rescorer = rescorer or Rescorer(corpus)
    raws = rescorer.raws(rubric)
    out = {}
    for c in CATEGORIES:
        groups = _groups([r[c] for r in raws], corpus)
        rows = []
        for a, b in itertools.combinations(groups, 2):
            try:
                d = cohens_d(groups[a], groups[b])
            except StatsError:
                d = None
            ks = ks_test(groups[a], groups[b])
            rows.append({"a": a, "b": b, "cohens_d": d, "ks_D": ks.D, "p": ks.p})
        out[c] = rows
    return out


def submetric_associations(corpus: Sequence[CorpusRecord], fdr: float = 0.05) -> dict:
    """Point-biserial per sub-metric over records where it applies, with BH q-values."""
    y_all = np.array([r.label for r in corpus])
    rows = []
    for spec in REGISTRY:
        scores = [rec.score(spec.id) for rec in corpus]
        mask = np.array([s is not None for s in scores])
        x = np.array([s for s in scores if s is not None], dtype=float)
        y = y_all[mask]
        if len(set(y.tolist())) < 2:
            rows.append({"id": spec.id, "r_pb": 0.0, "p": 1.0, "n": int(mask.sum())})
            continue
        pb = point_biserial(x, y)
        rows.append({"id": spec.id, "r_pb": pb.r, "p": pb.p, "n": pb.n})
    q, reject = benjamini_hochberg([r["p"] for r in rows], fdr)
    for row, qv, rej in zip(rows, q, reject):
        row["q"] = qv
        row["significant"] = rej
    return {"fdr": fdr, "m": len(rows), "rows": rows}


def run_diagnostics(corpus: Sequence[CorpusRecord], rubric: RubricProfile, analyses: Iterable[str] = ANALYSES,
                    seed: int = 0, resamples: int = 10_000, span: float = 0.5, steps: int = 20) -> dict:
    analyses = list(analyses)
    unknown = sorted(set(analyses) - set(ANALYSES))
    if unknown:
        raise CorpusError(f"unknown analyses: {', '.join(unknown)}")
    if not corpus:
        raise CorpusError("empty corpus")
    rescorer = Rescorer(corpus)
    y = rescorer.labels
    report: dict = {
        "n_records": len(corpus),
        "rubric": {"name": rubric.name, "version": rubric.version},
        "mode_counts": {m: sum(1 for r in corpus if r.failure_mode == m) for m in FAILURE_MODES},
    }
    needs_both = {"auc", "loco", "grid", "gate", "categories", "submetrics"}
    if needs_both & set(analyses) and len(set(y.tolist())) < 2:
        raise CorpusError("single-class corpus: binary analyses need both success and failure records")
    if "categories" in analyses:
        report["categories"] = category_discriminability(corpus, rubric, rescorer)
    if "pairwise" in analyses:
        report["pairwise"] = pairwise_effects(corpus, rubric, rescorer)
    if "submetrics" in analyses:
        report["submetrics"] = submetric_associations(corpus)
    if "auc" in analyses:
        rrs = rescorer.rrs(rubric)
        ci = bootstrap_ci(rrs, y, resamples=resamples, seed=seed)
        report["auc"] = {"auc": auc_roc(rrs, y), "ci": [ci.lo, ci.hi], "level": ci.level,
                         "resamples": ci.resamples, "used": ci.used, "seed": seed}
    if "perturbation" in analyses:
        report["perturbation"] = weight_perturbation(corpus, rubric, span, steps, rescorer)
    if "loco" in analyses:
        report["loco"] = loco_analysis(corpus, rubric, rescorer)
    if "grid" in analyses:
        report["grid"] = grid_search_weights(corpus, rubric, rescorer=rescorer)
    if "gate" in analyses:
        report["gate"] = gate_sweep(corpus, rubric, rescorer=rescorer)
    if "ros" in analyses:
        report["ros"] = ros_by_mode(corpus, rubric, rescorer)
    return report


def _f(v, nd: int = 3) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.{nd}f}"
    return str(v)


def format_report(report: dict) -> str:
    lines = [f"records: {report['n_records']}  rubric: {report['rubric']['name']} {report['rubric']['version']}",
             "modes: " + ", ".join(f"{m}={n}" for m, n in report["mode_counts"].items())]
    if "categories" in report:
        lines += ["", f"{'cat':<4}{'w':>6}{'r_pb':>9}{'p_pb':>8}{'H':>9}{'p_KW':>8}"]
        for c, e in report["categories"].items():
            lines.append(f"{c:<4}{e['weight']:>6.2f}{e['r_pb']:>+9.3f}{e['p_pb']:>8.3f}"
                         f"{_f(e.get('H'), 2):>9}{_f(e.get('p_kw')):>8}")
    if "pairwise" in report:
        lines += ["", "pairwise (Cohen's d, KS D, KS p)"]
        for c, rows in report["pairwise"].items():
            for r in rows:
                lines.append(f"  {c} {r['a']} vs {r['b']}: d={_f(r['cohens_d'], 2)} D={r['ks_D']:.2f} p={r['p']:.3g}")
    if "submetrics" in report:
        lines += ["", f"{'sub-metric':<24}{'r_pb':>8}{'p':>8}{'q':>8}"]
        for r in report["submetrics"]["rows"]:
            lines.append(f"{r['id']:<24}{r['r_pb']:>+8.3f}{r['p']:>8.3f}{r['q']:>8.3f}")
    if "auc" in report:
        a = report["auc"]
        lines += ["", f"AUC {a['auc']:.3f} [{a['ci'][0]:.3f}, {a['ci'][1]:.3f}] ({a['level']:.0%}, {a['resamples']} resamples)"]
    if "perturbation" in report:
        lines += ["", "weight perturbation, minimum Kendall tau"]
        for c, e in report["perturbation"].items():
            note = f"  ({', '.join(e['notes'])})" if e["notes"] else ""
            lines.append(f"  {c}: {e['min_tau']:.3f}{note}")
    if "loco" in report:
        lo = report["loco"]
        lines += ["", f"{'removed':<10}{'AUC':>8}{'dAUC':>9}", f"{'none':<10}{lo['baseline']:>8.3f}{'-':>9}"]
        for c, r in sorted(lo["removed"].items(), key=lambda kv: kv[1]["delta"]):
            lines.append(f"{'-' + c:<10}{r['auc']:>8.3f}{r['delta']:>+9.3f}")
    if "grid" in report:
        g = report["grid"]
        w = ", ".join(f"{c}={v:.1f}" for c, v in g["best_weights"].items())
        lines += ["", f"grid: {g['n_configs']} configs, best AUC {g['best_auc']:.3f} at {w}; "
                      f"default {g['baseline_auc']:.3f}"]
    if "gate" in report:
        g = report["gate"]
        lines += ["", "gate sweep: " + ", ".join(f"tau={t}: {v:.3f}" for t, v in g["tau"].items()),
                  f"  span {g['tau_span']:.3f}; linear k {g['linear_k']:.3f}; default {g['default']:.3f}"]
    if "ros" in report:
        lines += ["", f"{'mode':<16}{'I':>6}{'X':>6}{'N':>7}{'E_p':>6}{'ROS':>7}{'RCS':>7}{'RRS':>7}"]
        for m, r in report["ros"].items():
            lines.append(f"{m:<16}" + "".join(f"{_f(r[k], 1):>{wd}}" for k, wd in
                                            (("I", 6), ("X", 6), ("N", 7), ("E_prime", 6), ("ROS", 7),
                                             ("RCS", 7), ("RRS", 7))))
    return "\n".join(lines) + "\n"
