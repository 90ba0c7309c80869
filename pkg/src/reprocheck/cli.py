"""Command-line interface."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .assess import Assessment, assess_source
from .corpus import ANALYSES, CorpusError, format_report, load_corpus, run_diagnostics
from .determinism import DeterminismError, determinism_between
from .patterns import load_patterns
from .provenance import (
    ProvenanceError,
    assessment_to_record,
    canonical_json,
    compose_record,
    emit_provenance,
    load_record,
    recompute_from_provenance,
)
from .repo import UNCOMMITTED, AcquisitionError
from .rubric import RubricError, RubricProfile, dump_rubric, load_rubric_file, resolve_rubric
from .scoring import FAILURE_MODES, EvidenceError, ExecutionEvidence, derive_proxy_evidence
from .submetrics.base import CATEGORIES, CATEGORY_NAMES

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_ACQUISITION = 3
EXIT_RUBRIC = 4
EXIT_INPUT = 5

RUBRIC_ENV = "REPROCHECK_RUBRIC"

log = logging.getLogger("reprocheck")


class InputError(Exception):
    pass


def _rubric(args) -> RubricProfile:
    return resolve_rubric(args.rubric or os.environ.get(RUBRIC_ENV))


def _write(args, text: str) -> None:
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return canonical_json(obj)


def _fmt(v, nd: int = 1) -> str:
    return "-" if v is None else f"{v:.{nd}f}"


def assessment_table(a: Assessment) -> str:
    sc = a.scorecard
    bd = sc.breakdown
    lines = [
        f"repository: {a.source}  ({a.repo_id} @ {a.commit_id[:12]})",
        f"rubric:     {a.rubric.name} {a.rubric.version}",
        "",
        f"{'cat':<4}{'name':<28}{'raw':>7}{'w':>6}{'contrib':>9}",
    ]
    for c in CATEGORIES:
        cs = sc.categories[c]
        raw = _fmt(cs.raw) + ("" if cs.applicable else "*")
        lines.append(f"{c:<4}{CATEGORY_NAMES[c]:<28}{raw:>7}{a.rubric.weight(c):>6.2f}{bd.contributions[c]:>9.1f}")
    flags = bd.penalty_flags
    lines += [
        "",
        f"hard penalty: {bd.p_hard:.0f}  (E<10: {'yes' if flags['E_below_10'] else 'no'}, "
        f"A<10: {'yes' if flags['A_below_10'] else 'no'})",
        f"seed penalty: {bd.p_seed:.0f}  (seed score: {_fmt(sc.sigma)})",
        f"RRS: {bd.rrs:.1f}",
    ]
    if sc.composite.ros is not None:
        lines.append(f"ROS: {sc.composite.ros:.1f}  alpha: {sc.composite.alpha:.3f}  RCS: {sc.composite.rcs:.1f}")
    if any(not sc.categories[c].applicable for c in CATEGORIES):
        lines.append("* category not applicable")
    return "\n".join(lines) + "\n"


def record_table(record: dict) -> str:
    lines = [f"repository: {record['repo']['source']}  ({record['repo']['repo_id']} @ {record['repo']['commit_id'][:12]})",
             f"rubric:     {record['rubric']['name']} {record['rubric']['version']}"]
    for c in CATEGORIES:
        lines.append(f"  {c} {record['categories'][c]['raw']:6.1f}")
    lines.append(f"RRS: {record['rrs']:.1f}  ROS: {_fmt(record['ros'])}  alpha: {record['alpha']:.3f}  "
                 f"RCS: {record['rcs']:.1f}")
    return "\n".join(lines) + "\n"


def _evidence(path: str | None) -> ExecutionEvidence | None:
    if not path:
        return None
    try:
        return ExecutionEvidence.from_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read evidence file {path}: {exc.strerror or exc}") from exc


def cmd_score(args) -> int:
    rubric = _rubric(args)
    patterns = load_patterns(args.patterns)
    a = assess_source(args.source, rubric, _evidence(args.evidence), patterns, jobs=args.jobs)
    record = emit_provenance(a)
    if args.format == "json":
        _write(args, record)
    else:
        if args.out:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(record, encoding="utf-8")
        sys.stdout.write(assessment_table(a))
    return EXIT_OK


def _record_name(a: Assessment) -> str:
    short = a.commit_id if a.commit_id == UNCOMMITTED else a.commit_id[:7]
    return f"{a.repo_id}-{short}.json"


def cmd_batch(args) -> int:
    rubric = _rubric(args)
    patterns = load_patterns(args.patterns)
    try:
        sources = [ln.strip() for ln in Path(args.list_file).read_text(encoding="utf-8").splitlines()]
    except OSError as exc:
        raise InputError(f"cannot read list file {args.list_file}: {exc.strerror or exc}") from exc
    sources = [s for s in sources if s and not s.startswith("#")]
    out_dir = Path(args.out or "provenance")
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = threading.Lock()

    def run(source: str) -> dict:
        try:
            a = assess_source(source, rubric, patterns=patterns)
        except AcquisitionError as exc:
            log.warning("excluded %s: %s", source, exc)
            return {"source": source, "status": "excluded", "reason": str(exc)}
        except Exception as exc:  # one bad repository never aborts the batch
            log.warning("excluded %s: internal error: %s", source, exc)
            return {"source": source, "status": "excluded", "reason": f"internal error: {exc}"}
        name = _record_name(a)
        text = emit_provenance(a)
        with lock:
            (out_dir / name).write_text(text, encoding="utf-8")
        return {"source": source, "status": "scored", "record": name, "rrs": a.rrs}

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(run, sources))
    else:
        entries = [run(s) for s in sources]
    summary = {
        "total": len(sources),
        "scored": sum(1 for e in entries if e["status"] == "scored"),
        "excluded": sum(1 for e in entries if e["status"] == "excluded"),
        "rubric": {"name": rubric.name, "version": rubric.version},
        "repositories": entries,
    }
    (out_dir / "summary.json").write_text(_json(summary), encoding="utf-8")
    if args.format == "json":
        sys.stdout.write(_json(summary))
    else:
        for e in entries:
            detail = f"RRS {e['rrs']:.1f} -> {e['record']}" if e["status"] == "scored" else e["reason"]
            sys.stdout.write(f"{e['status']:<9}{e['source']}  {detail}\n")
        sys.stdout.write(f"scored {summary['scored']}/{summary['total']}, excluded {summary['excluded']}\n")
    return EXIT_OK


def _load_record(path: str) -> dict:
    try:
        return load_record(path)
    except ProvenanceError as exc:
        raise InputError(str(exc)) from exc


def cmd_compose(args) -> int:
    record = _load_record(args.record)
    evidence = _evidence(args.evidence)
    out = compose_record(record, evidence or ExecutionEvidence())
    _write(args, _json(out) if args.format == "json" else record_table(out))
    return EXIT_OK


def cmd_rubric_validate(args) -> int:
    try:
        profile = load_rubric_file(args.path)
    except RubricError as exc:
        if args.format == "json":
            sys.stdout.write(_json({"valid": False, "path": args.path, "errors": exc.errors}))
        for e in exc.errors:
            print(f"{args.path}: {e}", file=sys.stderr)
        return EXIT_RUBRIC
    if args.format == "json":
        sys.stdout.write(_json({"valid": True, "path": args.path, "profile": profile.to_dict()}))
    else:
        sys.stdout.write(f"{args.path}: valid ({profile.name} {profile.version})\n")
        sys.stdout.write(dump_rubric(profile))
    return EXIT_OK


def cmd_recompute(args) -> int:
    record = _load_record(args.record)
    rubric = _rubric(args)
    a = recompute_from_provenance(record, rubric)
    out = assessment_to_record(a)
    _write(args, _json(out) if args.format == "json" else assessment_table(a))
    return EXIT_OK


def cmd_stats(args) -> int:
    rubric = _rubric(args)
    analyses = [s.strip() for s in args.analyses.split(",") if s.strip()] if args.analyses else list(ANALYSES)
    corpus = load_corpus(args.corpus_dir, args.labels)
    report = run_diagnostics(corpus, rubric, analyses, seed=args.seed, resamples=args.resamples)
    _write(args, _json(report) if args.format == "json" else format_report(report))
    return EXIT_OK


def cmd_proxy(args) -> int:
    try:
        ev = derive_proxy_evidence(args.label, args.k, args.m)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.format == "json":
        _write(args, _json(ev.to_dict()))
    else:
        _write(args, "".join(f"{k:<8}{v:8.2f}\n" for k, v in ev.available.items()))
    return EXIT_OK


def cmd_determinism(args) -> int:
    delta = determinism_between(args.dir_a, args.dir_b)
    if args.format == "json":
        _write(args, _json({"delta": delta}))
    else:
        _write(args, f"delta: {_fmt(delta, 2)}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rubric", metavar="PATH", help=f"rubric YAML or bundled profile name (default: ${RUBRIC_ENV} or built-in)")
    common.add_argument("--out", metavar="PATH", help="output file (batch: output directory)")
    common.add_argument("--format", choices=("json", "table"), default="table")
    common.add_argument("--jobs", type=int, default=1, metavar="N")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--patterns", metavar="DIR", help="directory overriding bundled pattern lists")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="reprocheck", description="Reproducibility readiness scoring for research repositories.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[common], help="score one repository")
    p.add_argument("source", help="local directory or git URL")
    p.add_argument("--evidence", metavar="JSON", help="execution evidence document")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("batch", parents=[common], help="score every repository in a list file")
    p.add_argument("list_file")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("compose", parents=[common], help="add execution evidence to a provenance record")
    p.add_argument("record")
    p.add_argument("evidence")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("rubric-validate", parents=[common], help="validate a rubric YAML file")
    p.add_argument("path")
    p.set_defaults(func=cmd_rubric_validate)

    p = sub.add_parser("recompute", parents=[common], help="rescore a provenance record under a rubric")
    p.add_argument("record")
    p.set_defaults(func=cmd_recompute)

    p = sub.add_parser("stats", parents=[common], help="corpus diagnostics over provenance records")
    p.add_argument("corpus_dir")
    p.add_argument("labels", help="CSV with repo_id, failure_mode, success_nb_count, total_exec_count")
    p.add_argument("--analyses", metavar="LIST", help=f"comma-separated subset of: {','.join(ANALYSES)}")
    p.add_argument("--resamples", type=int, default=10_000, metavar="N")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("proxy", parents=[common], help="proxy execution evidence from a failure-mode label")
    p.add_argument("label", choices=FAILURE_MODES)
    p.add_argument("k", type=int, help="successful notebook count")
    p.add_argument("m", type=int, help="executed notebook count")
    p.set_defaults(func=cmd_proxy)

    p = sub.add_parser("determinism", parents=[common], help="output determinism between two executed notebook trees")
    p.add_argument("dir_a")
    p.add_argument("dir_b")
    p.set_defaults(func=cmd_determinism)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except AcquisitionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ACQUISITION
    except RubricError as exc:
        for e in exc.errors:
            print(f"error: {exc.source}: {e}", file=sys.stderr)
        return EXIT_RUBRIC
    except (InputError, ProvenanceError, EvidenceError, CorpusError, DeterminismError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # defect: report and fail distinctly
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
