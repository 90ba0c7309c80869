import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from reprocheck import corpus as cm
from reprocheck.assess import Assessment
from reprocheck.provenance import emit_provenance
from reprocheck.rubric import default_rubric
from reprocheck.scoring import compute_rrs, score_results
from reprocheck.submetrics.base import REGISTRY, SubMetricResult

MODES = list(cm.FAILURE_MODES)


def _record(repo_id, scores):
    rubric = default_rubric()
    results = tuple(SubMetricResult(s.id, s.category, s.metric_type, scores.get(s.id, 0.0)) for s in REGISTRY)
    a = Assessment(source=repo_id, repo_id=repo_id, commit_id="0" * 40, rubric=rubric, results=results,
                   scorecard=score_results(results, rubric))
    return json.loads(emit_provenance(a))


def _corpus(n=40, seed=0, signal="E"):
    """Successes score high on ``signal`` only; every other category is noise."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        mode = MODES[i % len(MODES)]
        scores = {}
        for s in REGISTRY:
            if s.category == signal:
                base = 80.0 if mode == "success" else 20.0
                v = base + rng.uniform(-15, 15)
            else:
                v = rng.uniform(0, 100)
            if s.metric_type == "binary":
                v = 100.0 if v >= 50 else 0.0
            elif s.metric_type == "tiered":
                v = min(s.tiers, key=lambda t: abs(t - v))
            scores[s.id] = float(v)
        out.append(cm.make_record(_record(f"r{i}", scores), mode, i % 4, 4))
    return out


@pytest.fixture(scope="module")
def corpus():
    return _corpus()


def test_priority_pairwise():
    for i, a in enumerate(cm.PRIORITY):
        for b in cm.PRIORITY[i:]:
            assert cm.aggregate_failure_mode([b, a]) == a


@settings(max_examples=200)
@given(st.lists(st.sampled_from(MODES), min_size=1, max_size=12), st.randoms())
def test_aggregation_order_insensitive(labels, rnd):
    shuffled = list(labels)
    rnd.shuffle(shuffled)
    got = cm.aggregate_failure_mode(labels)
    assert got == cm.aggregate_failure_mode(shuffled)
    assert got == min(labels, key=cm.PRIORITY.index)


def test_aggregation_rejects_unknown():
    with pytest.raises(cm.CorpusError):
        cm.aggregate_failure_mode(["success", "timeout"])
    with pytest.raises(cm.CorpusError):
        cm.aggregate_failure_mode([])


def test_perturbation_factors():
    f = cm.perturbation_factors(0.5, 20)
    assert len(f) == 21
    assert f[0] == 0.5 and f[-1] == 1.5 and f[10] == 1.0


def test_perturbation_against_oracle(corpus):
    rubric = default_rubric()
    res = cm.weight_perturbation(corpus, rubric, span=0.5, steps=4)
    base = [compute_rrs(r.raws(rubric), rubric, r.sigma).rrs for r in corpus]
    for c in "EADCS":
        w0 = rubric.weight(c)
        taus = []
        for entry, f in zip(res[c]["sweep"], cm.perturbation_factors(0.5, 4)):
            new = w0 * f
            weights = {k: (new if k == c else v * (1 - new) / (1 - w0)) for k, v in rubric.weights.items()}
            assert entry["weight"] == pytest.approx(new)
            variant = rubric.with_weights(weights)
            scores = [compute_rrs(r.raws(rubric), variant, r.sigma).rrs for r in corpus]
            tau = oracles.kendall_pairs(base, scores)
            assert entry["tau"] == pytest.approx(tau, abs=1e-12)
            taus.append(tau)
        assert res[c]["min_tau"] == pytest.approx(min(taus), abs=1e-12)


def test_loco_against_oracle(corpus):
    rubric = default_rubric()
    res = cm.loco_analysis(corpus, rubric)
    y = [r.failure_mode == "success" for r in corpus]
    for c in "EADCS":
        rest = 1 - rubric.weight(c)
        weights = {k: (0.0 if k == c else v / rest) for k, v in rubric.weights.items()}
        variant = rubric.with_weights(weights)
        auc = oracles.auc_pairs([compute_rrs(r.raws(rubric), variant, r.sigma).rrs for r in corpus], y)
        assert res["removed"][c]["auc"] == pytest.approx(auc, abs=1e-12)
    # removing the only informative category must hurt the most
    assert min(res["removed"], key=lambda c: res["removed"][c]["delta"]) == "E"


@pytest.mark.parametrize("signal", ["E", "D", "S"])
def test_grid_concentrates_on_signal(signal):
    res = cm.grid_search_weights(_corpus(signal=signal, seed=2), default_rubric())
    assert res["n_configs"] == 126
    assert res["best_weights"][signal] == max(res["best_weights"].values())
    assert res["best_auc"] >= res["baseline_auc"] - 1e-12
    assert res["baseline_in_grid"] is False


def test_simplex_grid_rejects_bad_step():
    with pytest.raises(cm.CorpusError):
        cm.simplex_grid(step=0.3)
    with pytest.raises(cm.CorpusError):
        cm.simplex_grid(floor=0.3)


def test_run_diagnostics_and_report(corpus):
    report = cm.run_diagnostics(corpus, default_rubric(), resamples=1000, steps=4)
    assert set(cm.ANALYSES) <= set(report)
    assert report["mode_counts"] == {m: 8 for m in MODES}
    assert report["categories"]["E"]["r_pb"] > 0.5
    text = cm.format_report(report)
    assert "records: 40" in text
    with pytest.raises(cm.CorpusError):
        cm.run_diagnostics(corpus, default_rubric(), analyses=["nope"])
    single = [r for r in corpus if r.failure_mode != "success"]
    with pytest.raises(cm.CorpusError):
        cm.run_diagnostics(single, default_rubric(), analyses=["auc"], resamples=1000)


def test_submetric_associations_bh(corpus):
    res = cm.submetric_associations(corpus)
    assert res["m"] == len(res["rows"]) == 26
    q = oracles.bh_ref([r["p"] for r in res["rows"]])
    assert [r["q"] for r in res["rows"]] == pytest.approx(q, abs=1e-12)
    assert "dep_pinning" in {r["id"] for r in res["rows"] if r["significant"]}


def test_ros_by_mode(corpus):
    res = cm.ros_by_mode(corpus, default_rubric())
    assert res["success"]["I"] == 100.0 and res["success"]["X"] == 100.0
    assert res["install_dep"]["I"] == 0.0
    assert res["missing_module"]["E_prime"] == 0.0


def test_load_corpus(tmp_path, corpus):
    for rec in corpus[:5]:
        (tmp_path / f"{rec.repo_id}.json").write_text(json.dumps(rec.record))
    (tmp_path / "junk.json").write_text("{")
    labels = tmp_path / "labels.csv"
    labels.write_text("repo_id,failure_mode,success_nb_count,total_exec_count\n"
                      + "".join(f"{r.repo_id},{r.failure_mode},1,2\n" for r in corpus[:4]))
    loaded = cm.load_corpus(tmp_path, labels)
    assert [r.repo_id for r in loaded] == sorted(r.repo_id for r in corpus[:4])


@pytest.mark.parametrize("content", [
    "repo_id,failure_mode\nx,success\n",
    "repo_id,failure_mode,success_nb_count,total_exec_count\nx,boom,1,1\n",
    "repo_id,failure_mode,success_nb_count,total_exec_count\nx,success,a,1\n",
])
def test_load_labels_errors(tmp_path, content):
    p = tmp_path / "l.csv"
    p.write_text(content)
    with pytest.raises(cm.CorpusError):
        cm.load_labels(p)
