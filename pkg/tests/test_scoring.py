import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import builders
import oracles
from reprocheck.determinism import DeterminismError, output_determinism, text_matches
from reprocheck.repo.notebook import parse_notebook_text
from reprocheck.rubric import default_rubric
from reprocheck.scoring import (
    EvidenceError, ExecutionEvidence, aggregate_category, compose, compute_alpha, compute_rcs, compute_ros,
    compute_rrs, derive_proxy_evidence, gate, hard_penalty, score_results, seed_penalty,
)
from reprocheck.submetrics.base import REGISTRY, SubMetricResult


@pytest.mark.parametrize("x,tau,k,expected", [
    (50, 40, 1.5, 0.50), (40, 40, 1.5, 0.40), (0, 40, 1.5, 0.0), (100, 30, 1.2, 1.0),
    (20, 40, 1.5, 0.5 ** 1.5 * 0.40),
])
def test_gate_examples(x, tau, k, expected):
    assert gate(x, tau, k) == pytest.approx(expected, abs=1e-15)


def test_gate_against_reference_on_random_triples():
    rng = np.random.default_rng(7)
    for x, tau, k in zip(rng.uniform(0, 100, 20_000), rng.uniform(0.1, 100, 20_000), rng.uniform(1, 4, 20_000)):
        assert gate(x, tau, k) == pytest.approx(oracles.gate_ref(x, tau, k), rel=1e-12, abs=1e-15)


@settings(max_examples=2000, deadline=None)
@given(st.floats(0, 100), st.floats(0.01, 100), st.floats(1, 5))
def test_gate_below_linear(x, tau, k):
    assert 0.0 <= gate(x, tau, k) <= x / 100 + 1e-15


@pytest.mark.parametrize("x,tau,k", [(-1, 40, 1.5), (101, 40, 1.5), (10, 0, 1.5), (10, 101, 1.5), (10, 40, 0.9)])
def test_gate_domain(x, tau, k):
    with pytest.raises(ValueError):
        gate(x, tau, k)


def _r(metric_id, score):
    spec = next(s for s in REGISTRY if s.id == metric_id)
    return SubMetricResult(spec.id, spec.category, spec.metric_type, score)


def test_aggregate_renormalises_over_applicable():
    results = [_r("seed_management", None), _r("notebook_exec_order", 50.0), _r("test_file_presence", 100.0)]
    weights = {"seed_management": 0.3, "notebook_exec_order": 0.2, "test_file_presence": 0.1}
    cs = aggregate_category(results, weights)
    assert cs.applicable
    assert cs.raw == pytest.approx((0.2 * 50 + 0.1 * 100) / 0.3)


def test_aggregate_all_na():
    cs = aggregate_category([_r("seed_management", None)], {"seed_management": 1.0})
    assert (cs.raw, cs.applicable) == (0.0, False)


@pytest.mark.parametrize("e,a,expected", [(10, 10, 0), (9.99, 10, 20), (10, 9.99, 15), (0, 0, 35), (50, 50, 0)])
def test_hard_penalty(e, a, expected):
    assert hard_penalty(e, a) == expected


@pytest.mark.parametrize("sigma,expected", [(None, 0), (50, 0), (49.99, 10), (0, 10), (100, 0)])
def test_seed_penalty(sigma, expected):
    assert seed_penalty(sigma) == expected


def test_rrs_linear_coefficients():
    rubric = default_rubric()
    base = {"E": 60, "A": 60, "D": 60, "C": 60, "S": 60}
    r0 = compute_rrs(base, rubric, 100).rrs
    for c in base:
        bumped = dict(base, **{c: 61})
        assert compute_rrs(bumped, rubric, 100).rrs - r0 == pytest.approx(rubric.weight(c), abs=1e-9)


def test_rrs_floor_and_flags():
    b = compute_rrs({"E": 0, "A": 0, "D": 0, "C": 0, "S": 0}, default_rubric(), 0)
    assert b.rrs == 0.0
    assert b.unclamped == -45.0
    assert b.penalty_flags == {"E_below_10": True, "A_below_10": True, "seed_below_50": True}


def test_score_results_sigma_from_seed_metric():
    results = [_r(s.id, 100.0) for s in REGISTRY]
    results = [r if r.id != "seed_management" else _r("seed_management", 40.0) for r in results]
    card = score_results(results, default_rubric())
    assert card.sigma == 40.0
    assert card.breakdown.p_seed == 10.0


def test_evidence_validation():
    with pytest.raises(EvidenceError):
        ExecutionEvidence(I=101)
    with pytest.raises(EvidenceError):
        ExecutionEvidence(X="yes")
    with pytest.raises(EvidenceError):
        ExecutionEvidence.from_dict({"components": {"Q": 1}})
    ev = ExecutionEvidence.from_json(json.dumps({"components": {"I": 100, "T": 50}}))
    assert ev.available == {"I": 100.0, "T": 50.0}
    assert ExecutionEvidence.from_dict(ev.to_dict()) == ev
    assert ExecutionEvidence.from_json("").available == {}


def test_ros_is_weighted_mean_of_available():
    ev = ExecutionEvidence(I=100, X=0, N=50)
    assert compute_ros(ev) == pytest.approx((0.30 * 100 + 0.25 * 0 + 0.10 * 50) / 0.65)
    assert compute_ros(ExecutionEvidence()) is None


def test_rcs_without_evidence_is_rrs():
    c = compose(42.0, None)
    assert (c.ros, c.alpha, c.rcs) == (None, 0.0, 42.0)
    assert compute_rcs(42.0, None, 0.0) == 42.0


@settings(max_examples=500, deadline=None)
@given(st.floats(0, 100), st.dictionaries(st.sampled_from(["I", "X", "delta", "N", "E_prime", "T"]),
                                          st.floats(0, 100)))
def test_rcs_between_rrs_and_ros(rrs, comps):
    ev = ExecutionEvidence(**comps)
    c = compose(rrs, ev)
    if c.ros is None:
        assert c.rcs == rrs
    else:
        assert 0.1 <= c.alpha <= 0.7
        assert min(rrs, c.ros) - 1e-9 <= c.rcs <= max(rrs, c.ros) + 1e-9


@pytest.mark.parametrize("mode,I,X,E", [
    ("success", 100, 100, 100), ("install_dep", 0, 0, 100), ("missing_module", 100, 0, 0),
    ("missing_data", 100, 0, 100), ("code_error", 100, 0, 100),
])
def test_proxy_evidence(mode, I, X, E):
    ev = derive_proxy_evidence(mode, 3, 4)
    assert (ev.I, ev.X, ev.E_prime, ev.N) == (I, X, E, 75.0)
    assert ev.delta is None and ev.T is None
    assert compute_alpha(ev) == 0.525


def test_proxy_without_executions_omits_n():
    ev = derive_proxy_evidence("code_error", 0, 0)
    assert ev.N is None
    assert compute_alpha(ev) == pytest.approx(0.65 * 0.7)


def test_proxy_rejects_bad_input():
    with pytest.raises(ValueError):
        derive_proxy_evidence("crashed", 1, 1)
    with pytest.raises(ValueError):
        derive_proxy_evidence("success", 3, 2)


def _nb(outputs):
    return parse_notebook_text(builders.notebook([("code", "x", 1, outputs)]))


def test_determinism_numeric_tolerance():
    assert text_matches("loss 0.1000000", "loss 0.1000004")
    assert not text_matches("loss 0.10", "loss 0.11")
    assert not text_matches("loss 0.1", "gain 0.1")


def test_output_determinism_fraction():
    a = {"n.ipynb": parse_notebook_text(builders.notebook([
        ("code", "a", 1, [builders.stream("1.0\n")]), ("code", "b", 2, [builders.stream("x\n")])]))}
    b = {"n.ipynb": parse_notebook_text(builders.notebook([
        ("code", "a", 1, [builders.stream("1.0000001\n")]), ("code", "b", 2, [builders.stream("y\n")])]))}
    assert output_determinism(a, b) == 50.0
    assert output_determinism(a, a) == 100.0
    with pytest.raises(DeterminismError):
        output_determinism(a, {"other.ipynb": _nb([])})
