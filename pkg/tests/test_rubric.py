import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reprocheck.rubric import (
    DEFAULT_POLICIES, RubricError, bundled_rubric, default_rubric, dump_rubric, load_rubric, load_rubric_file,
    resolve_rubric, validate_rubric,
)
from reprocheck.scoring import compute_rrs
from reprocheck.submetrics.base import default_weights


def _doc(**cats):
    lines = ["name: t", "version: '1'", "categories:"]
    for c, (w, tau, k) in cats.items():
        lines.append(f"  {c}: {{weight: {w}, tau: {tau}, k: {k}}}")
    return "\n".join(lines) + "\n"


def test_default_matches_table():
    r = default_rubric()
    assert r.weights == {"E": 0.30, "A": 0.25, "D": 0.20, "C": 0.15, "S": 0.10}
    assert (r.E.tau, r.E.k) == (40, 1.5)
    assert (r.S.tau, r.S.k) == (30, 1.2)
    assert validate_rubric(r) == []
    assert bundled_rubric("default").weights == r.weights


def test_partial_override_inherits():
    r = load_rubric("name: x\nversion: 2\ncategories:\n  E: {weight: 0.35}\n  S: {weight: 0.05}\n")
    assert r.version == "2"
    assert r.E.weight == 0.35 and r.E.tau == DEFAULT_POLICIES["E"].tau
    assert r.A == DEFAULT_POLICIES["A"]


def test_all_errors_reported():
    bad = _doc(E=(0.5, 0, 0.5), A=(0.25, 30, 1.5), D=(0.2, 20, 1.2), C=(0.15, 25, 1.2), S=(0.1, 30, 1.2))
    with pytest.raises(RubricError) as err:
        load_rubric(bad)
    text = "\n".join(err.value.errors)
    assert "weight sum" in text
    assert "gate exponent below 1" in text
    assert "tau" in text


@pytest.mark.parametrize("document,fragment", [
    ("name: t\nversion: 1\nextra: 3\n", "unknown key"),
    ("version: 1\n", "name"),
    ("name: t\nversion: 1\ncategories:\n  Z: {weight: 1}\n", "unknown category"),
    ("name: t\nversion: 1\nsubmetrics:\n  bogus: 0.5\n", "unknown sub-metric"),
    ("name: t\nversion: 1\nsubmetrics:\n  dep_pinning: 0.9\n", "sub-metric weight sum"),
    ("name: t\nversion: 1\ncategories:\n  E: {weight: high}\n", "must be a number"),
    ("- a\n- b\n", "top level"),
    ("name: [unclosed\n", "malformed YAML"),
])
def test_rejections(document, fragment):
    with pytest.raises(RubricError) as err:
        load_rubric(document)
    assert any(fragment in e for e in err.value.errors), err.value.errors


def test_submetric_override_merges_defaults():
    r = load_rubric("name: t\nversion: 1\nsubmetrics:\n  dep_pinning: 0.20\n  container_spec: 0.35\n")
    merged = r.submetric_weights("E")
    assert merged["dep_pinning"] == 0.20
    assert merged["env_bootstrap"] == default_weights()["env_bootstrap"]


def test_tolerance_edges():
    ok = _doc(E=(0.305, 40, 1.5), A=(0.25, 30, 1.5), D=(0.2, 20, 1.2), C=(0.15, 25, 1.2), S=(0.1, 30, 1.2))
    assert load_rubric(ok).E.weight == 0.305
    with pytest.raises(RubricError):
        load_rubric(ok.replace("0.305", "0.32"))


def test_round_trip_and_file(tmp_path):
    r = bundled_rubric("bioinformatics-v1")
    again = load_rubric(dump_rubric(r))
    assert again == r
    path = tmp_path / "r.yaml"
    path.write_text(dump_rubric(r))
    assert load_rubric_file(path) == r
    assert resolve_rubric(str(path)) == r
    assert resolve_rubric("bioinformatics-v1") == r
    assert resolve_rubric(None) == default_rubric()
    with pytest.raises(RubricError):
        load_rubric_file(tmp_path / "missing.yaml")


def test_with_weights_and_gates():
    r = default_rubric()
    w = r.with_weights({"E": 0.2, "A": 0.2, "D": 0.2, "C": 0.2, "S": 0.2})
    assert w.weights["E"] == 0.2 and w.E.tau == 40
    g = r.with_gates(k=1.0)
    assert all(p.k == 1.0 for p in g.categories.values())


def test_rescoring_changes_only_weights():
    raws = {"E": 80, "A": 5, "D": 50, "C": 70, "S": 40}
    bio = bundled_rubric("bioinformatics-v1")
    default = compute_rrs(raws, default_rubric(), 100)
    other = compute_rrs(raws, bio, 100)
    assert default.p_hard == other.p_hard == 15.0
    assert default.gated == other.gated
    assert other.rrs != default.rrs


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 100), min_size=5, max_size=5).filter(lambda v: sum(v) > 0))
def test_normalised_random_weights_validate(vals):
    total = sum(vals)
    weights = dict(zip("EADCS", (v / total for v in vals)))
    assert validate_rubric(default_rubric().with_weights(weights)) == []
