import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fairaudit.core import AuditDataset, AuditRecord
from fairaudit.errors import KTooLarge, MissingFeatures, MissingPrediction
from fairaudit.individual import KnncConfig, fta_result, knn_consistency

from oracles import brute_fta


def dataset(points, preds, scores=None, groups=None):
    recs = []
    for i, (x, p) in enumerate(zip(points, preds)):
        recs.append(AuditRecord(
            true_outcome=0,
            group=groups[i] if groups else "A",
            predicted_outcome=p,
            score=None if scores is None else scores[i],
            features=tuple(x),
        ))
    return AuditDataset(tuple(recs))


def test_constant_predictions():
    ds = dataset([[0], [3], [7], [1]], [1, 1, 1, 1])
    for k in (1, 2, 3):
        assert knn_consistency(ds, KnncConfig(k=k)) == 1.0


def test_line_example_with_tie_break():
    ds = dataset([[0], [1], [2]], [1, 0, 1])
    assert knn_consistency(ds, KnncConfig(k=1)) == 0.0


def test_tie_break_prefers_lower_index():
    # middle point is equidistant from both ends; only index 0 must be chosen
    ds = dataset([[0], [1], [2]], [1, 0, 0])
    # x0 -> x1 (dev 1), x1 -> x0 (dev 1), x2 -> x1 (dev 0)
    assert knn_consistency(ds, KnncConfig(k=1)) == pytest.approx(1 - 2 / 3)


def test_score_source_default():
    ds = dataset([[0], [1], [2]], [1, 1, 1], scores=[0.2, 0.4, 0.6])
    # scores are used when present: deviations 0.2, 0.2, 0.2
    assert knn_consistency(ds, KnncConfig(k=1)) == pytest.approx(0.8)
    assert knn_consistency(ds, KnncConfig(k=1, prediction_source="predicted_outcome")) == 1.0


def test_errors():
    ds = dataset([[0], [1]], [1, 0])
    with pytest.raises(KTooLarge):
        knn_consistency(ds, KnncConfig(k=2))
    no_feats = AuditDataset((AuditRecord(true_outcome=0, group="A", predicted_outcome=1),) * 3)
    with pytest.raises(MissingFeatures):
        knn_consistency(no_feats, KnncConfig(k=1))
    with pytest.raises(MissingPrediction):
        knn_consistency(dataset([[0], [1], [2]], [1, 0, 1]), KnncConfig(k=1, prediction_source="score"))
    with pytest.raises(ValueError):
        KnncConfig(k=0)


def test_constant_feature_normalised_to_zero():
    ds = dataset([[5, 0], [5, 1], [5, 2]], [1, 0, 1])
    assert knn_consistency(ds, KnncConfig(k=1)) == 0.0


@settings(max_examples=60)
@given(st.integers(2, 25), st.integers(1, 4), st.integers(0, 2**31 - 1), st.booleans())
def test_matches_all_pairs_oracle(n, dim, seed, normalise):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(n, dim)) * rng.uniform(0.1, 100, size=dim)
    preds = rng.random(n)
    k = int(rng.integers(1, n))
    ds = dataset(pts.tolist(), [1] * n, scores=preds.tolist())
    norm = "per_feature_min_max" if normalise else "none"
    got = knn_consistency(ds, KnncConfig(k=k, normalization=norm))
    assert got == pytest.approx(brute_fta(pts.tolist(), preds.tolist(), k, normalise), abs=1e-12)
    assert 0 <= got <= 1


@settings(max_examples=30)
@given(st.integers(3, 20), st.integers(0, 2**31 - 1))
def test_permutation_invariance(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    preds = rng.integers(0, 2, n)
    k = int(rng.integers(1, n))
    perm = rng.permutation(n)
    a = knn_consistency(dataset(pts.tolist(), preds.tolist()), KnncConfig(k=k))
    b = knn_consistency(dataset(pts[perm].tolist(), preds[perm].tolist()), KnncConfig(k=k))
    assert a == pytest.approx(b, abs=1e-12)


@settings(max_examples=30)
@given(st.integers(3, 20), st.integers(0, 2**31 - 1))
def test_translation_invariance_without_normalisation(n, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 3))
    shift = rng.uniform(-5, 5, 3)
    preds = rng.integers(0, 2, n).tolist()
    cfg = KnncConfig(k=int(rng.integers(1, n)), normalization="none")
    a = knn_consistency(dataset(pts.tolist(), preds), cfg)
    b = knn_consistency(dataset((pts + shift).tolist(), preds), cfg)
    assert a == pytest.approx(b, abs=1e-12)


def test_fta_result_per_group():
    ds = dataset([[0], [1], [10], [11]], [1, 1, 0, 1], groups=["A", "A", "B", "B"])
    r = fta_result(ds, KnncConfig(k=1), tolerance=0.05)
    assert r.overall == pytest.approx(0.5)
    assert r.per_group == {"A": 1.0, "B": 0.0}
    assert not r.satisfied
