import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lra.estimator import AnalogySolver, LatentRelationalAnalysis, NearestPairClassifier, check_pair, check_pairs
from lra.pairs import WordPair


@pytest.fixture(scope="module")
def lra(fixture_data, fixture_index, fixture_thesaurus):
    est = LatentRelationalAnalysis(fixture_index, fixture_thesaurus, k=8, num_patterns=100)
    return est.fit(fixture_data.pairs)


def test_check_pair_forms():
    assert check_pair("quart:volume") == check_pair(("Quart", "Volume")) == WordPair("quart", "volume")
    with pytest.raises(ValueError):
        check_pair(42)
    with pytest.raises(ValueError):
        check_pairs("quart:volume")
    with pytest.raises(ValueError):
        check_pairs([])


def test_get_params_and_clone():
    est = LatentRelationalAnalysis(k=12, num_patterns=50, ablate_svd=True)
    params = est.get_params()
    assert params["k"] == 12 and params["ablate_svd"] and params["num_filter"] == 3
    twin = clone(est)
    assert twin.get_params() == params
    assert twin._config() == est._config()


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        LatentRelationalAnalysis().transform(["quart:volume"])
    with pytest.raises(ValueError):
        LatentRelationalAnalysis().fit(["quart:volume"])


def test_transform_shape_and_absent_rows(lra, fixture_data):
    pairs = [p for p in fixture_data.pairs if p in lra.engine_.space][:3] + [WordPair("zebra", "quasar")]
    out = lra.transform(pairs)
    assert out.shape == (4, lra.n_features_out_)
    assert np.all(np.isfinite(out[:3])) and np.all(np.isnan(out[3]))


def test_similarity_matches_engine(lra, fixture_data):
    a, b = fixture_data.pairs[2], fixture_data.pairs[3]
    assert lra.similarity(a, b) >= lra.cosine(a, b) - 1e-12
    assert np.isnan(lra.similarity("zebra:quasar", "yak:nebula"))
    m = lra.pairwise_similarity(fixture_data.pairs[2:5])
    assert m.shape == (3, 3) and np.allclose(np.diag(m), 1.0)


def test_from_engine_round_trip(lra, fixture_data):
    twin = LatentRelationalAnalysis.from_engine(lra.engine_)
    pairs = fixture_data.pairs[:6]
    assert np.array_equal(twin.transform(pairs), lra.transform(pairs), equal_nan=True)


def test_analogy_solver(lra, fixture_data):
    solver = AnalogySolver(lra).fit(fixture_data.questions)
    pred = solver.predict(fixture_data.questions)
    assert pred.dtype.kind == "i" and len(pred) == len(fixture_data.questions)
    assert solver.score(fixture_data.questions) >= 0.9


def test_nearest_pair_classifier(lra, fixture_data):
    ex = fixture_data.nm_examples
    X, y = [e.pair for e in ex], [e.class30 for e in ex]
    clf = NearestPairClassifier(lra, shortlist=None).fit(X[::2], y[::2])
    assert set(clf.classes_) == set(y)
    assert clf.score(X[1::2], y[1::2]) >= 0.75
    with pytest.raises(ValueError):
        NearestPairClassifier(lra).fit(X, y[:-1])
