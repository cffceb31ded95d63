import numpy as np
import pytest

from sentinel.ensemble import (
    MemberSpec,
    MetaLearner,
    build_meta,
    normalize_weights,
    predict_proba_meta,
)
from sentinel.errors import ConfigError, EnsembleBuildError
from sentinel.learners import DecisionTree, GaussianNB, LogisticRegression


class ConstantProb:
    """Member double emitting a fixed probability for every instance."""

    def __init__(self, p):
        self.p = p

    def fit(self, X, y, sample_weight=None):
        return self

    def predict_proba(self, X):
        return np.full(len(X), self.p)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {"kind": "constant"}


class FeatureEcho:
    """Member double that scores instances by their first column."""

    def __init__(self):
        self.seen = None

    def fit(self, X, y, sample_weight=None):
        self.seen = np.asarray(X)
        return self

    def predict_proba(self, X):
        return np.asarray(X, dtype=np.float64)[:, 0]

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {"kind": "echo"}


class ExplodingMember:
    def fit(self, X, y, sample_weight=None):
        raise RuntimeError("boom")

    def predict_proba(self, X):
        return np.zeros(len(X))

    def predict(self, X):
        return np.zeros(len(X), dtype=np.int8)

    def describe(self):
        return {"kind": "exploding"}


def oracle_data(n=40):
    """Balanced labels with a column that equals the label."""
    rng = np.random.default_rng(3)
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    X = np.column_stack([y.astype(np.float64), rng.normal(size=n)])
    return X, y


def blob_data(seed=7, n=40):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(-2, 1, size=(n // 2, 3)),
                   rng.normal(2, 1, size=(n // 2, 3))])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    return X, y


class TestNormalize:
    def test_pair_example(self):
        w = normalize_weights([0.90, 0.60])
        assert w == pytest.approx([0.6, 0.4], abs=1e-12)

    def test_all_zero_falls_back_to_uniform(self):
        assert normalize_weights([0.0, 0.0]) == pytest.approx([0.5, 0.5])

    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            normalize_weights([0.5, -0.1])


class TestConstruction:
    def test_too_few_members(self):
        with pytest.raises(ConfigError, match="at least 2"):
            MetaLearner([MemberSpec("a", lambda s: GaussianNB())])

    def test_unknown_weight_mode(self):
        specs = [MemberSpec("a", lambda s: GaussianNB()),
                 MemberSpec("b", lambda s: GaussianNB())]
        with pytest.raises(ConfigError, match="weight_mode"):
            MetaLearner(specs, weight_mode="majority")

    def test_duplicate_names(self):
        specs = [MemberSpec("a", lambda s: GaussianNB()),
                 MemberSpec("a", lambda s: GaussianNB())]
        with pytest.raises(ConfigError, match="unique"):
            MetaLearner(specs)

    def test_uniform_weights(self):
        X, y = blob_data()
        specs = [MemberSpec(f"m{i}", lambda s: ConstantProb(0.5))
                 for i in range(5)]
        meta = MetaLearner(specs, weight_mode="uniform").fit(X, y)
        assert meta.weights_ == pytest.approx([0.2] * 5, abs=1e-15)


class TestAccuracyWeighting:
    def test_oracle_vs_coin_weights(self):
        # the oracle member is right on every held-out fold; the constant
        # member is right on exactly the positive half, so the normalized
        # weights land on 2/3 and 1/3
        X, y = oracle_data()
        specs = [MemberSpec("oracle", lambda s: FeatureEcho()),
                 MemberSpec("coin", lambda s: ConstantProb(1.0))]
        meta = MetaLearner(specs, weight_mode="accuracy", cv_folds=5,
                           seed=11).fit(X, y)
        assert meta.member_accuracies_ == [1.0, 0.5]
        assert meta.weights_ == pytest.approx([2 / 3, 1 / 3], abs=1e-12)

    def test_member_failure_is_named(self):
        X, y = oracle_data()
        specs = [MemberSpec("oracle", lambda s: FeatureEcho()),
                 MemberSpec("grenade", lambda s: ExplodingMember())]
        with pytest.raises(EnsembleBuildError, match="grenade"):
            MetaLearner(specs, weight_mode="accuracy").fit(X, y)

    def test_final_fit_failure_is_named(self):
        X, y = oracle_data()
        specs = [MemberSpec("oracle", lambda s: FeatureEcho()),
                 MemberSpec("grenade", lambda s: ExplodingMember())]
        with pytest.raises(EnsembleBuildError, match="grenade"):
            MetaLearner(specs, weight_mode="uniform").fit(X, y)

    def test_same_seed_reproduces(self):
        X, y = blob_data()
        specs = [MemberSpec("nb", lambda s: GaussianNB()),
                 MemberSpec("lr", lambda s: LogisticRegression(epochs=200))]
        a = MetaLearner(specs, cv_folds=4, seed=5).fit(X, y)
        b = MetaLearner(specs, cv_folds=4, seed=5).fit(X, y)
        assert np.array_equal(a.weights_, b.weights_)
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))


class TestVote:
    def fitted_pair(self, pa, pb, weights):
        specs = [MemberSpec("a", lambda s: ConstantProb(pa)),
                 MemberSpec("b", lambda s: ConstantProb(pb))]
        X, y = blob_data()
        meta = MetaLearner(specs, weight_mode="uniform").fit(X, y)
        meta.weights_ = np.asarray(weights, dtype=np.float64)
        return meta

    def test_equal_weight_mean(self):
        meta = self.fitted_pair(0.8, 0.6, [0.5, 0.5])
        assert meta.predict_proba(np.zeros((3, 3)))[0] == pytest.approx(0.7)

    def test_lopsided_weights(self):
        meta = self.fitted_pair(1.0, 0.0, [0.75, 0.25])
        assert meta.predict_proba(np.zeros((1, 3)))[0] == pytest.approx(0.75)

    def test_agreement_is_fixed_point(self):
        meta = self.fitted_pair(0.37, 0.37, [0.5, 0.5])
        assert meta.predict_proba(np.zeros((2, 3)))[0] == 0.37

    def test_zero_weight_member_is_inert(self):
        base = self.fitted_pair(0.8, 0.3, [0.6, 0.4])
        padded = self.fitted_pair(0.8, 0.3, [0.6, 0.4])
        padded.members_ = padded.members_ + [ConstantProb(0.99)]
        padded.weights_ = np.array([0.6, 0.4, 0.0])
        padded.views_ = padded.views_ + ["numeric"]
        X = np.zeros((4, 3))
        assert np.array_equal(base.predict_proba(X), padded.predict_proba(X))

    def test_member_order_is_irrelevant(self):
        X, y = blob_data()
        specs = [MemberSpec("nb", lambda s: GaussianNB()),
                 MemberSpec("lr", lambda s: LogisticRegression(epochs=200)),
                 MemberSpec("dt", lambda s: DecisionTree(max_depth=3))]
        meta = MetaLearner(specs, cv_folds=4, seed=2).fit(X, y)
        before = meta.predict_proba(X)
        meta.members_ = meta.members_[::-1]
        meta.weights_ = meta.weights_[::-1]
        meta.views_ = meta.views_[::-1]
        assert np.array_equal(before, meta.predict_proba(X))

    def test_convex_combination(self):
        X, y = blob_data(seed=17)
        specs = [MemberSpec("nb", lambda s: GaussianNB()),
                 MemberSpec("lr", lambda s: LogisticRegression(epochs=300)),
                 MemberSpec("dt", lambda s: DecisionTree(max_depth=3))]
        meta = MetaLearner(specs, cv_folds=4, seed=3).fit(X, y)
        probe = np.random.default_rng(8).normal(size=(50, 3))
        member_p = np.stack([m.predict_proba(probe) for m in meta.members_])
        combined = meta.predict_proba(probe)
        assert (combined >= member_p.min(axis=0) - 1e-12).all()
        assert (combined <= member_p.max(axis=0) + 1e-12).all()

    def test_view_dispatch(self):
        X, y = oracle_data()
        views = {"numeric": X, "tree": X * 10.0}
        echo_num = FeatureEcho()
        echo_tree = FeatureEcho()
        specs = [MemberSpec("a", lambda s: echo_num, view="numeric"),
                 MemberSpec("b", lambda s: echo_tree, view="tree")]
        MetaLearner(specs, weight_mode="uniform").fit(views, y)
        assert np.array_equal(echo_num.seen, X)
        assert np.array_equal(echo_tree.seen, X * 10.0)

    def test_build_meta_and_passthrough(self):
        X, y = blob_data(seed=29)
        specs = [MemberSpec("nb", lambda s: GaussianNB()),
                 MemberSpec("lr", lambda s: LogisticRegression(epochs=200))]
        meta = build_meta(specs, X, y, weight_mode="uniform")
        assert np.array_equal(predict_proba_meta(meta, X),
                              meta.predict_proba(X))
        assert meta.describe()["kind"] == "probability_vote"
        assert sum(meta.describe()["weights"]) == pytest.approx(1.0, abs=1e-12)
