import math

import numpy as np
import pytest

from sentinel.errors import ConfigError, DivergenceError, EmptyClassError
from sentinel.learners import (
    DecisionTree,
    GaussianNB,
    LinearSVM,
    LogisticRegression,
    MLP,
    RandomForest,
)
from sentinel.learners import logistic, mlp
from sentinel.learners.svm import platt_fit

from oracles import _gini_side, brute_force_best_split


def blob_data(seed=0, n=60, d=3, gap=2.0):
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack([rng.normal(-gap / 2, 1.0, size=(half, d)),
                   rng.normal(gap / 2, 1.0, size=(n - half, d))])
    y = np.array([0] * half + [1] * (n - half), dtype=np.int8)
    perm = rng.permutation(n)
    return X[perm], y[perm]


class TestGaussianNB:
    def test_symmetric_feature_gives_half(self):
        X = np.array([[-1.0], [-3.0], [1.0], [3.0]])
        y = np.array([0, 0, 1, 1])
        model = GaussianNB().fit(X, y)
        assert model.predict_proba([[0.0]])[0] == pytest.approx(0.5, abs=1e-12)

    def test_hand_computed_posterior(self):
        # class 0 at {0, 2} (mean 1, var 1); class 1 at {2, 4} (mean 3, var 1);
        # equal priors. At x=1.5 the likelihood ratio is e^{-1}.
        X = np.array([[0.0], [2.0], [2.0], [4.0]])
        y = np.array([0, 0, 1, 1])
        model = GaussianNB().fit(X, y)
        expected = 1.0 / (1.0 + math.e)
        assert model.predict_proba([[1.5]])[0] == pytest.approx(expected, abs=1e-9)

    def test_prior_shift_posterior(self):
        # same geometry, class 1 weighted 2x: at x=2 the Gaussians cancel
        # and the posterior is the prior 2/3.
        X = np.array([[0.0], [2.0], [2.0], [4.0]])
        y = np.array([0, 0, 1, 1])
        w = np.array([1.0, 1.0, 2.0, 2.0])
        model = GaussianNB().fit(X, y, sample_weight=w)
        assert model.predict_proba([[2.0]])[0] == pytest.approx(2.0 / 3.0, abs=1e-9)

    def test_variance_floor(self):
        X = np.array([[5.0], [5.0], [8.0], [9.0]])
        y = np.array([0, 0, 1, 1])
        model = GaussianNB().fit(X, y)
        assert model.vars_[0, 0] == 1e-9
        p = model.predict_proba([[5.0], [8.5]])
        assert np.isfinite(p).all()

    def test_single_class_rejected(self):
        X = np.zeros((4, 2))
        with pytest.raises(EmptyClassError):
            GaussianNB().fit(X, np.zeros(4, dtype=int))

    def test_categorical_laplace_arithmetic(self):
        # class 0 sees categories [0,0,1], class 1 sees [1]; add-one
        # smoothing gives P(v=1|0)=2/5, P(v=1|1)=2/3, priors 3/4 and 1/4.
        X = np.array([[0.0], [0.0], [1.0], [1.0]])
        y = np.array([0, 0, 0, 1])
        model = GaussianNB(categorical=(0,)).fit(X, y)
        p = model.predict_proba([[1.0]])[0]
        assert p == pytest.approx(5.0 / 14.0, abs=1e-12)

    def test_categorical_duplication_exact(self):
        X = np.array([[0.0, 1.5], [1.0, -0.5], [2.0, 0.5], [0.0, 2.5]])
        y = np.array([0, 1, 1, 0])
        w = np.array([3.0, 1.0, 2.0, 1.0])
        dup_rows = np.repeat(np.arange(4), [3, 1, 2, 1])
        a = GaussianNB(categorical=(0,)).fit(X, y, sample_weight=w)
        b = GaussianNB(categorical=(0,)).fit(X[dup_rows], y[dup_rows])
        grid = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, -1.0]])
        assert np.array_equal(a.predict_proba(grid), b.predict_proba(grid))

    def test_unseen_category_is_neutral(self):
        X = np.array([[0.0], [1.0], [0.0], [1.0]])
        y = np.array([0, 0, 1, 1])
        model = GaussianNB(categorical=(0,)).fit(X, y)
        p = model.predict_proba([[7.0]])[0]
        assert 0.0 <= p <= 1.0
        assert p == pytest.approx(0.5, abs=1e-12)


class TestLogisticRegression:
    def test_gradient_matches_finite_difference(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(8, 3))
        y = np.array([0, 1, 0, 1, 1, 0, 1, 0], dtype=np.int8)
        w = rng.uniform(0.5, 2.0, size=8)
        w /= w.sum()
        X1 = np.hstack([np.ones((8, 1)), X])
        beta = rng.normal(scale=0.8, size=4)
        _loss, grad = logistic.loss_and_grad(beta, X1, y, w, l2=0.01)
        h = 1e-6
        for i in range(len(beta)):
            e = np.zeros_like(beta)
            e[i] = h
            lp, _ = logistic.loss_and_grad(beta + e, X1, y, w, l2=0.01)
            lm, _ = logistic.loss_and_grad(beta - e, X1, y, w, l2=0.01)
            fd = (lp - lm) / (2 * h)
            assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-9)

    def test_separable_data_perfect_training_accuracy(self):
        X = np.array([[-2.0], [-1.5], [-1.0], [1.0], [1.5], [2.0]])
        y = np.array([0, 0, 0, 1, 1, 1])
        model = LogisticRegression(l2=1e-4).fit(X, y)
        assert (model.predict(X) == y).all()

    def test_zero_epochs_predicts_base_rate(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([1, 1, 1, 0])
        model = LogisticRegression(epochs=0).fit(X, y)
        p = model.predict_proba(X)
        assert np.allclose(p, 0.75, atol=1e-9)

    def test_divergence_names_lr(self):
        X, y = blob_data(seed=1, n=30)
        with np.errstate(all="ignore"):
            with pytest.raises(DivergenceError, match="lr="):
                LogisticRegression(lr=1e9, epochs=3000).fit(X, y)

    def test_weight_scaling_exact(self):
        X, y = blob_data(seed=2, n=40)
        w = np.random.default_rng(4).uniform(0.5, 2.0, size=40)
        a = LogisticRegression(epochs=200).fit(X, y, sample_weight=w)
        b = LogisticRegression(epochs=200).fit(X, y, sample_weight=w * 2.0)
        assert np.array_equal(a.beta_, b.beta_)


class TestDecisionTree:
    def test_pure_dataset_single_leaf(self):
        X = np.array([[0.0], [1.0], [2.0]])
        y = np.array([1, 1, 1])
        model = DecisionTree().fit(X, y)
        assert len(model.nodes_) == 1
        assert model.predict_proba([[5.0]])[0] == 1.0

    def test_xor_learnable_at_depth_two(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([0, 1, 1, 0])
        model = DecisionTree(max_depth=2).fit(X, y)
        assert (model.predict(X) == y).all()

    def test_tie_breaks_lower_feature_then_threshold(self):
        X = np.array([[0.0, 0.0], [1.0, 1.0]])
        y = np.array([0, 1])
        model = DecisionTree().fit(X, y)
        root = model.nodes_[0]
        assert root["feature"] == 0
        assert root["threshold"] == 0.5
        # equal-quality thresholds within one feature: prefer the lower
        X2 = np.array([[0.0], [1.0], [2.0]])
        y2 = np.array([0, 1, 0])
        root2 = DecisionTree().fit(X2, y2).nodes_[0]
        assert root2["threshold"] == 0.5

    def test_matches_exhaustive_split_enumeration(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            X = rng.normal(size=(10, 3))
            y = rng.integers(0, 2, size=10).astype(np.int8)
            if y.min() == y.max():
                y[0] = 1 - y[0]
            w = rng.uniform(0.5, 2.0, size=10)
            oracle = brute_force_best_split(X.tolist(), y.tolist(), w.tolist())
            model = DecisionTree(max_depth=1).fit(X, y, sample_weight=w)
            root = model.nodes_[0]
            assert root["leaf"] is False
            left = X[:, root["feature"]] <= root["threshold"]
            got = (_gini_side(w[left].tolist(), y[left].tolist())
                   + _gini_side(w[~left].tolist(), y[~left].tolist()))
            assert got == pytest.approx(oracle[0], abs=1e-9)

    def test_min_leaf_respected(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0, 0, 1, 1])
        model = DecisionTree(min_leaf=2).fit(X, y)
        for node in model.nodes_:
            if node["leaf"]:
                assert node["n"] >= 2

    def test_duplication_equivalence_exact(self):
        X = np.array([[0.0, 5.0], [1.0, 3.0], [2.0, 4.0], [3.0, 1.0]])
        y = np.array([0, 1, 1, 0])
        w = np.array([2.0, 1.0, 3.0, 1.0])
        dup = np.repeat(np.arange(4), [2, 1, 3, 1])
        a = DecisionTree().fit(X, y, sample_weight=w)
        b = DecisionTree().fit(X[dup], y[dup])
        grid = np.array([[x1, x2] for x1 in np.linspace(-1, 4, 7)
                         for x2 in np.linspace(0, 6, 7)])
        assert np.array_equal(a.predict_proba(grid), b.predict_proba(grid))

    def test_categorical_one_vs_rest(self):
        X = np.array([[0.0], [0.0], [1.0], [2.0]])
        y = np.array([1, 1, 0, 0])
        model = DecisionTree(categorical=(0,)).fit(X, y)
        root = model.nodes_[0]
        assert root["kind"] == "cat"
        assert root["threshold"] == 0.0
        assert model.predict_proba([[0.0]])[0] == 1.0
        assert model.predict_proba([[1.0]])[0] == 0.0
        assert model.predict_proba([[2.0]])[0] == 0.0

    def test_depth_limit(self):
        X, y = blob_data(seed=5, n=50, gap=0.5)
        model = DecisionTree(max_depth=1).fit(X, y)
        assert model.depth_ <= 1


class TestRandomForest:
    def test_single_tree_reduction(self):
        X, y = blob_data(seed=6, n=40, gap=1.0)
        tree = DecisionTree().fit(X, y)
        forest = RandomForest(n_trees=1, mtry=X.shape[1], bootstrap=False,
                              seed=0).fit(X, y)
        assert np.array_equal(tree.predict_proba(X), forest.predict_proba(X))

    def test_same_seed_identical(self):
        X, y = blob_data(seed=7, n=50)
        a = RandomForest(n_trees=12, seed=42).fit(X, y)
        b = RandomForest(n_trees=12, seed=42).fit(X, y)
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))

    def test_mtry_default_is_sqrt(self):
        X, y = blob_data(seed=8, n=30, d=9)
        model = RandomForest(n_trees=2, seed=1).fit(X, y)
        assert model.mtry_ == 3

    def test_mtry_too_large_rejected(self):
        X, y = blob_data(seed=9, n=20, d=3)
        with pytest.raises(ConfigError):
            RandomForest(n_trees=2, mtry=4, seed=0).fit(X, y)

    def test_weight_scaling_exact(self):
        X, y = blob_data(seed=10, n=40)
        w = np.random.default_rng(2).uniform(0.5, 2.0, size=40)
        a = RandomForest(n_trees=8, seed=3).fit(X, y, sample_weight=w)
        b = RandomForest(n_trees=8, seed=3).fit(X, y, sample_weight=w * 2.0)
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))

    def test_learns_blobs(self):
        X, y = blob_data(seed=11, n=80, gap=3.0)
        model = RandomForest(n_trees=25, seed=5).fit(X, y)
        assert (model.predict(X) == y).mean() > 0.95


class TestLinearSVM:
    def test_separable_zero_hinge(self):
        rng = np.random.default_rng(12)
        X = np.vstack([rng.normal(-3, 0.3, size=(15, 2)),
                       rng.normal(3, 0.3, size=(15, 2))])
        y = np.array([0] * 15 + [1] * 15, dtype=np.int8)
        model = LinearSVM(C=10.0, epochs=300, seed=4).fit(X, y)
        margins = (2.0 * y - 1.0) * model.decision_function(X)
        assert (margins >= 1.0 - 1e-6).all()

    def test_zero_decision_value_near_half(self):
        X, y = blob_data(seed=13, n=60, gap=2.0)
        model = LinearSVM(seed=2).fit(X, y)
        # evaluate the Platt sigmoid exactly at decision value 0
        p = 1.0 / (1.0 + math.exp(model.platt_b_))
        assert p == pytest.approx(0.5, abs=0.05)

    def test_label_flip_negates_decisions(self):
        X, y = blob_data(seed=14, n=40)
        a = LinearSVM(epochs=50, seed=6).fit(X, y)
        b = LinearSVM(epochs=50, seed=6).fit(X, 1 - y)
        fa = a.decision_function(X)
        fb = b.decision_function(X)
        assert np.array_equal(fa, -fb)

    def test_weight_scaling_exact(self):
        X, y = blob_data(seed=15, n=30)
        w = np.random.default_rng(7).uniform(0.5, 2.0, size=30)
        a = LinearSVM(epochs=40, seed=8).fit(X, y, sample_weight=w)
        b = LinearSVM(epochs=40, seed=8).fit(X, y, sample_weight=w * 2.0)
        assert np.array_equal(a.v_, b.v_)
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))

    def test_platt_fit_orients_probabilities(self):
        f = np.array([-2.0, -1.5, -1.0, 1.0, 1.5, 2.0])
        y = np.array([0, 0, 0, 1, 1, 1])
        w = np.ones(6)
        A, B = platt_fit(f, y, w)
        assert A < 0
        p_hi = 1.0 / (1.0 + math.exp(A * 2.0 + B))
        p_lo = 1.0 / (1.0 + math.exp(A * -2.0 + B))
        assert p_hi > 0.8
        assert p_lo < 0.2


class TestMLP:
    def test_gradient_matches_finite_difference(self):
        rng = np.random.default_rng(16)
        X = rng.normal(size=(6, 3))
        y = np.array([0, 1, 1, 0, 1, 0], dtype=np.int8)
        w = rng.uniform(0.5, 1.5, size=6)
        w /= w.sum()
        hidden = 3
        n_params = 3 * hidden + 2 * hidden + 1
        theta = rng.uniform(-0.5, 0.5, size=n_params)
        _loss, grad = mlp.loss_and_grad(theta, X, y, w, hidden)
        h = 1e-6
        for i in range(n_params):
            e = np.zeros(n_params)
            e[i] = h
            lp, _ = mlp.loss_and_grad(theta + e, X, y, w, hidden)
            lm, _ = mlp.loss_and_grad(theta - e, X, y, w, hidden)
            fd = (lp - lm) / (2 * h)
            assert grad[i] == pytest.approx(fd, rel=1e-4, abs=1e-10)

    def test_learns_and_function(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([0, 0, 0, 1])
        model = MLP(hidden=4, lr=0.5, epochs=500, seed=1).fit(X, y)
        assert (model.predict(X) == y).all()

    def test_zero_epochs_near_base_rate(self):
        X, y = blob_data(seed=17, n=40)
        model = MLP(epochs=0, seed=3).fit(X, y)
        assert model.predict_proba(X).mean() == pytest.approx(0.5, abs=0.15)

    def test_divergence_names_lr(self):
        # bounded cross-entropy gradients mean a merely-large step size
        # saturates the hidden layer and stalls instead of exploding, so
        # push the first update past float64 range to hit the guard
        X, y = blob_data(seed=18, n=30)
        with np.errstate(all="ignore"):
            with pytest.raises(DivergenceError, match="lr="):
                MLP(lr=1e308, epochs=50, seed=0).fit(X, y)

    def test_weight_scaling_exact(self):
        X, y = blob_data(seed=19, n=30)
        w = np.random.default_rng(9).uniform(0.5, 2.0, size=30)
        a = MLP(epochs=50, seed=5).fit(X, y, sample_weight=w)
        b = MLP(epochs=50, seed=5).fit(X, y, sample_weight=w * 2.0)
        assert np.array_equal(a.theta_, b.theta_)


ALL_LEARNERS = [
    ("gaussian_nb", lambda: GaussianNB()),
    ("logistic", lambda: LogisticRegression(epochs=150)),
    ("tree", lambda: DecisionTree(max_depth=4)),
    ("forest", lambda: RandomForest(n_trees=8, max_depth=4, seed=11)),
    ("svm", lambda: LinearSVM(epochs=30, seed=11)),
    ("mlp", lambda: MLP(hidden=4, epochs=80, seed=11)),
]


@pytest.mark.parametrize("name,make", ALL_LEARNERS, ids=[n for n, _ in ALL_LEARNERS])
class TestSharedContract:
    def test_probabilities_bounded(self, name, make):
        X, y = blob_data(seed=20, n=50)
        model = make().fit(X, y)
        extreme = np.array([[1e6, -1e6, 1e6], [-1e6, 1e6, -1e6], [0.0, 0.0, 0.0]])
        p = model.predict_proba(np.vstack([X, extreme]))
        assert (p >= 0.0).all() and (p <= 1.0).all()

    def test_uniform_weights_match_unweighted(self, name, make):
        X, y = blob_data(seed=21, n=40)
        a = make().fit(X, y)
        b = make().fit(X, y, sample_weight=np.ones(len(y)))
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))

    def test_deterministic_refit(self, name, make):
        X, y = blob_data(seed=22, n=40)
        a = make().fit(X, y)
        b = make().fit(X, y)
        assert np.array_equal(a.predict_proba(X), b.predict_proba(X))

    def test_state_round_trip(self, name, make):
        import json

        X, y = blob_data(seed=23, n=40)
        model = make().fit(X, y)
        state = json.loads(json.dumps(model.get_state()))
        clone = type(model).from_state(state)
        assert np.array_equal(model.predict_proba(X), clone.predict_proba(X))
