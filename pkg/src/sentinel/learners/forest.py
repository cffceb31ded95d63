"""Random forest of CART trees on weighted bootstrap resamples.

Each tree draws its own bootstrap sample with probabilities proportional
to the instance weights and considers mtry random features per split.
Per-tree generators derive from (seed, tree index), so tree t is the same
whether trees are built serially or in parallel.
"""

import math

import numpy as np

from ..errors import ConfigError
from ..seeding import derive_rng
from ._common import check_training_data
from .tree import grow_tree, tree_predict


class RandomForest:

    def __init__(self, n_trees=100, max_depth=None, min_leaf=1, mtry=None,
                 bootstrap=True, seed=0, categorical=()):
        if n_trees < 1:
            raise ConfigError("n_trees must be at least 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.mtry = mtry
        self.bootstrap = bootstrap
        self.seed = seed
        self.categorical = tuple(sorted(categorical))
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        n, d = X.shape
        mtry = self.mtry if self.mtry is not None else math.ceil(math.sqrt(d))
        if mtry > d:
            raise ConfigError(f"mtry={mtry} exceeds the {d} available features")
        p = w / w.sum()
        ones = np.ones(n)
        self.trees_ = []
        for t in range(self.n_trees):
            rng = derive_rng(self.seed, "tree", t)
            if self.bootstrap:
                idx = rng.choice(n, size=n, replace=True, p=p)
                Xt, yt, wt = X[idx], y[idx], ones
            else:
                Xt, yt, wt = X, y, w
            self.trees_.append(grow_tree(
                Xt, yt, wt, max_depth=self.max_depth, min_leaf=self.min_leaf,
                categorical=self.categorical, mtry=mtry, rng=rng))
        self.mtry_ = mtry
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        total = np.zeros(len(X))
        for nodes in self.trees_:
            total += tree_predict(nodes, X)
        return total / len(self.trees_)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "random_forest",
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "mtry": getattr(self, "mtry_", self.mtry),
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }

    def get_state(self):
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "mtry": self.mtry,
            "mtry_fitted": self.mtry_,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "categorical": list(self.categorical),
            "trees": self.trees_,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(n_trees=state["n_trees"], max_depth=state["max_depth"],
                    min_leaf=state["min_leaf"], mtry=state["mtry"],
                    bootstrap=state["bootstrap"], seed=state["seed"],
                    categorical=state["categorical"])
        model.trees_ = state["trees"]
        model.mtry_ = state["mtry_fitted"]
        model.fitted_ = True
        return model
