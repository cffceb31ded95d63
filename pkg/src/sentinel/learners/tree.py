"""CART-style binary decision tree with weighted Gini impurity.

Numeric features split at midpoints between consecutive distinct sorted
values; categorical features split one-vs-rest on a single category.
Ties are broken toward the lower feature index, then the lower threshold
(or category). Impure nodes split on the best candidate even when the
Gini gain is zero, so parity functions are learnable at their natural
depth; min_leaf counts raw instances, not weight.

The grower is shared with the random forest, which passes a feature
subsample size (mtry) and a generator for drawing it per node.
"""

import numpy as np

from ._common import check_training_data


def _purity_term(w_side, pos_side):
    """W·(1 − gini) for one child, as (P² + (W−P)²)/W; empty side scores 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (pos_side ** 2 + (w_side - pos_side) ** 2) / w_side
    return np.where(w_side > 0, val, 0.0)


def _best_split(X, y, w, idx, features, min_leaf, categorical):
    """Best (score, feature, kind, threshold) over the given features."""
    ysub = y[idx].astype(np.float64)
    wsub = w[idx]
    n = len(idx)
    best = None
    for j in features:
        x = X[idx, j]
        if j in categorical:
            values = np.unique(x)
            if len(values) < 2:
                continue
            code = np.searchsorted(values, x)
            w_val = np.bincount(code, weights=wsub, minlength=len(values))
            p_val = np.bincount(code, weights=wsub * ysub, minlength=len(values))
            n_val = np.bincount(code, minlength=len(values))
            w_tot = w_val.sum()
            p_tot = p_val.sum()
            valid = (n_val >= min_leaf) & (n - n_val >= min_leaf)
            if not valid.any():
                continue
            score = (_purity_term(w_val, p_val)
                     + _purity_term(w_tot - w_val, p_tot - p_val))
            score = np.where(valid, score, -np.inf)
            vi = int(score.argmax())
            cand = (float(score[vi]), j, "cat", float(values[vi]))
        else:
            order = np.argsort(x, kind="stable")
            xs = x[order]
            if xs[0] == xs[-1]:
                continue
            ws = wsub[order]
            ps = ws * ysub[order]
            cw = np.cumsum(ws)
            cp = np.cumsum(ps)
            w_tot = cw[-1]
            p_tot = cp[-1]
            n_left = np.arange(1, n)
            valid = (xs[:-1] != xs[1:]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
            if not valid.any():
                continue
            w_left = cw[:-1]
            p_left = cp[:-1]
            score = (_purity_term(w_left, p_left)
                     + _purity_term(w_tot - w_left, p_tot - p_left))
            score = np.where(valid, score, -np.inf)
            i = int(score.argmax())
            threshold = (xs[i] + xs[i + 1]) / 2.0
            cand = (float(score[i]), j, "num", float(threshold))
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def grow_tree(X, y, w, max_depth=None, min_leaf=1, categorical=(),
              mtry=None, rng=None):
    """Grow a tree as a flat list of nodes with integer child links."""
    n, d = X.shape
    cat = frozenset(categorical)
    all_features = list(range(d))
    use_subset = mtry is not None and mtry < d
    nodes = []

    def alloc():
        nodes.append(None)
        return len(nodes) - 1

    stack = [(alloc(), np.arange(n), 0)]
    while stack:
        slot, idx, depth = stack.pop()
        ysub = y[idx]
        wsub = w[idx]
        w_tot = float(wsub.sum())
        p_tot = float(wsub @ ysub.astype(np.float64))
        prob = p_tot / w_tot if w_tot > 0 else 0.5
        if ((ysub == ysub[0]).all()
                or (max_depth is not None and depth >= max_depth)
                or len(idx) < 2 * min_leaf):
            nodes[slot] = {"leaf": True, "prob": prob, "n": int(len(idx))}
            continue
        if use_subset:
            features = sorted(int(f) for f in
                              rng.choice(d, size=mtry, replace=False))
        else:
            features = all_features
        found = _best_split(X, y, w, idx, features, min_leaf, cat)
        if found is None:
            nodes[slot] = {"leaf": True, "prob": prob, "n": int(len(idx))}
            continue
        _score, feature, kind, threshold = found
        x = X[idx, feature]
        mask = x == threshold if kind == "cat" else x <= threshold
        left_slot, right_slot = alloc(), alloc()
        nodes[slot] = {"leaf": False, "feature": feature, "kind": kind,
                       "threshold": threshold, "left": left_slot,
                       "right": right_slot, "prob": prob, "n": int(len(idx))}
        stack.append((right_slot, idx[~mask], depth + 1))
        stack.append((left_slot, idx[mask], depth + 1))
    return nodes


def tree_predict(nodes, X):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out = np.empty(len(X))
    stack = [(0, np.arange(len(X)))]
    while stack:
        slot, idx = stack.pop()
        if not len(idx):
            continue
        node = nodes[slot]
        if node["leaf"]:
            out[idx] = node["prob"]
            continue
        x = X[idx, node["feature"]]
        if node["kind"] == "cat":
            mask = x == node["threshold"]
        else:
            mask = x <= node["threshold"]
        stack.append((node["left"], idx[mask]))
        stack.append((node["right"], idx[~mask]))
    return out


class DecisionTree:

    def __init__(self, max_depth=None, min_leaf=1, categorical=()):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.categorical = tuple(sorted(categorical))
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        self.nodes_ = grow_tree(X, y, w, max_depth=self.max_depth,
                                min_leaf=self.min_leaf,
                                categorical=self.categorical)
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        return tree_predict(self.nodes_, X)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    @property
    def depth_(self):
        depth = 0
        stack = [(0, 0)]
        while stack:
            slot, d = stack.pop()
            node = self.nodes_[slot]
            if node["leaf"]:
                depth = max(depth, d)
            else:
                stack.append((node["left"], d + 1))
                stack.append((node["right"], d + 1))
        return depth

    def describe(self):
        leaves = sum(1 for node in self.nodes_ if node["leaf"])
        return {
            "kind": "decision_tree",
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "n_nodes": len(self.nodes_),
            "n_leaves": leaves,
            "depth": self.depth_,
        }

    def get_state(self):
        return {
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "categorical": list(self.categorical),
            "nodes": self.nodes_,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(max_depth=state["max_depth"], min_leaf=state["min_leaf"],
                    categorical=state["categorical"])
        model.nodes_ = state["nodes"]
        model.fitted_ = True
        return model
