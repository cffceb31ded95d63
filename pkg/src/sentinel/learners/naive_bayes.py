"""Weighted Gaussian naive Bayes with optional categorical columns.

Continuous features get per-class weighted means and variances (with an
absolute variance floor); columns listed in `categorical` get weighted
category frequencies under add-one (Laplace) smoothing. Weighted counts
are used raw, so an instance with integer weight w trains exactly like w
unit-weight copies.
"""

import math

import numpy as np

from ._common import check_training_data, require_both_classes

VAR_FLOOR = 1e-9


class GaussianNB:

    def __init__(self, var_floor=VAR_FLOOR, laplace=1.0, categorical=()):
        self.var_floor = var_floor
        self.laplace = laplace
        self.categorical = tuple(sorted(categorical))
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        require_both_classes(y, w)
        n, d = X.shape
        cont = [j for j in range(d) if j not in self.categorical]

        class_w = np.array([w[y == 0].sum(), w[y == 1].sum()])
        self.log_prior_ = np.log(class_w / class_w.sum())

        self.cont_cols_ = cont
        self.means_ = np.zeros((2, len(cont)))
        self.vars_ = np.zeros((2, len(cont)))
        for c in (0, 1):
            mask = y == c
            wc = w[mask]
            Xc = X[np.ix_(mask, cont)]
            mean = (wc[:, None] * Xc).sum(axis=0) / wc.sum()
            var = (wc[:, None] * (Xc - mean) ** 2).sum(axis=0) / wc.sum()
            self.means_[c] = mean
            self.vars_[c] = np.maximum(var, self.var_floor)

        self.cat_tables_ = {}
        for j in self.categorical:
            values = np.unique(X[:, j])
            table = np.zeros((2, len(values)))
            for c in (0, 1):
                mask = y == c
                for vi, v in enumerate(values):
                    table[c, vi] = w[mask][X[mask, j] == v].sum()
            smoothed = table + self.laplace
            log_freq = np.log(smoothed / smoothed.sum(axis=1, keepdims=True))
            self.cat_tables_[j] = (values, log_freq)

        self.fitted_ = True
        return self

    def _joint_log_likelihood(self, X):
        X = np.asarray(X, dtype=np.float64)
        n = X.shape[0]
        jll = np.tile(self.log_prior_, (n, 1))
        if self.cont_cols_:
            Xc = X[:, self.cont_cols_]
            for c in (0, 1):
                var = self.vars_[c]
                log_pdf = (-0.5 * np.log(2 * math.pi * var)
                           - (Xc - self.means_[c]) ** 2 / (2 * var))
                jll[:, c] += log_pdf.sum(axis=1)
        for j, (values, log_freq) in self.cat_tables_.items():
            idx = np.searchsorted(values, X[:, j])
            idx = np.clip(idx, 0, len(values) - 1)
            known = values[idx] == X[:, j]
            for c in (0, 1):
                contrib = np.where(known, log_freq[c][idx], 0.0)
                jll[:, c] += contrib
        return jll

    def predict_proba(self, X):
        jll = self._joint_log_likelihood(np.atleast_2d(X))
        # softmax over the two classes in a stable way
        m = jll.max(axis=1, keepdims=True)
        ex = np.exp(jll - m)
        return ex[:, 1] / ex.sum(axis=1)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "gaussian_nb",
            "priors": np.exp(self.log_prior_).tolist(),
            "n_continuous": len(self.cont_cols_),
            "n_categorical": len(self.cat_tables_),
            "var_floor": self.var_floor,
            "laplace": self.laplace,
        }

    def get_state(self):
        return {
            "var_floor": self.var_floor,
            "laplace": self.laplace,
            "categorical": list(self.categorical),
            "log_prior": self.log_prior_.tolist(),
            "cont_cols": list(self.cont_cols_),
            "means": self.means_.tolist(),
            "vars": self.vars_.tolist(),
            "cat_tables": {
                str(j): {"values": values.tolist(), "log_freq": log_freq.tolist()}
                for j, (values, log_freq) in self.cat_tables_.items()
            },
        }

    @classmethod
    def from_state(cls, state):
        model = cls(var_floor=state["var_floor"], laplace=state["laplace"],
                    categorical=state["categorical"])
        model.log_prior_ = np.array(state["log_prior"])
        model.cont_cols_ = list(state["cont_cols"])
        model.means_ = np.array(state["means"])
        model.vars_ = np.array(state["vars"])
        model.cat_tables_ = {
            int(j): (np.array(entry["values"]), np.array(entry["log_freq"]))
            for j, entry in state["cat_tables"].items()
        }
        model.fitted_ = True
        return model
