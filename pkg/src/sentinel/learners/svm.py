"""Linear SVM trained with the Pegasos stochastic subgradient schedule,
with probabilities via Platt scaling.

Features are z-normalized internally and a constant column carries the
bias (regularized with the rest, which keeps the learner exactly
symmetric under label flips). Instance weights scale each subgradient,
normalized so they sum to n: uniform weights reproduce the unweighted
algorithm step for step. The sample sequence is drawn up front from the
seed, so fits are reproducible.

Platt scaling fits p = 1/(1 + exp(A·f + B)) on the training decision
values by Newton's method with backtracking, using the prior-corrected
targets from Platt's original recipe (weighted counts as priors).
"""

import numpy as np

from ..errors import DivergenceError
from ..seeding import derive_rng
from ._common import (
    check_training_data,
    require_both_classes,
    sigmoid,
    standardize_fit,
)


def platt_fit(f, y, w, max_iter=100, min_step=1e-10, ridge=1e-12):
    """Fit (A, B) of the scaling sigmoid on decision values f."""
    f = np.asarray(f, dtype=np.float64)
    prior1 = float(w[y == 1].sum())
    prior0 = float(w[y == 0].sum())
    hi = (prior1 + 1.0) / (prior1 + 2.0)
    lo = 1.0 / (prior0 + 2.0)
    t = np.where(y == 1, hi, lo)

    def objective(a, b):
        z = a * f + b
        pos = z >= 0
        per = np.empty_like(z)
        per[pos] = t[pos] * z[pos] + np.log1p(np.exp(-z[pos]))
        per[~pos] = (t[~pos] - 1.0) * z[~pos] + np.log1p(np.exp(z[~pos]))
        return float(w @ per)

    A, B = 0.0, np.log((prior0 + 1.0) / (prior1 + 1.0))
    fval = objective(A, B)
    for _ in range(max_iter):
        z = A * f + B
        p = sigmoid(-z)
        d1 = w * (t - p)
        d2 = w * p * (1 - p)
        g1 = float(d1 @ f)
        g2 = float(d1.sum())
        if abs(g1) < 1e-5 and abs(g2) < 1e-5:
            break
        h11 = float(d2 @ (f * f)) + ridge
        h22 = float(d2.sum()) + ridge
        h21 = float(d2 @ f)
        det = h11 * h22 - h21 * h21
        dA = -(h22 * g1 - h21 * g2) / det
        dB = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * dA + g2 * dB
        step = 1.0
        while step >= min_step:
            new_a, new_b = A + step * dA, B + step * dB
            new_f = objective(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                A, B, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            break
    return float(A), float(B)


class LinearSVM:

    def __init__(self, C=1.0, epochs=100, seed=0):
        self.C = C
        self.epochs = epochs
        self.seed = seed
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        require_both_classes(y, w)
        n, d = X.shape
        wn = w * (n / w.sum())
        self.mean_, self.scale_ = standardize_fit(X)
        Xa = np.hstack([(X - self.mean_) / self.scale_, np.ones((n, 1))])
        ypm = (2.0 * y - 1.0)

        lam = 1.0 / (self.C * n)
        steps = self.epochs * n
        rng = derive_rng(self.seed, "pegasos")
        order = rng.integers(0, n, size=steps)

        v = np.zeros(d + 1)
        for t in range(1, steps + 1):
            i = order[t - 1]
            eta = 1.0 / (lam * t)
            margin = ypm[i] * (Xa[i] @ v)
            v *= 1.0 - 1.0 / t
            if margin < 1.0:
                v += (eta * wn[i] * ypm[i]) * Xa[i]
        if not np.isfinite(v).all():
            raise DivergenceError("linear SVM weights became non-finite")
        self.v_ = v

        scores = Xa @ v
        self.platt_a_, self.platt_b_ = platt_fit(scores, y, wn)
        self.fitted_ = True
        return self

    def decision_function(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        Xa = np.hstack([(X - self.mean_) / self.scale_, np.ones((len(X), 1))])
        return Xa @ self.v_

    def predict_proba(self, X):
        z = self.platt_a_ * self.decision_function(X) + self.platt_b_
        return sigmoid(-z)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "linear_svm",
            "C": self.C,
            "epochs": self.epochs,
            "seed": self.seed,
            "platt": [getattr(self, "platt_a_", None),
                      getattr(self, "platt_b_", None)],
        }

    def get_state(self):
        return {
            "C": self.C,
            "epochs": self.epochs,
            "seed": self.seed,
            "v": self.v_.tolist(),
            "mean": self.mean_.tolist(),
            "scale": self.scale_.tolist(),
            "platt_a": self.platt_a_,
            "platt_b": self.platt_b_,
        }

    @classmethod
    def from_state(cls, state):
        model = cls(C=state["C"], epochs=state["epochs"], seed=state["seed"])
        model.v_ = np.array(state["v"])
        model.mean_ = np.array(state["mean"])
        model.scale_ = np.array(state["scale"])
        model.platt_a_ = state["platt_a"]
        model.platt_b_ = state["platt_b"]
        model.fitted_ = True
        return model
