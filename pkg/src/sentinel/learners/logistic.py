"""Binary logistic regression by full-batch gradient descent.

Features are z-normalized internally (scales stored on the model), the
intercept starts at the log-odds of the weighted base rate so a zero-epoch
model already predicts the prior, and the weighted negative log-likelihood
uses the softplus form that cannot overflow. L2 excludes the intercept.
"""

import numpy as np

from ..errors import DivergenceError
from ._common import (
    check_training_data,
    require_both_classes,
    sigmoid,
    softplus,
    standardize_fit,
)


def loss_and_grad(beta, X1, y, w, l2):
    """Weighted NLL and gradient; X1 carries a leading column of ones.

    Kept at module level so tests can difference it numerically.
    """
    z = X1 @ beta
    loss = float(np.sum(w * (softplus(z) - y * z)))
    loss += 0.5 * l2 * float(beta[1:] @ beta[1:])
    residual = w * (sigmoid(z) - y)
    grad = X1.T @ residual
    grad[1:] += l2 * beta[1:]
    return loss, grad


class LogisticRegression:

    def __init__(self, lr=0.5, epochs=2000, l2=1e-4, tol=1e-8):
        self.lr = lr
        self.epochs = epochs
        self.l2 = l2
        self.tol = tol
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        require_both_classes(y, w)
        w = w / w.sum()
        self.mean_, self.scale_ = standardize_fit(X)
        Xs = (X - self.mean_) / self.scale_
        X1 = np.hstack([np.ones((len(y), 1)), Xs])

        base = float(np.clip(w @ y, 1e-12, 1 - 1e-12))
        beta = np.zeros(X1.shape[1])
        beta[0] = np.log(base / (1 - base))

        prev = np.inf
        self.n_iter_ = 0
        for _ in range(self.epochs):
            loss, grad = loss_and_grad(beta, X1, y, w, self.l2)
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"logistic regression diverged at lr={self.lr}")
            beta = beta - self.lr * grad
            self.n_iter_ += 1
            if abs(prev - loss) < self.tol:
                break
            prev = loss
        if not np.isfinite(beta).all():
            raise DivergenceError(f"logistic regression diverged at lr={self.lr}")
        self.beta_ = beta
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        Xs = (X - self.mean_) / self.scale_
        return sigmoid(self.beta_[0] + Xs @ self.beta_[1:])

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "logistic_regression",
            "lr": self.lr,
            "epochs": self.epochs,
            "l2": self.l2,
            "n_iter": getattr(self, "n_iter_", 0),
            "coef_norm": float(np.linalg.norm(self.beta_[1:])) if self.fitted_ else None,
        }

    def get_state(self):
        return {
            "lr": self.lr,
            "epochs": self.epochs,
            "l2": self.l2,
            "tol": self.tol,
            "beta": self.beta_.tolist(),
            "mean": self.mean_.tolist(),
            "scale": self.scale_.tolist(),
        }

    @classmethod
    def from_state(cls, state):
        model = cls(lr=state["lr"], epochs=state["epochs"], l2=state["l2"],
                    tol=state["tol"])
        model.beta_ = np.array(state["beta"])
        model.mean_ = np.array(state["mean"])
        model.scale_ = np.array(state["scale"])
        model.fitted_ = True
        return model
