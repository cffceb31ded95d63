"""One-hidden-layer neural network for binary classification.

Logistic activations throughout, weighted cross-entropy loss, full-batch
gradient descent, and seeded uniform init in [-0.5, 0.5]. Parameters live
in one flat vector so the backward pass can be checked against central
finite differences of the forward loss.
"""

import numpy as np

from ..errors import DivergenceError
from ..seeding import derive_rng
from ._common import (
    check_training_data,
    require_both_classes,
    sigmoid,
    softplus,
    standardize_fit,
)


def unpack_params(theta, d, hidden):
    """Flat vector -> (W1 (d,h), b1 (h,), w2 (h,), b2 scalar)."""
    end1 = d * hidden
    W1 = theta[:end1].reshape(d, hidden)
    b1 = theta[end1:end1 + hidden]
    w2 = theta[end1 + hidden:end1 + 2 * hidden]
    b2 = theta[-1]
    return W1, b1, w2, b2


def loss_and_grad(theta, X, y, w, hidden):
    """Weighted cross-entropy and its gradient in the flat parameters."""
    d = X.shape[1]
    W1, b1, w2, b2 = unpack_params(theta, d, hidden)
    H = sigmoid(X @ W1 + b1)
    z = H @ w2 + b2
    loss = float(np.sum(w * (softplus(z) - y * z)))

    dz = w * (sigmoid(z) - y)
    grad_w2 = H.T @ dz
    grad_b2 = dz.sum()
    dH = np.outer(dz, w2) * H * (1.0 - H)
    grad_W1 = X.T @ dH
    grad_b1 = dH.sum(axis=0)
    grad = np.concatenate([grad_W1.ravel(), grad_b1, grad_w2, [grad_b2]])
    return loss, grad


class MLP:

    def __init__(self, hidden=8, lr=0.5, epochs=500, seed=0):
        if hidden < 1:
            raise ValueError("hidden must be at least 1")
        self.hidden = hidden
        self.lr = lr
        self.epochs = epochs
        self.seed = seed
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        require_both_classes(y, w)
        w = w / w.sum()
        self.mean_, self.scale_ = standardize_fit(X)
        Xs = (X - self.mean_) / self.scale_
        d = X.shape[1]
        n_params = d * self.hidden + 2 * self.hidden + 1
        rng = derive_rng(self.seed, "mlp-init")
        theta = rng.uniform(-0.5, 0.5, size=n_params)

        for _ in range(self.epochs):
            loss, grad = loss_and_grad(theta, Xs, y, w, self.hidden)
            if not np.isfinite(loss):
                raise DivergenceError(f"network diverged at lr={self.lr}")
            theta = theta - self.lr * grad
        if not np.isfinite(theta).all():
            raise DivergenceError(f"network diverged at lr={self.lr}")
        self.theta_ = theta
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        Xs = (X - self.mean_) / self.scale_
        W1, b1, w2, b2 = unpack_params(self.theta_, Xs.shape[1], self.hidden)
        H = sigmoid(Xs @ W1 + b1)
        return sigmoid(H @ w2 + b2)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "mlp",
            "hidden": self.hidden,
            "lr": self.lr,
            "epochs": self.epochs,
            "seed": self.seed,
        }

    def get_state(self):
        return {
            "hidden": self.hidden,
            "lr": self.lr,
            "epochs": self.epochs,
            "seed": self.seed,
            "theta": self.theta_.tolist(),
            "mean": self.mean_.tolist(),
            "scale": self.scale_.tolist(),
        }

    @classmethod
    def from_state(cls, state):
        model = cls(hidden=state["hidden"], lr=state["lr"],
                    epochs=state["epochs"], seed=state["seed"])
        model.theta_ = np.array(state["theta"])
        model.mean_ = np.array(state["mean"])
        model.scale_ = np.array(state["scale"])
        model.fitted_ = True
        return model
