"""Shared validation and numerics for the learner implementations."""

import numpy as np

from ..errors import DataError, EmptyClassError


def check_training_data(X, y, sample_weight=None):
    """Coerce inputs to float arrays and enforce the shared fit contract."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise DataError(f"feature matrix must be 2-D, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise DataError(f"labels shape {y.shape} does not match {X.shape[0]} rows")
    if not np.isfinite(X).all():
        raise DataError("feature matrix contains non-finite values")
    uniq = set(np.unique(y).tolist())
    if not uniq <= {0, 1}:
        raise DataError(f"labels must be 0/1, got values {sorted(uniq)}")
    y = y.astype(np.int8)
    if sample_weight is None:
        w = np.ones(X.shape[0], dtype=np.float64)
    else:
        w = np.asarray(sample_weight, dtype=np.float64)
        if w.shape != y.shape:
            raise DataError("sample_weight length does not match labels")
        if not np.isfinite(w).all() or (w < 0).any():
            raise DataError("sample weights must be finite and non-negative")
        if w.sum() <= 0:
            raise DataError("sample weights sum to zero")
    return X, y, w


def require_both_classes(y, w=None):
    mask = w > 0 if w is not None else np.ones(len(y), dtype=bool)
    present = set(np.unique(np.asarray(y)[mask]).tolist())
    if present != {0, 1}:
        raise EmptyClassError(
            f"training data carries weight for classes {sorted(present)}; "
            "need both 0 and 1")


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softplus(z):
    """log(1 + e^z) without overflow."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def standardize_fit(X):
    """Column means and scales for internal z-normalization."""
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    return mean, scale
