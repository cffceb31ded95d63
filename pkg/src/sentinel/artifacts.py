"""Model persistence: one JSON document per saved model.

Every model class exposes get_state() returning plain JSON-friendly data
and a from_state() classmethod; this module maps the stable kind strings
to classes so composite models (boosted rounds, ensemble members) can be
rebuilt without knowing concrete types.
"""

import json

from .boosting import AdaBoostM1
from .ensemble import MetaLearner
from .errors import DataError
from .learners import (
    DecisionTree,
    GaussianNB,
    LinearSVM,
    LogisticRegression,
    MLP,
    RandomForest,
)

FORMAT_NAME = "sentinel-model"
FORMAT_VERSION = 1

MODEL_KINDS = {
    "gaussian_nb": GaussianNB,
    "logistic_regression": LogisticRegression,
    "decision_tree": DecisionTree,
    "random_forest": RandomForest,
    "linear_svm": LinearSVM,
    "mlp": MLP,
    "adaboost_m1": AdaBoostM1,
    "probability_vote": MetaLearner,
}


def model_from_state(kind, state):
    """Rebuild a fitted model from its kind string and state payload."""
    try:
        cls = MODEL_KINDS[kind]
    except KeyError:
        raise DataError(
            f"unknown model kind {kind!r}; known: {sorted(MODEL_KINDS)}")
    return cls.from_state(state)


def save_model(model, path):
    """Write a fitted model to path as a self-describing JSON document."""
    kind = model.describe()["kind"]
    if kind not in MODEL_KINDS:
        raise DataError(f"model kind {kind!r} is not registered")
    payload = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "state": model.get_state(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    """Read back a model written by save_model."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT_NAME:
        raise DataError(f"{path}: not a {FORMAT_NAME} document")
    if payload.get("version") != FORMAT_VERSION:
        raise DataError(
            f"{path}: unsupported version {payload.get('version')!r}")
    return model_from_state(payload["kind"], payload["state"])
