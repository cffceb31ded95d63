"""Probability-vote meta-learner over heterogeneous member models.

Members are specified as (name, factory, view) triples.  The view names
which feature matrix a member consumes when the training input is a
multi-view bundle (tree learners want the raw categorical column, the
numeric learners want the one-hot encoding).  Plain arrays work too, in
which case every member sees the same matrix.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, EnsembleBuildError
from .evaluation import stratified_folds, take_rows
from .seeding import derive_seed

WEIGHT_MODES = ("uniform", "accuracy")


@dataclass(frozen=True)
class MemberSpec:
    """Recipe for one ensemble member."""

    name: str
    factory: object  # factory(seed) -> fresh unfitted model
    view: str = "numeric"


def normalize_weights(values):
    """Scale non-negative scores so they sum to one."""
    values = np.asarray(values, dtype=np.float64)
    if (values < 0).any():
        raise ConfigError("weights must be non-negative")
    total = values.sum()
    if total <= 0:
        # degenerate but possible (every member scored zero): fall back
        # to an unweighted vote rather than dividing by zero
        return np.full(len(values), 1.0 / len(values))
    return values / total


def _view_of(X, name):
    """Pick the member's feature matrix out of X."""
    if isinstance(X, np.ndarray):
        # ndarray.view is numpy's dtype reinterpretation, not ours
        return X
    if isinstance(X, dict):
        return X[name]
    if hasattr(X, "view"):
        return X.view(name)
    return X


class MetaLearner:
    """Weighted soft vote over member probability outputs.

    weight_mode "uniform" gives each member 1/m.  "accuracy" estimates
    each member's probability of being correct as its pooled held-out
    accuracy over an inner stratified cross-validation of the training
    data, then normalizes those accuracies into vote weights.
    """

    def __init__(self, members, weight_mode="accuracy", cv_folds=5, seed=0):
        members = list(members)
        if len(members) < 2:
            raise ConfigError(f"need at least 2 members, got {len(members)}")
        if weight_mode not in WEIGHT_MODES:
            raise ConfigError(
                f"weight_mode must be one of {WEIGHT_MODES}, got {weight_mode!r}")
        if cv_folds < 2:
            raise ConfigError(f"cv_folds must be >= 2, got {cv_folds}")
        names = [m.name for m in members]
        if len(set(names)) != len(names):
            raise ConfigError(f"member names must be unique, got {names}")
        self.member_specs = members
        self.weight_mode = weight_mode
        self.cv_folds = int(cv_folds)
        self.seed = int(seed)
        self.fitted_ = False

    def _member_accuracy(self, spec, X, y, folds):
        """Pooled held-out accuracy of one member over the inner folds."""
        n_correct = 0
        for f, test_idx in enumerate(folds):
            train_mask = np.ones(len(y), dtype=bool)
            train_mask[test_idx] = False
            train_idx = np.flatnonzero(train_mask)
            model = spec.factory(derive_seed(self.seed, "member-cv", spec.name, f))
            model.fit(_view_of(take_rows(X, train_idx), spec.view),
                      y[train_idx])
            pred = model.predict(_view_of(take_rows(X, test_idx), spec.view))
            n_correct += int(np.count_nonzero(pred == y[test_idx]))
        return n_correct / len(y)

    def fit(self, X, y, sample_weight=None):
        y = np.asarray(y).astype(np.int8)

        if self.weight_mode == "uniform":
            weights = np.full(len(self.member_specs),
                              1.0 / len(self.member_specs))
            accuracies = None
        else:
            folds = stratified_folds(y, self.cv_folds,
                                     derive_seed(self.seed, "member-folds"))
            accuracies = []
            for spec in self.member_specs:
                try:
                    accuracies.append(self._member_accuracy(spec, X, y, folds))
                except Exception as exc:
                    raise EnsembleBuildError(
                        f"member {spec.name!r} failed during inner "
                        f"cross-validation: {exc}") from exc
            weights = normalize_weights(accuracies)

        self.members_ = []
        for spec in self.member_specs:
            model = spec.factory(derive_seed(self.seed, "member-final", spec.name))
            try:
                model.fit(_view_of(X, spec.view), y, sample_weight=sample_weight)
            except Exception as exc:
                raise EnsembleBuildError(
                    f"member {spec.name!r} failed on the full training "
                    f"set: {exc}") from exc
            self.members_.append(model)
        self.weights_ = weights
        self.names_ = [s.name for s in self.member_specs]
        self.views_ = [s.view for s in self.member_specs]
        self.member_accuracies_ = accuracies
        self.fitted_ = True
        return self

    def predict_proba(self, X):
        contributions = [
            w * np.asarray(m.predict_proba(_view_of(X, v)), dtype=np.float64)
            for m, w, v in zip(self.members_, self.weights_, self.views_)
        ]
        # fsum makes the vote exactly invariant to member order and to
        # padding with zero-weight members
        stacked = np.stack(contributions, axis=1)
        out = np.array([math.fsum(row) for row in stacked])
        return np.clip(out, 0.0, 1.0)

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "probability_vote",
            "weight_mode": self.weight_mode,
            "cv_folds": self.cv_folds,
            "seed": self.seed,
            "members": list(getattr(self, "names_", [])),
            "weights": [float(w) for w in getattr(self, "weights_", [])],
            "member_accuracies": self.member_accuracies_
            if getattr(self, "fitted_", False) else None,
        }

    def get_state(self):
        return {
            "weight_mode": self.weight_mode,
            "cv_folds": self.cv_folds,
            "seed": self.seed,
            "weights": [float(w) for w in self.weights_],
            "names": list(self.names_),
            "views": list(self.views_),
            "member_accuracies": self.member_accuracies_,
            "members": [
                {"kind": m.describe()["kind"], "state": m.get_state()}
                for m in self.members_
            ],
        }

    @classmethod
    def from_state(cls, state):
        # rebuilt ensembles can predict but not refit: factories are live
        # callables and do not survive serialization
        from .artifacts import model_from_state

        specs = [MemberSpec(name=n, factory=None, view=v)
                 for n, v in zip(state["names"], state["views"])]
        meta = cls(specs, weight_mode=state["weight_mode"],
                   cv_folds=state["cv_folds"], seed=state["seed"])
        meta.members_ = [
            model_from_state(entry["kind"], entry["state"])
            for entry in state["members"]
        ]
        meta.weights_ = np.array(state["weights"], dtype=np.float64)
        meta.names_ = list(state["names"])
        meta.views_ = list(state["views"])
        meta.member_accuracies_ = state["member_accuracies"]
        meta.fitted_ = True
        return meta


def build_meta(members, X, y, weight_mode="accuracy", cv_folds=5, seed=0):
    """Construct and fit a MetaLearner in one call."""
    return MetaLearner(members, weight_mode=weight_mode, cv_folds=cv_folds,
                       seed=seed).fit(X, y)


def predict_proba_meta(meta, X):
    """Weighted-vote probability for instances X."""
    return meta.predict_proba(X)
