"""Six from-scratch probabilistic classifiers behind one contract:

    fit(X, y, sample_weight=None) -> self
    predict_proba(X) -> P(positive) per row, in [0, 1]
    predict(X, threshold=0.5) -> hard 0/1 labels
    describe() -> parameter summary dict
    get_state() / from_state(state) -> JSON-ready persistence

All learners honor per-instance weights; uniform weights reproduce
unweighted training.
"""

from .naive_bayes import GaussianNB
from .logistic import LogisticRegression
from .tree import DecisionTree
from .forest import RandomForest
from .svm import LinearSVM
from .mlp import MLP

__all__ = [
    "GaussianNB",
    "LogisticRegression",
    "DecisionTree",
    "RandomForest",
    "LinearSVM",
    "MLP",
]
