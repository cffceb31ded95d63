"""AdaBoost.M1 wrapper around any weight-aware binary classifier.

The wrapper trains the base model repeatedly, amplifying the weight of
instances the previous round got wrong.  Rounds are combined by a signed
vote: each round contributes ``alpha_t * (2*h_t(x) - 1)`` where ``h_t`` is
the round's hard 0/1 decision at threshold 0.5.  The final probability is

    p(x) = sigmoid( sum_t alpha_t * (2*h_t(x) - 1) / sum_t alpha_t )

i.e. the alpha-weighted vote margin, normalized into [-1, 1], pushed
through the logistic link.  The normalization keeps the score scale
independent of how many rounds survived, and the link makes the output
comparable with the probability outputs of the unboosted models.
"""

import math

import numpy as np

from .errors import BoostingFailedError, ConfigError
from .learners._common import check_training_data, require_both_classes, sigmoid
from .seeding import derive_seed

# Error this small counts as a perfect round: keep it, cap its alpha at the
# value ln((1-eps)/eps) would take right at the floor, and stop boosting.
PERFECT_EPSILON = 1e-10


class AdaBoostM1:
    """Boost a base classifier by iterative reweighting.

    Parameters
    ----------
    base_factory : callable
        Called as ``base_factory(seed)`` once per round with a derived
        integer seed; must return a fresh unfitted model honoring the
        shared fit/predict_proba contract.  Deterministic learners are
        free to ignore the seed.
    t_max : int
        Round budget.  Boosting may stop earlier (see ``stop_reason_``).
    seed : int
        Master seed; round t uses ``derive_seed(seed, "round", t)``.
    """

    def __init__(self, base_factory, t_max=10, seed=0):
        if t_max < 1:
            raise ConfigError(f"t_max must be >= 1, got {t_max}")
        self.base_factory = base_factory
        self.t_max = int(t_max)
        self.seed = int(seed)
        self.fitted_ = False

    def fit(self, X, y, sample_weight=None):
        X, y, w = check_training_data(X, y, sample_weight)
        require_both_classes(y, w)
        w = w / w.sum()

        self.models_ = []
        self.alphas_ = []
        self.epsilons_ = []
        # weight_history_[0] is the initial distribution; one more entry is
        # appended after every reweighting step, so history has one more
        # entry than the number of reweighted (non-terminal) rounds.
        self.weight_history_ = [w.copy()]
        self.stop_reason_ = "budget"

        for t in range(self.t_max):
            model = self.base_factory(derive_seed(self.seed, "round", t))
            model.fit(X, y, sample_weight=w)
            wrong = model.predict(X) != y
            eps = float(w[wrong].sum())

            if eps >= 0.5:
                if not self.models_:
                    raise BoostingFailedError(
                        f"first round error {eps:.4f} is no better than chance")
                self.stop_reason_ = "chance"
                break

            if eps <= PERFECT_EPSILON:
                alpha = 0.5 * math.log((1.0 - PERFECT_EPSILON) / PERFECT_EPSILON)
                self.models_.append(model)
                self.alphas_.append(alpha)
                self.epsilons_.append(eps)
                self.stop_reason_ = "perfect"
                break

            alpha = 0.5 * math.log((1.0 - eps) / eps)
            self.models_.append(model)
            self.alphas_.append(alpha)
            self.epsilons_.append(eps)

            w = w * np.where(wrong, math.exp(alpha), math.exp(-alpha))
            w = w / w.sum()
            self.weight_history_.append(w.copy())

        self.fitted_ = True
        return self

    def _vote_margin(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        total = sum(self.alphas_)
        score = np.zeros(X.shape[0])
        for model, alpha in zip(self.models_, self.alphas_):
            h = model.predict(X).astype(np.float64)
            score += alpha * (2.0 * h - 1.0)
        return score / total

    def predict_proba(self, X):
        return sigmoid(self._vote_margin(X))

    def predict(self, X, threshold=0.5):
        return (self.predict_proba(X) >= threshold).astype(np.int8)

    def describe(self):
        return {
            "kind": "adaboost_m1",
            "t_max": self.t_max,
            "seed": self.seed,
            "rounds": len(self.models_) if self.fitted_ else 0,
            "stop_reason": getattr(self, "stop_reason_", None),
            "alphas": list(getattr(self, "alphas_", [])),
            "epsilons": list(getattr(self, "epsilons_", [])),
            "base_kinds": [m.describe()["kind"] for m in getattr(self, "models_", [])],
        }

    def get_state(self):
        return {
            "t_max": self.t_max,
            "seed": self.seed,
            "stop_reason": self.stop_reason_,
            "alphas": list(self.alphas_),
            "epsilons": list(self.epsilons_),
            "rounds": [
                {"kind": m.describe()["kind"], "state": m.get_state()}
                for m in self.models_
            ],
        }

    @classmethod
    def from_state(cls, state):
        # deserialized models can predict but not refit: the base factory
        # is a live callable and does not survive serialization
        from .artifacts import model_from_state

        model = cls(base_factory=None, t_max=state["t_max"], seed=state["seed"])
        model.models_ = [
            model_from_state(entry["kind"], entry["state"])
            for entry in state["rounds"]
        ]
        model.alphas_ = [float(a) for a in state["alphas"]]
        model.epsilons_ = [float(e) for e in state["epsilons"]]
        model.weight_history_ = []
        model.stop_reason_ = state["stop_reason"]
        model.fitted_ = True
        return model
