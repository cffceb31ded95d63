#!/usr/bin/env python3
"""Watch the reweighting loop concentrate mass on the hard rows.

A depth-1 tree can only cut once, so on overlapping blobs it keeps
misclassifying whichever side the cut sacrificed. After each round the
booster halves the mass between mistakes and the rest, which forces the
next stump to care about different rows. The stage weights then blend
the stumps into a much sharper vote.
"""

import math

import numpy as np

from sentinel.boosting import AdaBoostM1
from sentinel.errors import BoostingFailedError
from sentinel.learners import DecisionTree

rng = np.random.default_rng(12)
X = np.vstack([rng.normal(-0.7, 1.0, size=(40, 2)),
               rng.normal(0.7, 1.0, size=(40, 2))])
y = np.repeat([0, 1], 40)

stump = lambda seed: DecisionTree(max_depth=1)
booster = AdaBoostM1(stump, t_max=6, seed=4).fit(X, y)

print("round   error   alpha   heaviest rows after reweight")
for t, (eps, alpha) in enumerate(zip(booster.epsilons_, booster.alphas_)):
    if t + 1 < len(booster.weight_history_):
        w = booster.weight_history_[t + 1]
        top = np.argsort(w)[-3:][::-1]
        heavy = ", ".join(f"#{i}={w[i]:.3f}" for i in top)
    else:
        heavy = "(final round, no reweight)"
    print(f"{t:5d} {eps:7.3f} {alpha:7.3f}   {heavy}")
print(f"stopped because: {booster.stop_reason_}")

stump_acc = np.mean(stump(0).fit(X, y).predict(X) == y)
boost_acc = np.mean(booster.predict(X) == y)
print(f"\nsingle stump training accuracy {stump_acc:.3f}, "
      f"boosted {boost_acc:.3f}")

# the vote margin maps to a probability through a logistic squash, so
# the output never saturates to a hard 0 or 1
proba = booster.predict_proba(X)
print(f"probability range: {proba.min():.3f} .. {proba.max():.3f} "
      f"(bounds are {1 / (1 + math.e):.3f} and {math.e / (1 + math.e):.3f})")

# two degenerate endings: a perfectly separable problem stops after one
# round, and a no-better-than-chance first round refuses to fit at all
X_easy = np.vstack([rng.normal(-8.0, 0.3, size=(10, 2)),
                    rng.normal(8.0, 0.3, size=(10, 2))])
y_easy = np.repeat([0, 1], 10)
easy = AdaBoostM1(stump, t_max=6, seed=0).fit(X_easy, y_easy)
print(f"\nseparable blobs: {len(easy.models_)} round(s), "
      f"stop reason {easy.stop_reason_!r}")

X_flat = np.zeros((40, 2))
y_flat = np.tile([0, 1], 20)
try:
    AdaBoostM1(stump, t_max=6, seed=0).fit(X_flat, y_flat)
except BoostingFailedError as exc:
    print(f"featureless data: {exc}")
