"""Independent oracles used by the unit and acceptance suites.

Everything here is written the slow, obvious way on purpose: plain loops
and textbook formulas, sharing no code with the implementations under
test.
"""

import math


def pairwise_auc(scores, labels):
    """Mann-Whitney statistic: P(score+ > score-) with half credit for ties."""
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    if not pos or not neg:
        raise ValueError("need both classes")
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def normal_tail(z, steps=4000):
    """Two-sided tail 2(1-Phi(|z|)) by Simpson quadrature of the density."""
    z = abs(z)
    if z == 0:
        return 1.0
    h = z / steps
    pdf = [math.exp(-(i * h) ** 2 / 2) / math.sqrt(2 * math.pi)
           for i in range(steps + 1)]
    area = pdf[0] + pdf[-1] + 4 * sum(pdf[1:-1:2]) + 2 * sum(pdf[2:-1:2])
    return max(1.0 - 2.0 * area * h / 3.0, 0.0)


def _gini_side(w, y):
    """W·(1 − gini) of one child, the quantity CART maximizes summed."""
    W = sum(w)
    if W <= 0:
        return 0.0
    P = sum(wi for wi, yi in zip(w, y) if yi == 1)
    return (P * P + (W - P) * (W - P)) / W


def brute_force_best_split(X, y, w, min_leaf=1):
    """Enumerate every midpoint split of every feature.

    Returns (score, feature, threshold) of the best, preferring lower
    feature then lower threshold on exact ties, or None if no split is
    valid.
    """
    n = len(y)
    d = len(X[0])
    best = None
    for j in range(d):
        values = sorted(set(row[j] for row in X))
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2.0
            left = [i for i in range(n) if X[i][j] <= thr]
            right = [i for i in range(n) if X[i][j] > thr]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            score = (_gini_side([w[i] for i in left], [y[i] for i in left])
                     + _gini_side([w[i] for i in right], [y[i] for i in right]))
            if best is None or score > best[0]:
                best = (score, j, thr)
    return best
