"""Stratified cross-validation harness, confusion counts, ROC and AUC."""

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DataError,
    EmptyClassError,
    EvaluationError,
    UndefinedMetricError,
)
from .seeding import derive_rng, derive_seed


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self):
        return (self.tp + self.tn) / self.total

    def as_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def _check_scores_labels(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DataError(
            f"scores shape {scores.shape} does not match labels {labels.shape}")
    if not np.isfinite(scores).all():
        raise DataError("scores contain non-finite values")
    return scores, labels.astype(np.int8)


def confusion_at_threshold(scores, labels, threshold=0.5):
    """Count outcomes with the positive call made at score >= threshold."""
    scores, labels = _check_scores_labels(scores, labels)
    pred = scores >= threshold
    pos = labels == 1
    tp = int(np.count_nonzero(pred & pos))
    fp = int(np.count_nonzero(pred & ~pos))
    tn = int(np.count_nonzero(~pred & ~pos))
    fn = int(np.count_nonzero(~pred & pos))
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def stratified_folds(labels, k, seed=0):
    """Partition indices into k folds with balanced class counts.

    Each class is shuffled and dealt round-robin; the dealing pointer
    carries over between classes so total fold sizes also differ by at
    most one (k equal to the dataset size yields leave-one-out).
    Returns a list of sorted index arrays.
    """
    labels = np.asarray(labels)
    n = len(labels)
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got {k}")
    if k > n:
        raise ConfigError(f"cannot split {n} instances into {k} folds")
    counts = {cls: int(np.count_nonzero(labels == cls)) for cls in (0, 1)}
    if min(counts.values()) == 0:
        raise EmptyClassError(
            f"both classes required for stratification, counts {counts}")
    minority = min(counts.values())
    if minority < k:
        warnings.warn(
            f"minority class has {minority} instances for {k} folds; "
            "some folds will lack positives", stacklevel=2)

    rng = derive_rng(seed, "folds")
    folds = [[] for _ in range(k)]
    pos = 0
    for cls in (0, 1):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        for i in idx:
            folds[pos % k].append(int(i))
            pos += 1
    return [np.array(sorted(f), dtype=np.intp) for f in folds]


@dataclass(frozen=True)
class RocCurve:
    """Operating points swept over distinct scores, highest first.

    The leading anchor point (fpr=0, tpr=0) carries threshold +inf.
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float

    def points(self):
        return list(zip(self.thresholds.tolist(), self.fpr.tolist(),
                        self.tpr.tolist()))

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("threshold,fpr,tpr\n")
            for thr, fpr, tpr in self.points():
                fh.write(f"{thr!r},{fpr!r},{tpr!r}\n")


def roc_auc(scores, labels):
    """ROC sweep over distinct score values plus trapezoid area.

    Tied scores collapse into a single sweep step, which makes the
    trapezoid area equal the pairwise ordering statistic with half
    credit for ties.
    """
    scores, labels = _check_scores_labels(scores, labels)
    n_pos = int(np.count_nonzero(labels == 1))
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(
            f"AUC undefined with {n_pos} positives and {n_neg} negatives")

    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    cum_tp = np.cumsum(y == 1)
    cum_fp = np.cumsum(y == 0)
    ends = np.flatnonzero(np.diff(s) != 0.0)
    ends = np.append(ends, len(s) - 1)

    tpr = np.concatenate(([0.0], cum_tp[ends] / n_pos))
    fpr = np.concatenate(([0.0], cum_fp[ends] / n_neg))
    thresholds = np.concatenate(([math.inf], s[ends]))
    auc = float(np.sum(np.diff(fpr) * (tpr[:-1] + tpr[1:]) * 0.5))
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr, auc=auc)


def render_roc_svg(curve, path, size=480, margin=50):
    """Write a minimal standalone SVG plot of the ROC curve."""
    span = size - 2 * margin

    def px(x):
        return margin + x * span

    def py(y):
        return size - margin - y * span

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{px(0)}" y1="{py(0)}" x2="{px(1)}" y2="{py(0)}" '
        'stroke="black"/>',
        f'<line x1="{px(0)}" y1="{py(0)}" x2="{px(0)}" y2="{py(1)}" '
        'stroke="black"/>',
        f'<line x1="{px(0)}" y1="{py(0)}" x2="{px(1)}" y2="{py(1)}" '
        'stroke="#bbbbbb" stroke-dasharray="4 4"/>',
    ]
    coords = " ".join(
        f"{px(x):.2f},{py(y):.2f}" for x, y in zip(curve.fpr, curve.tpr))
    parts.append(
        f'<polyline points="{coords}" fill="none" stroke="#c0392b" '
        'stroke-width="2"/>')
    parts.append(
        f'<text x="{size / 2:.0f}" y="{size - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">false positive rate</text>')
    parts.append(
        f'<text x="14" y="{size / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 14 {size / 2:.0f})">true positive rate</text>')
    parts.append(
        f'<text x="{px(0.62):.0f}" y="{py(0.08):.0f}" '
        f'font-family="sans-serif" font-size="14">AUC = {curve.auc:.4f}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def take_rows(X, idx):
    """Row-subset X, whether a plain matrix, a view dict, or a bundle."""
    if hasattr(X, "subset"):
        return X.subset(idx)
    if isinstance(X, dict):
        return {name: mat[idx] for name, mat in X.items()}
    return X[idx]


@dataclass(frozen=True)
class FoldResult:
    index: int
    test_size: int
    confusion: ConfusionMatrix
    accuracy: float
    auc: float
    failed: bool
    error: str

    def as_dict(self):
        return {
            "fold": self.index,
            "test_size": self.test_size,
            "confusion": self.confusion.as_dict() if self.confusion else None,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "failed": self.failed,
            "error": self.error,
        }


@dataclass(frozen=True)
class EvalReport:
    k: int
    seed: int
    threshold: float
    n_instances: int
    n_positive: int
    folds: tuple
    pooled: ConfusionMatrix
    pooled_accuracy: float
    mean_accuracy: float
    pooled_auc: float
    n_failed: int
    # raw held-out scores, row-aligned with the input; kept off as_dict()
    # so the JSON document stays a summary
    pooled_scores: np.ndarray = None
    evaluated_mask: np.ndarray = None

    def as_dict(self):
        return {
            "k": self.k,
            "seed": self.seed,
            "threshold": self.threshold,
            "n_instances": self.n_instances,
            "n_positive": self.n_positive,
            "folds": [f.as_dict() for f in self.folds],
            "pooled_confusion": self.pooled.as_dict() if self.pooled else None,
            "pooled_accuracy": self.pooled_accuracy,
            "mean_accuracy": self.mean_accuracy,
            "pooled_auc": self.pooled_auc,
            "n_failed": self.n_failed,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def cross_validate(factory, X, y, k=10, seed=0, threshold=0.5):
    """Train and score factory-built models over stratified folds.

    factory(seed) must return a fresh unfitted model.  Every random draw
    derives from (seed, fold), so repeated calls reproduce exactly.  A
    fold whose training fails is marked and skipped; the run only raises
    once half or more of the folds are lost.
    """
    y = np.asarray(y).astype(np.int8)
    folds = stratified_folds(y, k, seed)
    n = len(y)
    pooled_scores = np.zeros(n)
    evaluated = np.zeros(n, dtype=bool)
    results = []
    n_failed = 0

    for f, test_idx in enumerate(folds):
        train_mask = np.ones(n, dtype=bool)
        train_mask[test_idx] = False
        train_idx = np.flatnonzero(train_mask)
        try:
            model = factory(derive_seed(seed, "fit", f))
            model.fit(take_rows(X, train_idx), y[train_idx])
            scores = np.asarray(model.predict_proba(take_rows(X, test_idx)),
                                dtype=np.float64)
        except Exception as exc:  # noqa: BLE001 - fold isolation is the point
            n_failed += 1
            results.append(FoldResult(
                index=f, test_size=len(test_idx), confusion=None,
                accuracy=None, auc=None, failed=True, error=str(exc)))
            continue

        conf = confusion_at_threshold(scores, y[test_idx], threshold)
        try:
            auc = roc_auc(scores, y[test_idx]).auc
        except UndefinedMetricError:
            auc = None
        pooled_scores[test_idx] = scores
        evaluated[test_idx] = True
        results.append(FoldResult(
            index=f, test_size=len(test_idx), confusion=conf,
            accuracy=conf.accuracy, auc=auc, failed=False, error=None))

    if 2 * n_failed >= k:
        raise EvaluationError(
            f"{n_failed} of {k} folds failed to train; giving up")

    pooled = confusion_at_threshold(
        pooled_scores[evaluated], y[evaluated], threshold)
    try:
        pooled_auc = roc_auc(pooled_scores[evaluated], y[evaluated]).auc
    except UndefinedMetricError:
        pooled_auc = None
    accs = [r.accuracy for r in results if not r.failed]
    return EvalReport(
        k=k, seed=seed, threshold=threshold, n_instances=n,
        n_positive=int(np.count_nonzero(y == 1)), folds=tuple(results),
        pooled=pooled, pooled_accuracy=pooled.accuracy,
        mean_accuracy=float(np.mean(accs)), pooled_auc=pooled_auc,
        n_failed=n_failed, pooled_scores=pooled_scores,
        evaluated_mask=evaluated)
