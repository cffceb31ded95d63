#!/usr/bin/env python3
"""Cross-validate each classifier on one month of generated instances.

All six are trained from the same feature bundle; the tree-based ones
see the raw columns while the numeric ones get standardized inputs.
Scores from every held-out fold are pooled before computing the ROC
area, so one number summarizes the whole month.
"""

import shutil
from datetime import date
from pathlib import Path

from sentinel import pipeline
from sentinel.datagen import GenConfig
from sentinel.evaluation import cross_validate
from sentinel.features import to_bundle
from sentinel.pipeline import RunConfig
from sentinel.seeding import derive_seed

out = Path(__file__).resolve().parent / "out" / "shootout"
shutil.rmtree(out, ignore_errors=True)

config = GenConfig(seed=33, n_users=120, n_insiders=6,
                   start_date=date(2010, 3, 1), end_date=date(2010, 5, 31))
pipeline.run_generate(config, out / "corpus")
dataset = pipeline.run_preprocess(RunConfig(
    corpus=str(out / "corpus"), month="2010-04", out=str(out / "instances"),
    seed=33, ratio=12.0))
print(f"dataset: {len(dataset)} instances, {dataset.n_positive} positive\n")

bundle = to_bundle(dataset)
run = RunConfig(seed=33)

print(f"{'model':8s} {'accuracy':>9s} {'ROC area':>9s}   notes")
for name in ("nb", "lr", "dt", "rf", "svm", "mlp"):
    factory, view = pipeline.resolve_factory(name, run)
    report = cross_validate(factory, bundle.view(view), bundle.y,
                            k=5, seed=derive_seed(33, "demo", name))
    note = f"{report.n_failed} failed folds" if report.n_failed else ""
    print(f"{name:8s} {report.pooled_accuracy:9.4f} {report.pooled_auc:9.4f}   {note}")

# peek inside two of the fitted models
factory, view = pipeline.resolve_factory("rf", run)
forest = factory(0).fit(bundle.view(view), bundle.y)
info = forest.describe()
print(f"\nrandom forest: {info['n_trees']} trees, "
      f"{info['mtry']} features tried per split")

factory, view = pipeline.resolve_factory("nb", run)
bayes = factory(0).fit(bundle.view(view), bundle.y)
print("naive Bayes describe():")
for key, value in sorted(bayes.describe().items()):
    print(f"  {key}: {value}")
