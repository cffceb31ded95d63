#!/usr/bin/env python3
"""Blend five classifiers into a weighted probability vote, then draw
the ROC curve the report is built from.

The vote weighs each member by its accuracy on an inner cross-validation
of the training fold, so a weak member loses influence instead of
dragging the blend down. Artifacts land in out/vote_tour/run/.
"""

import json
import shutil
from datetime import date
from pathlib import Path

from sentinel import pipeline
from sentinel.datagen import GenConfig
from sentinel.features import to_bundle
from sentinel.pipeline import RunConfig

out = Path(__file__).resolve().parent / "out" / "vote_tour"
shutil.rmtree(out, ignore_errors=True)

config = GenConfig(seed=58, n_users=120, n_insiders=6,
                   start_date=date(2010, 3, 1), end_date=date(2010, 5, 31))
pipeline.run_generate(config, out / "corpus")
dataset = pipeline.run_preprocess(RunConfig(
    corpus=str(out / "corpus"), month="2010-04", out=str(out / "instances"),
    seed=58, ratio=12.0))

run = RunConfig(corpus=str(out / "corpus"), month="2010-04",
                out=str(out / "run"), seed=58,
                models=("nb", "lr", "rf", "mlp"), boost=True, t_max=5,
                members=("mlp", "boosted_nb", "boosted_svm", "rf", "lr"),
                inner_folds=3, cv=5)
doc = pipeline.train_eval(dataset, run)
print(pipeline.format_table(doc))

# the vote's inner weighting is visible on a direct fit
factory = pipeline.ensemble_factory(run)
bundle = to_bundle(dataset)
meta = factory(58).fit(bundle, bundle.y)
print("member accuracies and vote weights from the inner folds:")
for spec, acc, weight in zip(meta.member_specs, meta.member_accuracies_,
                             meta.weights_):
    print(f"  {spec.name:12s} accuracy {acc:.3f}  weight {weight:.3f}")

# the report directory now holds everything a rerun would reproduce
print("\nartifacts:")
manifest = json.loads((out / "run" / "manifest.json").read_text())
for rel, digest in sorted(manifest["artifacts"].items()):
    print(f"  {rel:18s} sha256 {digest[:12]}")

roc_lines = (out / "run" / "roc.csv").read_text().splitlines()
print(f"\nroc.csv has {len(roc_lines) - 1} points; the first three:")
for line in roc_lines[:4]:
    print(f"  {line}")
print(f"curve drawing: {out / 'run' / 'roc.svg'}")
