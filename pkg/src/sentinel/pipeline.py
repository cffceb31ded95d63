"""End-to-end runs: preprocess a corpus, train every model, evaluate, report.

The model catalog maps short names to (class, feature view, defaults).
Hyperparameter overrides arrive as a {model: {param: value}} mapping so a
config file can say e.g. ``model.rf.n_trees = 200``.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field

from . import datagen, features
from .boosting import AdaBoostM1
from .ensemble import MemberSpec, MetaLearner
from .errors import ConfigError, EvaluationError, SentinelError
from .evaluation import cross_validate, render_roc_svg, roc_auc
from .seeding import derive_seed

BOOSTED_PREFIX = "boosted_"


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    cls: type
    view: str
    defaults: dict = field(default_factory=dict)
    seeded: bool = False

    def build(self, seed, overrides=None):
        params = dict(self.defaults)
        if overrides:
            unknown = set(overrides) - set(params)
            if unknown:
                raise ConfigError(
                    f"unknown hyperparameters for {self.label}: {sorted(unknown)}")
            params.update(overrides)
        if self.seeded:
            params["seed"] = seed
        return self.cls(**params)


def _catalog():
    from .learners import (
        DecisionTree,
        GaussianNB,
        LinearSVM,
        LogisticRegression,
        MLP,
        RandomForest,
    )

    # tree view keeps the cluster nominal in column 4; the employment flags
    # (columns 2 and 3) are two-valued, so the Bayes model treats them as
    # categories too instead of degenerate Gaussians
    return {
        "nb": CatalogEntry("naive Bayes", GaussianNB, "tree",
                           {"categorical": (2, 3, 4)}),
        "lr": CatalogEntry("logistic regression", LogisticRegression,
                           "numeric", {"epochs": 2000}),
        "dt": CatalogEntry("decision tree", DecisionTree, "tree",
                           {"max_depth": None, "min_leaf": 2,
                            "categorical": (4,)}),
        "rf": CatalogEntry("random forest", RandomForest, "tree",
                           {"n_trees": 100, "categorical": (4,)},
                           seeded=True),
        "svm": CatalogEntry("linear SVM", LinearSVM, "numeric",
                            {"C": 1.0, "epochs": 100}, seeded=True),
        "mlp": CatalogEntry("neural network", MLP, "numeric",
                            {"hidden": 8, "epochs": 500}, seeded=True),
    }


MODEL_CATALOG = _catalog()

# the five default vote members mirror the reference configuration:
# neural network, boosted Bayes, boosted SVM, random forest, logistic
DEFAULT_MEMBERS = ("mlp", "boosted_nb", "boosted_svm", "rf", "lr")


@dataclass(frozen=True)
class RunConfig:
    corpus: str = ""
    month: str = ""
    out: str = ""
    seed: int = 0
    k_clusters: int = 7
    ratio: float = 15.0
    subsample: bool = True
    models: tuple = ("nb", "lr", "dt", "rf", "svm", "mlp")
    boost: bool = True
    t_max: int = 10
    members: tuple = DEFAULT_MEMBERS
    weight_mode: str = "accuracy"
    inner_folds: int = 5
    cv: int = 10
    threshold: float = 0.5
    hyper: dict = field(default_factory=dict)

    def echo(self):
        doc = {
            "corpus": self.corpus,
            "month": self.month,
            "out": self.out,
            "seed": self.seed,
            "k_clusters": self.k_clusters,
            "ratio": self.ratio,
            "subsample": self.subsample,
            "models": list(self.models),
            "boost": self.boost,
            "t_max": self.t_max,
            "members": list(self.members),
            "weight_mode": self.weight_mode,
            "inner_folds": self.inner_folds,
            "cv": self.cv,
            "threshold": self.threshold,
            "hyper": {m: dict(p) for m, p in sorted(self.hyper.items())},
        }
        return doc


def resolve_factory(name, config):
    """Map a model name (maybe boosted_-prefixed) to (factory, view)."""
    base_name = name[len(BOOSTED_PREFIX):] if name.startswith(BOOSTED_PREFIX) \
        else name
    try:
        entry = MODEL_CATALOG[base_name]
    except KeyError:
        raise ConfigError(
            f"unknown model {name!r}; catalog: {sorted(MODEL_CATALOG)}")
    overrides = config.hyper.get(base_name)

    if name.startswith(BOOSTED_PREFIX):
        def factory(seed):
            return AdaBoostM1(
                lambda round_seed: entry.build(round_seed, overrides),
                t_max=config.t_max, seed=seed)
    else:
        def factory(seed):
            return entry.build(seed, overrides)
    return factory, entry.view


def ensemble_factory(config):
    """Factory for the probability-vote model over the configured members."""
    specs = []
    for name in config.members:
        member_factory, view = resolve_factory(name, config)
        specs.append(MemberSpec(name=name, factory=member_factory, view=view))

    def factory(seed):
        return MetaLearner(specs, weight_mode=config.weight_mode,
                           cv_folds=config.inner_folds, seed=seed)
    return factory


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, command, config_echo, seed, paths):
    """Record what a run wrote: config echo, seed, and artifact hashes."""
    artifacts = {}
    for path in paths:
        rel = os.path.relpath(path, out_dir)
        artifacts[rel] = sha256_file(path)
    doc = {
        "command": command,
        "config": config_echo,
        "seed": seed,
        "artifacts": artifacts,
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _walk_files(root):
    found = []
    for dirpath, _, names in os.walk(root):
        for name in sorted(names):
            found.append(os.path.join(dirpath, name))
    return sorted(found)


def run_generate(gen_config, out_dir):
    summary = datagen.generate(gen_config, out_dir)
    write_manifest(out_dir, "generate", json.loads(gen_config.to_json()),
                   gen_config.seed,
                   [p for p in _walk_files(out_dir)
                    if os.path.basename(p) != "manifest.json"])
    return summary


def run_preprocess(config):
    """Corpus to instances.csv: features, labels, optional subsample."""
    dataset = features.build_instances(
        config.corpus, config.month, k=config.k_clusters, seed=config.seed)
    dataset.provenance["retained_users"] = len(
        {inst.user_id for inst in dataset.instances})
    if config.subsample:
        dataset = features.spread_subsample(
            dataset, ratio=config.ratio, seed=config.seed)
    features.save_instances(dataset, config.out)
    write_manifest(
        config.out, "preprocess", config.echo(), config.seed,
        [os.path.join(config.out, "instances.csv"),
         os.path.join(config.out, "meta.json")])
    return dataset


def train_eval(dataset, config):
    """Cross-validate every configured model plus the vote ensemble.

    Returns the result document (also written to report.json when
    config.out is set).  A model failure is recorded in its row; the run
    only raises if every model fails.
    """
    bundle = features.to_bundle(dataset)
    results = {}
    reports = {}

    names = list(config.models)
    if config.boost:
        names += [BOOSTED_PREFIX + m for m in config.models]

    for name in names:
        factory, view = resolve_factory(name, config)
        try:
            report = cross_validate(
                factory, bundle.view(view), bundle.y, k=config.cv,
                seed=derive_seed(config.seed, "eval", name),
                threshold=config.threshold)
        except SentinelError as exc:
            results[name] = {"error": str(exc)}
            continue
        results[name] = report.as_dict()
        reports[name] = report

    try:
        report = cross_validate(
            ensemble_factory(config), bundle, bundle.y, k=config.cv,
            seed=derive_seed(config.seed, "eval", "ensemble"),
            threshold=config.threshold)
        results["ensemble"] = report.as_dict()
        reports["ensemble"] = report
    except SentinelError as exc:
        results["ensemble"] = {"error": str(exc)}

    if not reports:
        raise EvaluationError("every configured model failed to evaluate")

    doc = {
        "config": config.echo(),
        "n_instances": len(dataset),
        "n_positive": dataset.n_positive,
        "models": results,
    }

    if config.out:
        os.makedirs(config.out, exist_ok=True)
        written = []

        report_path = os.path.join(config.out, "report.json")
        with open(report_path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(report_path)

        # the headline ROC belongs to the ensemble; fall back to the best
        # surviving model when the vote itself failed
        curve_name = "ensemble" if "ensemble" in reports else \
            max(reports, key=lambda n: reports[n].pooled_auc or 0.0)
        rep = reports[curve_name]
        mask = rep.evaluated_mask
        curve = roc_auc(rep.pooled_scores[mask], bundle.y[mask])
        csv_path = os.path.join(config.out, "roc.csv")
        curve.to_csv(csv_path)
        written.append(csv_path)
        svg_path = os.path.join(config.out, "roc.svg")
        render_roc_svg(curve, svg_path)
        written.append(svg_path)

        model_dir = os.path.join(config.out, "models")
        os.makedirs(model_dir, exist_ok=True)
        written += save_final_models(bundle, config, model_dir)

        write_manifest(config.out, "train-eval", config.echo(), config.seed,
                       written)
    return doc


def save_final_models(bundle, config, model_dir):
    """Fit each evaluated model on the full dataset and persist it."""
    from .artifacts import save_model

    written = []
    names = list(config.models)
    if config.boost:
        names += [BOOSTED_PREFIX + m for m in config.models]
    specs = [(n, *resolve_factory(n, config)) for n in names]
    specs.append(("ensemble", ensemble_factory(config), "bundle"))
    for name, factory, view in specs:
        try:
            model = factory(derive_seed(config.seed, "final", name))
            model.fit(bundle.view(view), bundle.y)
        except SentinelError:
            continue
        path = os.path.join(model_dir, f"{name}.json")
        save_model(model, path)
        written.append(path)
    return written


def format_table(doc):
    """Tabulate accuracy and ROC area per model from a result document."""
    rows = [("model", "accuracy", "mean accuracy", "area under ROC")]
    for name, payload in doc["models"].items():
        if "error" in payload:
            rows.append((name, "failed", "", payload["error"][:40]))
            continue
        auc = payload["pooled_auc"]
        rows.append((name,
                     f"{payload['pooled_accuracy']:.4f}",
                     f"{payload['mean_accuracy']:.4f}",
                     "n/a" if auc is None else f"{auc:.4f}"))
    widths = [max(len(r[c]) for r in rows) for c in range(4)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[c])
                               for c, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * widths[c] for c in range(4)))
    return "\n".join(lines)
