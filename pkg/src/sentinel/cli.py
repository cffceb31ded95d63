"""Command-line entry point.

Subcommands: generate, validate, preprocess, train-eval, report.

Options resolve in three layers: built-in defaults, then a flat key=value
config file given with --config, then explicit command-line flags.  The
SENTINEL_SEED environment variable outranks all three for the master seed.

Config file grammar: one ``key = value`` per line, ``#`` starts a comment,
blank lines ignored.  Keys are the long option names with dashes or
underscores.  Model hyperparameters use dotted keys, e.g.::

    seed = 7
    models = nb, rf
    model.rf.n_trees = 200
"""

import argparse
import json
import os
import sys
from datetime import date

from . import datagen, features, pipeline
from .errors import ConfigError, SentinelError

ENV_SEED = "SENTINEL_SEED"


def parse_bool(text):
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_list(text):
    if isinstance(text, (list, tuple)):
        return tuple(text)
    items = [part.strip() for part in str(text).split(",")]
    return tuple(part for part in items if part)


def parse_date(text):
    try:
        return date.fromisoformat(str(text))
    except ValueError as exc:
        raise ConfigError(f"not a date (YYYY-MM-DD): {text!r}") from exc


def load_config_file(path):
    """Parse the flat key=value grammar into {key: raw-string}."""
    values = {}
    hyper = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(
                        f"{path}:{line_no}: expected key = value, got {raw!r}")
                key, value = line.split("=", 1)
                key = key.strip().replace("-", "_")
                value = value.strip()
                if key.startswith("model."):
                    parts = key.split(".")
                    if len(parts) != 3 or not parts[1] or not parts[2]:
                        raise ConfigError(
                            f"{path}:{line_no}: hyperparameter keys look "
                            "like model.<name>.<param>")
                    try:
                        parsed = json.loads(value)
                    except json.JSONDecodeError:
                        parsed = value
                    hyper.setdefault(parts[1], {})[parts[2]] = parsed
                else:
                    values[key] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return values, hyper


def resolve(args, file_values, defaults, coercers):
    """Merge CLI > config file > defaults into one options dict."""
    out = {}
    for key, default in defaults.items():
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            out[key] = cli_value
        elif key in file_values:
            coerce = coercers.get(key, str)
            try:
                out[key] = coerce(file_values[key])
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"bad config value for {key}: {file_values[key]!r} "
                    f"({exc})") from exc
        else:
            out[key] = default
    extra = set(file_values) - set(defaults)
    if extra:
        raise ConfigError(
            f"unknown config keys for this command: {sorted(extra)}")
    return out


def apply_env_seed(opts):
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return opts
    try:
        opts["seed"] = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_SEED} must be an integer, got {raw!r}")
    return opts


GENERATE_DEFAULTS = {
    "seed": 0,
    "users": 1000,
    "insiders": 30,
    "start": date(2010, 1, 1),
    "end": date(2010, 7, 31),
    "device_fraction": 0.25,
    "work_start": 8,
    "work_end": 17,
    "jitter": 30.0,
    "attack_days": 3,
}
GENERATE_COERCERS = {
    "seed": int, "users": int, "insiders": int,
    "start": parse_date, "end": parse_date,
    "device_fraction": float, "work_start": int, "work_end": int,
    "jitter": float, "attack_days": int,
}

PREPROCESS_DEFAULTS = {
    "seed": 0,
    "k": 7,
    "ratio": 15.0,
    "subsample": True,
    "strict": False,
}
PREPROCESS_COERCERS = {
    "seed": int, "k": int, "ratio": float,
    "subsample": parse_bool, "strict": parse_bool,
}

TRAIN_DEFAULTS = {
    "seed": 0,
    "models": ("nb", "lr", "dt", "rf", "svm", "mlp"),
    "boost": True,
    "t_max": 10,
    "members": pipeline.DEFAULT_MEMBERS,
    "weight_mode": "accuracy",
    "inner_folds": 5,
    "cv": 10,
    "threshold": 0.5,
}
TRAIN_COERCERS = {
    "seed": int, "models": parse_list, "boost": parse_bool, "t_max": int,
    "members": parse_list, "weight_mode": str, "inner_folds": int,
    "cv": int, "threshold": float,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sentinel",
        description="Synthetic insider-threat corpus generation, feature "
                    "extraction, model training and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic log corpus")
    gen.add_argument("--out", required=True, help="corpus output directory")
    gen.add_argument("--config", help="flat key=value config file")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--users", type=int)
    gen.add_argument("--insiders", type=int)
    gen.add_argument("--start", type=parse_date, metavar="YYYY-MM-DD")
    gen.add_argument("--end", type=parse_date, metavar="YYYY-MM-DD")
    gen.add_argument("--device-fraction", type=float, dest="device_fraction")
    gen.add_argument("--work-start", type=int, dest="work_start")
    gen.add_argument("--work-end", type=int, dest="work_end")
    gen.add_argument("--jitter", type=float, help="logon jitter in minutes")
    gen.add_argument("--attack-days", type=int, dest="attack_days")

    val = sub.add_parser("validate", help="check a corpus for defects")
    val.add_argument("corpus", help="corpus directory")

    pre = sub.add_parser("preprocess",
                         help="turn a corpus into labeled daily instances")
    pre.add_argument("--corpus", required=True)
    pre.add_argument("--month", required=True, metavar="YYYY-MM")
    pre.add_argument("--out", required=True)
    pre.add_argument("--config", help="flat key=value config file")
    pre.add_argument("--seed", type=int)
    pre.add_argument("--k", type=int, help="psychometric cluster count")
    pre.add_argument("--ratio", type=float,
                     help="negative:positive subsample ratio")
    pre.add_argument("--subsample", action=argparse.BooleanOptionalAction)
    pre.add_argument("--strict", action=argparse.BooleanOptionalAction,
                     help="fail on corpus validation findings")

    train = sub.add_parser("train-eval",
                           help="cross-validate models over instances")
    train.add_argument("--instances", required=True,
                       help="directory holding instances.csv")
    train.add_argument("--out", required=True)
    train.add_argument("--config", help="flat key=value config file")
    train.add_argument("--seed", type=int)
    train.add_argument("--models", type=parse_list,
                       help="comma-separated model names")
    train.add_argument("--boost", action=argparse.BooleanOptionalAction,
                       help="also evaluate the boosted variants")
    train.add_argument("--t-max", type=int, dest="t_max",
                       help="boosting round budget")
    train.add_argument("--members", type=parse_list,
                       help="ensemble member names")
    train.add_argument("--weight-mode", dest="weight_mode",
                       choices=("accuracy", "uniform"))
    train.add_argument("--inner-folds", type=int, dest="inner_folds")
    train.add_argument("--cv", type=int, help="cross-validation folds")
    train.add_argument("--threshold", type=float)

    rep = sub.add_parser("report", help="print the table from a finished run")
    rep.add_argument("run", help="train-eval output directory")

    return parser


def cmd_generate(args):
    file_values, hyper = ({}, {}) if not args.config else \
        load_config_file(args.config)
    if hyper:
        raise ConfigError("generate takes no model.* config keys")
    opts = apply_env_seed(resolve(args, file_values, GENERATE_DEFAULTS,
                                  GENERATE_COERCERS))
    gen_config = datagen.GenConfig(
        seed=opts["seed"],
        n_users=opts["users"],
        start_date=opts["start"],
        end_date=opts["end"],
        n_insiders=opts["insiders"],
        fraction_device_users=opts["device_fraction"],
        work_hours=(opts["work_start"], opts["work_end"]),
        logon_jitter_minutes=opts["jitter"],
        attack_days=opts["attack_days"],
    )
    summary = pipeline.run_generate(gen_config, args.out)
    print(json.dumps({
        "out": summary.out_dir,
        "months": summary.months,
        "insiders": len(summary.insider_ids),
        "rows": summary.row_counts,
    }, sort_keys=True))
    return 0


def cmd_validate(args):
    report = datagen.validate_corpus(args.corpus)
    for violation in report.violations:
        print(violation)
    print(f"checked {report.rows_checked} rows: "
          f"{len(report.violations)} violation(s)")
    return 0 if report.ok else 1


def cmd_preprocess(args):
    file_values, hyper = ({}, {}) if not args.config else \
        load_config_file(args.config)
    if hyper:
        raise ConfigError("preprocess takes no model.* config keys")
    opts = apply_env_seed(resolve(args, file_values, PREPROCESS_DEFAULTS,
                                  PREPROCESS_COERCERS))

    validation = datagen.validate_corpus(args.corpus)
    for violation in validation.violations:
        print(f"corpus: {violation}", file=sys.stderr)
    if validation.violations and opts["strict"]:
        print("error: corpus failed validation under --strict",
              file=sys.stderr)
        return 1

    config = pipeline.RunConfig(
        corpus=args.corpus, month=args.month, out=args.out,
        seed=opts["seed"], k_clusters=opts["k"], ratio=opts["ratio"],
        subsample=opts["subsample"])
    dataset = pipeline.run_preprocess(config)
    print(json.dumps({
        "instances": len(dataset),
        "positives": dataset.n_positive,
        "users": dataset.provenance.get("retained_users"),
    }, sort_keys=True))
    return 0


def cmd_train_eval(args):
    file_values, hyper = ({}, {}) if not args.config else \
        load_config_file(args.config)
    opts = apply_env_seed(resolve(args, file_values, TRAIN_DEFAULTS,
                                  TRAIN_COERCERS))
    config = pipeline.RunConfig(
        corpus="", month="", out=args.out, seed=opts["seed"],
        models=tuple(opts["models"]), boost=opts["boost"],
        t_max=opts["t_max"], members=tuple(opts["members"]),
        weight_mode=opts["weight_mode"], inner_folds=opts["inner_folds"],
        cv=opts["cv"], threshold=opts["threshold"], hyper=hyper)
    dataset = features.load_instances(args.instances)
    doc = pipeline.train_eval(dataset, config)
    print(pipeline.format_table(doc))
    print(f"report written to {os.path.join(args.out, 'report.json')}")
    return 0


def cmd_report(args):
    path = os.path.join(args.run, "report.json")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return 1
    print(pipeline.format_table(doc))
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "validate": cmd_validate,
    "preprocess": cmd_preprocess,
    "train-eval": cmd_train_eval,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SentinelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
