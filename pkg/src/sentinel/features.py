"""Daily behavioral features from activity logs.

Reduces a corpus to one instance per (device-using employee, active day):

  * p_logon: how typical today's first logon time is for this user, as the
    two-sided normal tail probability of its Z-score against the user's
    own logon history,
  * p_device: the user's share of all device-connect events, recorded only
    on days the user actually connected a device (else 0),
  * employment flags for the instance month and the following month,
  * the user's personality cluster from k-means over big-five scores,
  * a label from the ground-truth answers file.

The build is two streaming passes (device counts, then daily first-logon
times); per-user aggregates are the only state kept, so corpus size does
not bound memory.
"""

import json
import math
import os
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .errors import (
    ConfigError,
    DataError,
    DegenerateDataError,
    EmptyClassError,
    RangeError,
    UndefinedStatisticError,
)
from .seeding import derive_rng
from . import ingest

INSTANCES_HEADER = ("user,date,p_logon,p_device,employed_this_month,"
                    "employed_next_month,psych_cluster,label")


def device_probability(u, t):
    """Share of all device-connect events belonging to one user: U/T."""
    if t <= 0:
        raise UndefinedStatisticError(
            "no device-connect events in the corpus (T = 0)")
    if u < 0 or u > t:
        raise DataError(f"connect count U={u} outside [0, T={t}]")
    return u / t


def logon_zscore(xbar, mu, sigma, n):
    """Z = (x̄ − μ) / (σ/√n) for a day's logon time against user history."""
    if n < 1:
        raise DataError("z-score needs at least one historical measurement")
    if sigma < 0:
        raise DataError("negative standard deviation")
    if sigma == 0:
        raise DegenerateDataError(
            "zero logon-time spread; tail probability is 1 at the mean, else 0")
    return (xbar - mu) / (sigma / math.sqrt(n))


def zscore_to_probability(z):
    """Two-sided tail probability 2·(1 − Φ(|z|)) of a standard normal."""
    if not math.isfinite(z):
        raise DataError("z-score must be finite")
    return math.erfc(abs(z) / math.sqrt(2.0))


def logon_probability(xbar, mu, sigma, n):
    """Tail probability of a day's logon time, with the σ=0 limit applied."""
    try:
        z = logon_zscore(xbar, mu, sigma, n)
    except DegenerateDataError:
        return 1.0 if xbar == mu else 0.0
    return zscore_to_probability(z)


@dataclass(frozen=True)
class UserStats:
    """Per-user aggregates over the whole corpus period."""

    user_id: str
    device_connects: int
    logon_mean: float
    logon_stddev: float
    logon_count: int
    psych_cluster: int


@dataclass(frozen=True)
class DailyInstance:
    user_id: str
    date: date
    p_logon: float
    p_device: float
    employed_this_month: bool
    employed_next_month: bool
    psych_cluster: int
    label: bool


@dataclass
class Dataset:
    instances: list
    k_clusters: int
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.instances)

    @property
    def n_positive(self):
        return sum(1 for inst in self.instances if inst.label)

    def labels(self):
        return np.array([inst.label for inst in self.instances], dtype=np.int8)


def cluster_psychometrics(profiles, k=7, seed=0):
    """Lloyd k-means on the big-five vectors; returns (user→cluster, centroids)."""
    if not profiles:
        raise ConfigError("no psychometric profiles to cluster")
    X = np.array([p.scores for p in profiles], dtype=float)
    distinct = np.unique(X, axis=0)
    if not 1 <= k <= len(distinct):
        raise ConfigError(
            f"k={k} must be in [1, {len(distinct)}] (distinct profiles)")

    rng = derive_rng(seed, "kmeans")
    centroids = distinct[rng.choice(len(distinct), size=k, replace=False)]
    assign = None
    for _ in range(100):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        for c in range(k):
            if not (new_assign == c).any():
                # revive an empty cluster with the worst-fit point
                worst = int(d2[np.arange(len(X)), new_assign].argmax())
                new_assign[worst] = c
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            centroids[c] = X[assign == c].mean(axis=0)
    mapping = {p.user_id: int(c) for p, c in zip(profiles, assign)}
    return mapping, centroids


def _scan_devices(corpus_dir, first_ord, last_ord):
    """One pass over device.csv: per-user connect counts, the global total,
    and the set of (user, day) pairs with a connect inside the target month."""
    connects = {}
    total = 0
    month_days = set()
    path = os.path.join(corpus_dir, "device.csv")
    for event in ingest.parse_log_file(path, ingest.SourceKind.DEVICE,
                                       errors=ingest.RowErrorCollector()):
        if event.kind is not ingest.EventKind.DEVICE_CONNECT:
            continue
        total += 1
        connects[event.user_id] = connects.get(event.user_id, 0) + 1
        ordinal = event.timestamp.toordinal()
        if first_ord <= ordinal <= last_ord:
            month_days.add((event.user_id, ordinal))
    return connects, total, month_days


def _scan_logons(corpus_dir):
    """One pass over logon.csv: earliest logon minute per (user, day)."""
    daily_first = {}
    path = os.path.join(corpus_dir, "logon.csv")
    for event in ingest.parse_log_file(path, ingest.SourceKind.LOGON,
                                       errors=ingest.RowErrorCollector()):
        if event.kind is not ingest.EventKind.LOGON:
            continue
        ts = event.timestamp
        minute = ts.hour * 60 + ts.minute + ts.second / 60.0
        key = (event.user_id, ts.toordinal())
        prev = daily_first.get(key)
        if prev is None or minute < prev:
            daily_first[key] = minute
    return daily_first


def _logon_stats(daily_first):
    """Welford accumulation of the daily first-logon values per user."""
    acc = {}
    for (user, _ordinal), minute in daily_first.items():
        n, mean, m2 = acc.get(user, (0, 0.0, 0.0))
        n += 1
        delta = minute - mean
        mean += delta / n
        m2 += delta * (minute - mean)
        acc[user] = (n, mean, m2)
    return {user: (n, mean, math.sqrt(m2 / n)) for user, (n, mean, m2) in acc.items()}


def _label_window(answer):
    """Calendar dates an attack window covers; pre-06:00 times belong to the
    prior day's session."""
    start, end = answer.start, answer.end
    first = start.date() if start.hour >= 6 else start.date() - timedelta(days=1)
    last = end.date() if end.hour >= 6 else end.date() - timedelta(days=1)
    if last < first:
        last = first
    return first, last


def compute_user_stats(corpus_dir, k=7, seed=0):
    """UserStats for every user with any logon or connect, plus global T."""
    profiles = ingest.load_psychometrics(os.path.join(corpus_dir, "psychometric.csv"))
    clusters, _ = cluster_psychometrics(profiles, k=k, seed=seed)
    connects, total, _ = _scan_devices(corpus_dir, 1, 0)
    stats_by_user = _logon_stats(_scan_logons(corpus_dir))
    out = {}
    for user in sorted(set(connects) | set(stats_by_user)):
        n, mean, sigma = stats_by_user.get(user, (0, 0.0, 0.0))
        out[user] = UserStats(
            user_id=user,
            device_connects=connects.get(user, 0),
            logon_mean=mean,
            logon_stddev=sigma,
            logon_count=n,
            psych_cluster=clusters.get(user, -1),
        )
    return out, total


def build_instances(corpus_dir, month, k=7, seed=0):
    """One labeled DailyInstance per (device-using employee, active day in month)."""
    corpus_dir = str(corpus_dir)
    months = ingest.load_employee_months(os.path.join(corpus_dir, "LDAP"))
    following = ingest.next_month(month)
    if month not in months or following not in months:
        raise RangeError(
            f"month {month} needs employee records for itself and {following}; "
            f"corpus has {sorted(months) or 'none'}")

    profiles = ingest.load_psychometrics(os.path.join(corpus_dir, "psychometric.csv"))
    clusters, _ = cluster_psychometrics(profiles, k=k, seed=seed)
    answers = ingest.load_answers(os.path.join(corpus_dir, "answers.csv"))
    windows = {}
    for ans in answers:
        first, last = _label_window(ans)
        windows[ans.user_id] = (first.toordinal(), last.toordinal())

    year, mon = int(month[:4]), int(month[5:7])
    first_ord = date(year, mon, 1).toordinal()
    next_year, next_mon = int(following[:4]), int(following[5:7])
    last_ord = date(next_year, next_mon, 1).toordinal() - 1

    connects, total, month_connect_days = _scan_devices(corpus_dir, first_ord, last_ord)
    if total == 0:
        raise UndefinedStatisticError(
            "corpus has no device-connect events; device probability undefined")
    daily_first = _scan_logons(corpus_dir)
    stats_by_user = _logon_stats(daily_first)

    this_record = months[month]
    next_record = months[following]

    instances = []
    for (user, ordinal), xbar in sorted(daily_first.items()):
        if not first_ord <= ordinal <= last_ord:
            continue
        u = connects.get(user, 0)
        if u == 0:
            continue  # only employees who have used a device are kept
        if user not in clusters:
            raise DataError(f"user {user} has activity but no psychometric profile")
        n, mean, sigma = stats_by_user[user]
        p_logon = logon_probability(xbar, mean, sigma, n)
        if (user, ordinal) in month_connect_days:
            p_device = device_probability(u, total)
        else:
            p_device = 0.0
        window = windows.get(user)
        label = window is not None and window[0] <= ordinal <= window[1]
        instances.append(DailyInstance(
            user_id=user,
            date=date.fromordinal(ordinal),
            p_logon=p_logon,
            p_device=p_device,
            employed_this_month=user in this_record,
            employed_next_month=user in next_record,
            psych_cluster=clusters[user],
            label=label,
        ))

    provenance = {"corpus": os.path.basename(os.path.normpath(corpus_dir)),
                  "month": month, "k": k, "seed": seed}
    return Dataset(instances=instances, k_clusters=k, provenance=provenance)


def spread_subsample(dataset, ratio=15.0, seed=0):
    """Keep every positive; sample negatives down to ⌊ratio · positives⌋."""
    if ratio < 1:
        raise ConfigError("subsample ratio must be at least 1")
    pos_idx = [i for i, inst in enumerate(dataset.instances) if inst.label]
    neg_idx = [i for i, inst in enumerate(dataset.instances) if not inst.label]
    if not pos_idx:
        raise EmptyClassError("dataset has no positive instances to anchor "
                              "the subsample")
    keep = min(int(ratio * len(pos_idx)), len(neg_idx))
    rng = derive_rng(seed, "subsample")
    chosen = rng.choice(len(neg_idx), size=keep, replace=False)
    selected = set(pos_idx)
    selected.update(neg_idx[i] for i in chosen)
    instances = [inst for i, inst in enumerate(dataset.instances) if i in selected]
    provenance = dict(dataset.provenance)
    provenance["subsample_ratio"] = ratio
    provenance["subsample_seed"] = seed
    return Dataset(instances=instances, k_clusters=dataset.k_clusters,
                   provenance=provenance)


def save_instances(dataset, out_dir):
    """Write instances.csv and its meta.json sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "instances.csv")
    with open(path, "w") as fh:
        fh.write(INSTANCES_HEADER + "\n")
        for inst in dataset.instances:
            fh.write(f"{inst.user_id},{inst.date.isoformat()},"
                     f"{inst.p_logon!r},{inst.p_device!r},"
                     f"{int(inst.employed_this_month)},"
                     f"{int(inst.employed_next_month)},"
                     f"{inst.psych_cluster},{int(inst.label)}\n")
    meta = dict(dataset.provenance)
    meta["k_clusters"] = dataset.k_clusters
    meta["n_instances"] = len(dataset)
    meta["n_positive"] = dataset.n_positive
    with open(os.path.join(out_dir, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def load_instances(in_dir):
    path = os.path.join(in_dir, "instances.csv")
    meta_path = os.path.join(in_dir, "meta.json")
    with open(meta_path) as fh:
        meta = json.load(fh)
    k = meta.pop("k_clusters")
    meta.pop("n_instances", None)
    meta.pop("n_positive", None)
    instances = []
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != INSTANCES_HEADER:
            raise DataError(f"{path}: unexpected header {header!r}")
        for line in fh:
            user, day, p_logon, p_device, emp_this, emp_next, cluster, label = \
                line.rstrip("\n").split(",")
            instances.append(DailyInstance(
                user_id=user,
                date=date.fromisoformat(day),
                p_logon=float(p_logon),
                p_device=float(p_device),
                employed_this_month=emp_this == "1",
                employed_next_month=emp_next == "1",
                psych_cluster=int(cluster),
                label=label == "1",
            ))
    return Dataset(instances=instances, k_clusters=k, provenance=meta)


class FeatureBundle:
    """Row-aligned matrix views of a Dataset.

    numeric: [p_logon, p_device, employed_this, employed_next, one-hot cluster]
    tree:    [p_logon, p_device, employed_this, employed_next, cluster index]

    The tree view keeps the cluster as a single nominal column (index 4);
    everything else consumes the one-hot numeric view.
    """

    TREE_CATEGORICAL = (4,)

    def __init__(self, numeric, tree, y, k_clusters):
        self.numeric = numeric
        self.tree = tree
        self.y = y
        self.k_clusters = k_clusters

    def __len__(self):
        return len(self.y)

    def subset(self, idx):
        return FeatureBundle(self.numeric[idx], self.tree[idx], self.y[idx],
                             self.k_clusters)

    def view(self, name):
        if name == "numeric":
            return self.numeric
        if name == "tree":
            return self.tree
        if name == "bundle":
            return self
        raise ValueError(f"unknown feature view {name!r}")

    @property
    def numeric_names(self):
        base = ["p_logon", "p_device", "employed_this_month", "employed_next_month"]
        return base + [f"cluster_{i}" for i in range(self.k_clusters)]

    @property
    def tree_names(self):
        return ["p_logon", "p_device", "employed_this_month",
                "employed_next_month", "psych_cluster"]


def to_bundle(dataset):
    n = len(dataset)
    k = dataset.k_clusters
    tree = np.zeros((n, 5))
    numeric = np.zeros((n, 4 + k))
    y = np.zeros(n, dtype=np.int8)
    for i, inst in enumerate(dataset.instances):
        row = (inst.p_logon, inst.p_device,
               float(inst.employed_this_month), float(inst.employed_next_month))
        tree[i, :4] = row
        tree[i, 4] = inst.psych_cluster
        numeric[i, :4] = row
        numeric[i, 4 + inst.psych_cluster] = 1.0
        y[i] = inst.label
    return FeatureBundle(numeric, tree, y, k)
