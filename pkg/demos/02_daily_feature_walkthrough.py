#!/usr/bin/env python3
"""Rebuild one day's feature row from the raw logs by hand.

Each (user, day) instance carries two probabilities: how unusual the
day's first logon time is for that user, and the user's share of all
removable-device connects. This script recomputes both straight from
the CSV files and checks the pipeline produced the same numbers.
"""

import csv
import math
import shutil
from datetime import date, datetime
from pathlib import Path

from sentinel import pipeline
from sentinel.datagen import GenConfig
from sentinel.features import build_instances, spread_subsample

out = Path(__file__).resolve().parent / "out" / "feature_tour"
shutil.rmtree(out, ignore_errors=True)

config = GenConfig(seed=21, n_users=100, n_insiders=5,
                   start_date=date(2010, 3, 1), end_date=date(2010, 5, 31))
pipeline.run_generate(config, out)

dataset = build_instances(out, "2010-04", k=7, seed=0)
print(f"2010-04 instances: {len(dataset)} rows, {dataset.n_positive} positive")

inst = next(i for i in dataset.instances if i.label)
print(f"\npicked a labeled row: {inst.user_id} on {inst.date}")
print(f"  p_logon={inst.p_logon:.3e}  p_device={inst.p_device:.6f}  "
      f"cluster={inst.psych_cluster}  employed_next_month={inst.employed_next_month}")


def stamp(text):
    return datetime.strptime(text, "%m/%d/%Y %H:%M:%S")


# device share: this user's connects over all connects, whole corpus
mine = total = 0
with open(out / "device.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["activity"] != "Connect":
            continue
        total += 1
        mine += row["user"] == inst.user_id
print(f"\ndevice share by hand: {mine}/{total} = {mine / total:.6f}")
assert inst.p_device == mine / total

# logon oddity: minutes-into-day of the first logon per day, one history
# per user, then a one-sample z-test of the chosen day against it
firsts = {}
with open(out / "logon.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["activity"] != "Logon" or row["user"] != inst.user_id:
            continue
        ts = stamp(row["date"])
        minute = ts.hour * 60 + ts.minute + ts.second / 60.0
        key = ts.date()
        firsts[key] = min(minute, firsts.get(key, 1e9))

history = list(firsts.values())
n = len(history)
mean = sum(history) / n
sigma = math.sqrt(sum((v - mean) ** 2 for v in history) / n)
xbar = firsts[inst.date]
z = (xbar - mean) / (sigma / math.sqrt(n))
p = math.erfc(abs(z) / math.sqrt(2.0))
print(f"logon history: n={n} mean={mean:.1f}min sigma={sigma:.1f}min")
print(f"attack day starts at {xbar:.1f}min -> z={z:.2f}, tail p={p:.3e}")
assert abs(p - inst.p_logon) < 1e-12

# the usual next step squashes the class imbalance while keeping every
# positive: negatives are sampled evenly across the probability range
balanced = spread_subsample(dataset, ratio=15.0, seed=0)
print(f"\nafter spread subsampling at ratio 15: {len(balanced)} rows, "
      f"{balanced.n_positive} positive")
