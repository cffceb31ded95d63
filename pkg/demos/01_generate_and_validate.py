#!/usr/bin/env python3
"""Generate a small synthetic activity corpus and poke around in it.

The generator writes four CERT-style event logs (logon, device, http,
file), monthly LDAP snapshots, a psychometric table and a ground-truth
answers file. Insiders behave normally until their attack window, then
start logging on late at night, plugging in a removable drive and
uploading to a leak site, and finally disappear from the next month's
employee record.
"""

import csv
import shutil
from datetime import date
from pathlib import Path

from sentinel import pipeline
from sentinel.datagen import GenConfig, validate_corpus
from sentinel.ingest import load_answers

out = Path(__file__).resolve().parent / "out" / "corpus_tour"
shutil.rmtree(out, ignore_errors=True)

config = GenConfig(seed=7, n_users=80, n_insiders=4,
                   start_date=date(2010, 3, 1), end_date=date(2010, 5, 31),
                   fraction_device_users=0.35)
summary = pipeline.run_generate(config, out)

print(f"corpus written to {out}")
for name, rows in sorted(summary.row_counts.items()):
    print(f"  {name:12s} {rows:6d} rows")
print("months:", ", ".join(summary.months))
print("insiders:", ", ".join(summary.insider_ids))

# every insider comes with its implanted attack window in answers.csv
answers = load_answers(out / "answers.csv")
culprit = answers[0]
print(f"\nfirst answer row: {culprit.user_id} attacks "
      f"{culprit.start} .. {culprit.end}")

# show what that looks like in the raw logon log: the attack-day rows
# land after 22:00, far from the user's usual morning start
attack_day = culprit.start.strftime("%m/%d/%Y")
print(f"\n{culprit.user_id} logon rows on {attack_day}:")
with open(out / "logon.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["user"] == culprit.user_id and row["date"].startswith(attack_day):
            print(f"  {row['date']}  {row['pc']:8s} {row['activity']}")

print(f"\n{culprit.user_id} http rows on {attack_day}:")
with open(out / "http.csv", newline="") as fh:
    for row in csv.DictReader(fh):
        if row["user"] == culprit.user_id and row["date"].startswith(attack_day):
            print(f"  {row['date']}  {row['url']}")

report = validate_corpus(out)
print(f"\nvalidation: {report.rows_checked} rows checked, "
      f"{len(report.violations)} violations")

# sabotage a copy to show what the validator catches: an out-of-order
# event from a user no employee record has ever heard of
broken = out.parent / "corpus_broken"
shutil.rmtree(broken, ignore_errors=True)
shutil.copytree(out, broken)
with open(broken / "device.csv", "a") as fh:
    fh.write("{D9999999},01/01/2009 00:00:00,ZZZ9999,PC-0666,Connect\n")
    fh.write("this is not a csv row\n")
report = validate_corpus(broken)
print(f"after tampering with device.csv: {len(report.violations)} violations")
for line in report.violations:
    print(f"  {line}")
