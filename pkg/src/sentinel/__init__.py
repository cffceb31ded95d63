"""Insider-threat detection over synthetic organizational logs.

The pipeline: generate (or ingest) activity logs, reduce them to one
behavioral instance per user-day, train a panel of from-scratch
classifiers plus boosted variants, and combine the best into a
probability-vote meta-learner.
"""

__version__ = "0.1.0"
