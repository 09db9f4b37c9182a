"""Reference values measured on the MSR 2014 mining-challenge GHTorrent subset.

These constants describe the dataset this toolkit was originally run
against. They are not bundled test oracles — the subset is too large to
ship — but when that dataset is available locally the optional
integration test replays the pipeline and checks the results against
these numbers (see ``tests/test_reference_dataset.py``).
"""

from __future__ import annotations

# Dataset inventory.
PROJECT_COUNT = 108718
ORIGINAL_PROJECT_COUNT = 91
USER_COUNT = 499485
ISSUE_COUNT = 150362
PULL_REQUEST_COUNT = 78955
COMMIT_COUNT = 555325

# Community composition: share of the average community willing to
# contribute code (members + collaborators + external contributors).
CONTRIBUTING_COMMUNITY_SHARE = 0.13

# External contribution analysis, averaged per project.
MEAN_EXTERNAL_ACCEPTANCE_RATE = 0.5947
MEAN_DECISION_DAYS = 231.70

# Time to become collaborator: distribution of per-project means (days).
PROMOTION_MEDIAN_DAYS = 147.83
PROMOTION_Q1_DAYS = 74.83
PROMOTION_Q3_DAYS = 225.05

# Highlighted example: elasticsearch's per-project mean sits above the box.
ELASTICSEARCH_PROMOTION_DAYS = 413.70

# Relative tolerance for the optional replay test (the quartile rule used
# for the published numbers was not recorded, so small drift is expected).
REPLAY_RELATIVE_TOLERANCE = 0.005
