"""Python bindings for the npsfuzz core."""

import json

from ._npsfuzz import (
    REPLAY_METRIC_ID,
    ConfigError,
    Error,
    InsufficientData,
    InvariantViolation,
    coverage_bitmap,
    default_seeds,
    execute,
    imbalance,
    mutate,
    pr_auc,
    rank_bytes,
    replay_coverage,
    should_retrain,
    targets,
)


def run_trial(target, seeds=None, config=None):
    """Runs one trial and returns the trial report as a dict."""
    if seeds is None:
        seeds = default_seeds(target)
    return json.loads(_npsfuzz.run_trial_json(target, list(seeds), json.dumps(config or {})))


def run_campaign(config):
    """Runs a campaign described by a dict and returns the summary report."""
    return json.loads(_npsfuzz.run_campaign_json(json.dumps(config)))


from . import _npsfuzz  # noqa: E402

__all__ = [
    "REPLAY_METRIC_ID",
    "ConfigError",
    "Error",
    "InsufficientData",
    "InvariantViolation",
    "coverage_bitmap",
    "default_seeds",
    "execute",
    "imbalance",
    "mutate",
    "pr_auc",
    "rank_bytes",
    "replay_coverage",
    "run_campaign",
    "run_trial",
    "should_retrain",
    "targets",
]
