"""Random-forest models of stroke mortality and morbidity."""

import json as _json

from ._core import (
    Cohort,
    Forest,
    apply_exclusions,
    auc,
    auc_ci,
    filter_group,
    forest_from_json,
    generate_cohort,
    gini_impurity,
    ks_normality,
    load_cohort_csv,
    paired_t,
    roc_curve,
    shapiro_wilk,
    train_forest,
    welch_t,
    wilcoxon_signed_rank,
)
from . import _core

__version__ = "0.1.0"


def default_plan():
    """Default experiment plan as a dict."""
    return _json.loads(_core.default_plan())


def run_problem(cohort, plan=None, workers=1):
    """Run one (group, endpoint) problem; `plan` holds overrides of the defaults.

    Returns a dict with the per-fold "result" and its "aggregate".
    """
    return _json.loads(_core.run_problem(cohort, _json.dumps(plan or {}), workers))


def compare_groups(samples):
    """Normality checks and paired tests over named metric vectors."""
    return _json.loads(_core.compare_groups(list(samples.items())))


def summarize_cohort(cohort):
    return _json.loads(_core.summarize_cohort(cohort))
