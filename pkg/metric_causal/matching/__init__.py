#!/usr/bin/env python3

import metric_causal.utils.logging as logging

from .distance import DEFAULT_RIDGE, rank_mahalanobis  # noqa
from .full_match import DEFAULT_CALIPER, MatchResult, full_match_caliper, standardized_differences  # noqa
from .propensity import PropensityModel, estimate_propensity  # noqa

logger = logging.get_logger(__name__)


def match_units(covariates, z, caliper=DEFAULT_CALIPER, ridge=DEFAULT_RIDGE, names=None):
    """
    Propensity model, rank Mahalanobis distances and greedy full matching in
    one call.
    Returns:
        result (MatchResult): matched sets with a balance report.
    """
    model = estimate_propensity(covariates, z)
    dist = rank_mahalanobis(covariates, ridge=ridge)
    return full_match_caliper(
        dist, model.fitted_scores, z, caliper=caliper, covariates=covariates, names=names
    )


def match_strata(covariates, z, caliper=DEFAULT_CALIPER, ridge=DEFAULT_RIDGE):
    """Matched-set labels with 0 for unmatched units (bootstrap rematching)."""
    return match_units(covariates, z, caliper=caliper, ridge=ridge).stratum_of


def match_dataset(data, caliper=DEFAULT_CALIPER, ridge=DEFAULT_RIDGE, names=None):
    """
    Replaces the strata of `data` by matched sets, drops unmatched units and
    sets lambda_hat to the matched-set shares m^s / N.
    Returns:
        matched (StratifiedDataset): matched units.
        result (MatchResult): matching diagnostics.
    """
    result = match_units(data.x, data.z, caliper=caliper, ridge=ridge, names=names)
    rows = result.matched
    if result.unmatched:
        logger.info("Dropping {} unmatched units".format(len(result.unmatched)))
    return data.select(rows, result.stratum_of[rows]), result
