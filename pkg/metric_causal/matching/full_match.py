#!/usr/bin/env python3

"""Greedy caliper-constrained full matching and covariate balance."""

from dataclasses import dataclass, field
from typing import Dict, Optional
import numpy as np
import pandas as pd

import metric_causal.utils.logging as logging
from metric_causal.utils.errors import MatchingError, ValidationError

from .propensity import SCORE_FLOOR

logger = logging.get_logger(__name__)

DEFAULT_CALIPER = 0.2
NO_CONTROL = "no control within caliper"
NO_TREATED = "no treated unit within caliper"


@dataclass(frozen=True, eq=False)
class MatchResult:
    """
    Matched-set labels 1..n_sets per unit, 0 for unmatched units whose
    reason is kept in `unmatched`.
    """

    stratum_of: np.ndarray
    z: np.ndarray = field(repr=False)
    n_sets: int
    unmatched: Dict[int, str] = field(default_factory=dict)
    balance_report: Optional[pd.DataFrame] = field(default=None, repr=False)

    def __post_init__(self):
        for label in range(1, self.n_sets + 1):
            members = self.z[self.stratum_of == label]
            if members.size == 0 or members.min() != 0 or members.max() != 1:
                raise MatchingError("Matched set {} does not hold both treatment groups".format(label))
        unlabelled = set(np.flatnonzero(self.stratum_of == 0).tolist())
        if unlabelled != set(self.unmatched):
            raise MatchingError(
                "Units {} carry label 0 but unmatched reasons cover {}".format(
                    sorted(unlabelled), sorted(self.unmatched)
                )
            )

    @property
    def matched(self):
        return np.flatnonzero(self.stratum_of > 0)


def _logit(scores):
    scores = np.clip(np.asarray(scores, dtype=np.float64), SCORE_FLOOR, 1.0 - SCORE_FLOOR)
    return np.log(scores / (1.0 - scores))


def _nearest(dist_row, candidates):
    # argmin keeps the first index on ties, i.e. unit order.
    return candidates[np.argmin(dist_row[candidates])]


def full_match_caliper(dist, scores, z, caliper=DEFAULT_CALIPER, covariates=None, names=None):
    """
    Greedy full matching. Treated units, in descending propensity order,
    open a set with their nearest free control inside the caliper or else
    join the set of their nearest matched control inside the caliper.
    Controls left over join the set of their nearest matched treated unit.
    Args:
        dist (array): N x N unit distances.
        scores (array): propensity scores in (0, 1).
        z (array): treatment flags.
        caliper (float): width in standard deviations of the logit score.
        covariates (array): optional N x k covariates for the balance report.
        names (list): covariate names for the report.
    Returns:
        result (MatchResult): matched sets and unmatched units.
    """
    dist = np.asarray(dist, dtype=np.float64)
    z = np.asarray(z).astype(np.int64).reshape(-1)
    n = z.size
    if dist.shape != (n, n):
        raise ValidationError("Distance matrix must be {0} x {0}, got {1}".format(n, dist.shape))
    if caliper <= 0:
        raise ValidationError("Caliper must be positive, got {}".format(caliper))
    logit = _logit(scores)
    if logit.size != n:
        raise ValidationError("Scores and z have different lengths")
    width = caliper * (np.std(logit, ddof=1) if n > 1 else 0.0)
    eligible = np.abs(logit[:, None] - logit[None, :]) <= width

    stratum_of = np.zeros(n, dtype=np.int64)
    unmatched = {}
    n_sets = 0
    controls = np.flatnonzero(z == 0)
    treated = np.flatnonzero(z == 1)
    for t in treated[np.argsort(-logit[treated], kind="stable")]:
        reachable = controls[eligible[t, controls]]
        free = reachable[stratum_of[reachable] == 0]
        if free.size:
            n_sets += 1
            stratum_of[t] = stratum_of[_nearest(dist[t], free)] = n_sets
        elif reachable.size:
            stratum_of[t] = stratum_of[_nearest(dist[t], reachable)]
        else:
            unmatched[int(t)] = NO_CONTROL
    if n_sets == 0:
        raise MatchingError(
            "No treated-control pair lies within a caliper of {} sd; try a larger caliper".format(caliper)
        )
    anchors = treated[stratum_of[treated] > 0]
    for c in controls[stratum_of[controls] == 0]:
        reachable = anchors[eligible[c, anchors]]
        if reachable.size:
            stratum_of[c] = stratum_of[_nearest(dist[c], reachable)]
        else:
            unmatched[int(c)] = NO_TREATED
    logger.debug(
        "Full matching: {} sets, {} of {} units unmatched".format(n_sets, len(unmatched), n)
    )
    report = None
    if covariates is not None:
        report = standardized_differences(covariates, z, stratum_of, names=names)
    return MatchResult(
        stratum_of=stratum_of, z=z, n_sets=n_sets, unmatched=unmatched, balance_report=report
    )


def _pooled_sd(x, z):
    return np.sqrt(0.5 * (np.var(x[z == 1], axis=0, ddof=1) + np.var(x[z == 0], axis=0, ddof=1)))


def _ratio(diff, sd):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = diff / sd
    return np.where(sd > 0, out, np.where(np.abs(diff) > 0, np.inf, 0.0))


def standardized_differences(covariates, z, stratum_of, names=None):
    """
    Per-covariate (mean_T - mean_C) / pooled sd before matching, and after
    matching with group means averaged over matched sets by their share of
    matched units. Both columns use the pre-matching pooled sd.
    Returns:
        report (DataFrame): indexed by covariate, columns `before`, `after`.
    """
    x = np.asarray(covariates, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    z = np.asarray(z).reshape(-1)
    stratum_of = np.asarray(stratum_of).reshape(-1)
    names = ["x{}".format(j + 1) for j in range(x.shape[1])] if names is None else list(names)
    sd = _pooled_sd(x, z)
    before = _ratio(x[z == 1].mean(axis=0) - x[z == 0].mean(axis=0), sd)

    labels = np.unique(stratum_of[stratum_of > 0])
    share = np.array([np.sum(stratum_of == label) for label in labels], dtype=np.float64)
    share /= share.sum()
    treated_mean = np.zeros(x.shape[1])
    control_mean = np.zeros(x.shape[1])
    for label, weight in zip(labels, share):
        in_set = stratum_of == label
        treated_mean += weight * x[in_set & (z == 1)].mean(axis=0)
        control_mean += weight * x[in_set & (z == 0)].mean(axis=0)
    after = _ratio(treated_mean - control_mean, sd)
    return pd.DataFrame({"before": before, "after": after}, index=pd.Index(names, name="covariate"))
