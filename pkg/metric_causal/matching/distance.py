#!/usr/bin/env python3

"""Rank-based Mahalanobis distance."""

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

from metric_causal.utils.errors import ValidationError

DEFAULT_RIDGE = 1e-8


def rank_covariance(ranks):
    """
    Covariance of the rank columns with the variances of tied columns
    scaled up to the variance of untied ranks 1..N.
    """
    n = ranks.shape[0]
    cov = np.atleast_2d(np.cov(ranks, rowvar=False))
    untied = np.var(np.arange(1, n + 1), ddof=1)
    diag = np.diag(cov)
    scale = np.sqrt(untied / np.where(diag > 0, diag, untied))
    return cov * np.outer(scale, scale)


def rank_mahalanobis(covariates, ridge=DEFAULT_RIDGE):
    """
    Mahalanobis distances between units after replacing each covariate by
    its average-tie ranks.
    Args:
        covariates (array): N x k covariates.
        ridge (float): added to the diagonal when the rank covariance is
            singular.
    Returns:
        dist (ndarray): symmetric N x N matrix with zero diagonal.
    """
    covariates = np.asarray(covariates, dtype=np.float64)
    if covariates.ndim == 1:
        covariates = covariates[:, None]
    n, k = covariates.shape
    if n < 2:
        raise ValidationError("Rank Mahalanobis distance needs at least two units")
    if k == 0:
        return np.zeros((n, n))
    ranks = rankdata(covariates, axis=0)
    cov = rank_covariance(ranks)
    if np.linalg.matrix_rank(cov) < k:
        cov = cov + ridge * np.eye(k)
    dist = cdist(ranks, ranks, metric="mahalanobis", VI=np.linalg.inv(cov))
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist
