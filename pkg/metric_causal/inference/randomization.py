#!/usr/bin/env python3

"""Randomization test of Fisher's sharp null by within-stratum permutation."""

from dataclasses import dataclass
from functools import partial
import numpy as np

import metric_causal.utils.logging as logging
import metric_causal.utils.misc as misc
from metric_causal.estimation.estimands import effect_from_arrays
from metric_causal.estimation.frechet import SolverOptions, check_alpha
from metric_causal.geometry import build_manifold
from metric_causal.utils.errors import ValidationError

logger = logging.get_logger(__name__)

# Permuted statistics within this distance of the observed one count as ties.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    p_value: float
    permutations: int
    method: str = "within-stratum-permutation"


def add_one_p_value(observed, permuted):
    """(#{permuted >= observed} + 1) / (n + 1)."""
    permuted = np.asarray(permuted, dtype=np.float64)
    exceed = int(np.sum(permuted >= observed - TIE_TOLERANCE))
    return (exceed + 1.0) / (permuted.size + 1.0)


def permute_within_strata(z, s, rng):
    """Uniform reassignment keeping the treated count of every stratum."""
    out = z.copy()
    for stratum in np.unique(s):
        members = np.flatnonzero(s == stratum)
        if members.size > 1:
            out[members] = rng.permutation(z[members])
    return out


def _permuted_statistic(data, alpha, opts, seed, index):
    z = permute_within_strata(data.z, data.s, misc.replicate_rng(seed, index))
    manifold = build_manifold(data.kind)
    return effect_from_arrays(manifold, data.r, z, data.s, data.lambda_hat, alpha, opts).value


def randomization_test(data, alpha, n_perm=1000, rng=None, opts=None, workers=1):
    """
    Holds outcomes and strata fixed, redraws the treatment assignment within
    strata `n_perm` times and compares T_alpha with its permutation
    distribution. Permutation i uses its own stream keyed by i under one seed
    taken from `rng`.
    Args:
        data (StratifiedDataset): observed units.
        alpha (int): 1 or 2.
        n_perm (int): number of permutations.
        rng (Generator): random stream.
        opts (SolverOptions): solver settings.
        workers (int): processes for the permutations.
    Returns:
        result (TestResult): observed T_alpha and add-one p-value.
    """
    check_alpha(alpha)
    if n_perm < 1:
        raise ValidationError("n_perm must be positive")
    rng = np.random.default_rng() if rng is None else rng
    opts = SolverOptions() if opts is None else opts
    manifold = build_manifold(data.kind)
    observed = effect_from_arrays(manifold, data.r, data.z, data.s, data.lambda_hat, alpha, opts).value
    seed = int(rng.integers(0, 2 ** 63 - 1))
    permuted = misc.run_tasks(partial(_permuted_statistic, data, alpha, opts, seed), range(n_perm), workers)
    p_value = add_one_p_value(observed, np.sort(permuted))
    logger.debug("T_{} = {:.6f}, randomization p = {:.4f}".format(alpha, observed, p_value))
    return TestResult(statistic=observed, p_value=p_value, permutations=n_perm)
