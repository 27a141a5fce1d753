#!/usr/bin/env python3

"""Bootstrap pivotal confidence intervals for T_alpha."""

from dataclasses import dataclass, field
from functools import partial
import numpy as np

import metric_causal.utils.logging as logging
import metric_causal.utils.misc as misc
from metric_causal.estimation.estimands import effect_from_arrays, empirical_lambda
from metric_causal.estimation.frechet import SolverOptions, check_alpha
from metric_causal.geometry import build_manifold
from metric_causal.utils.errors import EstimationError, MatchingError, ValidationError

logger = logging.get_logger(__name__)

MIN_REPLICATES = 100


@dataclass(frozen=True)
class IntervalEstimate:
    """
    (1 - delta) pivotal interval truncated at 0. `redrawn` counts resamples
    discarded for empty cells or failed rematching.
    """

    alpha: int
    level: float
    lower: float
    upper: float
    b: int
    point: float
    redrawn: int = 0
    replicates: np.ndarray = field(default=None, repr=False, compare=False)

    def covers(self, value):
        return self.lower <= value <= self.upper

    @property
    def width(self):
        return self.upper - self.lower


def pivotal_interval(point, replicates, level):
    """
    [2 theta - q_{1 - delta/2}, 2 theta - q_{delta/2}] with linearly
    interpolated (type 7) quantiles, truncated below at 0.
    """
    if not 0.0 < level < 1.0:
        raise ValidationError("level must lie in (0, 1)")
    delta = 1.0 - level
    replicates = np.sort(np.asarray(replicates, dtype=np.float64))
    q_low, q_high = np.quantile(replicates, [delta / 2.0, 1.0 - delta / 2.0])
    lower = max(0.0, 2.0 * point - q_high)
    upper = max(0.0, 2.0 * point - q_low)
    return lower, upper


def has_empty_cell(z, s, num_strata):
    treated = np.bincount(s[z == 1], minlength=num_strata + 1)[1:]
    control = np.bincount(s[z == 0], minlength=num_strata + 1)[1:]
    return bool(np.any(treated == 0) or np.any(control == 0))


def _resample(data, rng, rematch):
    index = rng.integers(0, data.n, size=data.n)
    z = data.z[index]
    if rematch is None:
        s = data.s[index]
        num_strata = data.xi
    else:
        # Label 0 marks units left unmatched; they leave the resample.
        s = np.asarray(rematch(data.x[index], z))
        index, z, s = index[s > 0], z[s > 0], s[s > 0]
        if s.size == 0:
            return None
        num_strata = int(s.max())
    if has_empty_cell(z, s, num_strata):
        return None
    return data.r[index], z, s, empirical_lambda(s, num_strata)


def _bootstrap_replicate(data, alpha, opts, rematch, seed, max_redraws, index):
    rng = misc.replicate_rng(seed, index)
    manifold = build_manifold(data.kind)
    redrawn = 0
    while True:
        try:
            drawn = _resample(data, rng, rematch)
        except MatchingError as err:
            logger.debug("Rematching failed on a resample: {}".format(err))
            drawn = None
        if drawn is not None:
            r, z, s, lambda_hat = drawn
            return effect_from_arrays(manifold, r, z, s, lambda_hat, alpha, opts).value, redrawn
        redrawn += 1
        if redrawn > max_redraws:
            raise EstimationError("Gave up after {} degenerate bootstrap resamples".format(redrawn))


def bootstrap_pivotal_ci(
    data, alpha, b=500, level=0.95, rng=None, opts=None, rematch=None, max_redraws=None, workers=1
):
    """
    Resamples the N units with replacement, recomputes T_alpha with the
    resample's stratum shares m^s/N and inverts the bootstrap distribution
    around the plug-in estimate. Replicate i draws from its own stream keyed
    by i under one seed taken from `rng`, so the interval does not depend on
    `workers`.
    Args:
        data (StratifiedDataset): observed units.
        alpha (int): 1 or 2.
        b (int): bootstrap replicates, at least 100.
        level (float): confidence level in (0, 1).
        rng (Generator): random stream.
        opts (SolverOptions): solver settings.
        rematch (callable): optional (covariates, z) -> stratum labels, rerun
            on every resample. Must be picklable when workers > 1.
        max_redraws (int): cap on discarded resamples, 10 * b by default.
        workers (int): processes for the replicates.
    Returns:
        interval (IntervalEstimate): truncated pivotal interval.
    """
    check_alpha(alpha)
    if b < MIN_REPLICATES:
        raise ValidationError("Bootstrap needs at least {} replicates, got {}".format(MIN_REPLICATES, b))
    if not 0.0 < level < 1.0:
        raise ValidationError("level must lie in (0, 1)")
    rng = np.random.default_rng() if rng is None else rng
    opts = SolverOptions() if opts is None else opts
    max_redraws = 10 * b if max_redraws is None else max_redraws
    manifold = build_manifold(data.kind)

    point = effect_from_arrays(
        manifold, data.r, data.z, data.s, empirical_lambda(data.s, data.xi), alpha, opts
    ).value
    seed = int(rng.integers(0, 2 ** 63 - 1))
    replicate = partial(_bootstrap_replicate, data, alpha, opts, rematch, seed, max_redraws)
    outcomes = misc.run_tasks(replicate, range(b), workers)
    replicates = np.sort(np.array([value for value, _ in outcomes]))
    redrawn = sum(count for _, count in outcomes)
    if redrawn > max_redraws:
        raise EstimationError("Gave up after {} degenerate bootstrap resamples".format(redrawn))
    if redrawn:
        logger.info("Redrew {} bootstrap resamples with empty cells".format(redrawn))
    lower, upper = pivotal_interval(point, replicates, level)
    return IntervalEstimate(
        alpha=alpha,
        level=level,
        lower=lower,
        upper=upper,
        b=b,
        point=point,
        redrawn=redrawn,
        replicates=replicates,
    )
