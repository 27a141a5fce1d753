#!/usr/bin/env python3

"""Simulation scenarios and the Example 1 counterexample on S^2."""

from dataclasses import dataclass
from typing import Optional
import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit

import metric_causal.utils.logging as logging
from metric_causal.estimation.estimands import StratifiedDataset, empirical_lambda, known_lambda
from metric_causal.geometry import build_manifold
from metric_causal.geometry.types import ManifoldKind
from metric_causal.utils.errors import EmptyCellError, EstimationError, ValidationError

from .normal import riemannian_normal_tangents

logger = logging.get_logger(__name__)

DEFAULT_SIGMA2 = (np.pi / 8) ** 2
LAMBDA_POLICIES = ("default", "known", "empirical")

# Base point, covariate directions and effect direction shared by S^2 and H^2.
BASE_POINT = np.array([1.0, 0.0, 0.0])
V1 = np.array([0.0, np.pi / 4, 0.0])
V2 = np.array([0.0, 0.0, -np.pi / 6])
EFFECT = np.array([0.0, 1.0, 0.0])
# d(exp_p(e), exp_p(-e)) for the unit effect direction.
TRUE_EFFECT = 2.0


def scenario_manifold(scenario):
    """Randomized experiments (1, 2) live on S^2, matched studies (3, 4) on H^2."""
    return ManifoldKind.sphere2() if scenario in (1, 2) else ManifoldKind.hyperbolic2()


def is_matched(scenario):
    return scenario in (3, 4)


@dataclass(frozen=True)
class ScenarioConfig:
    """
    One simulation cell. `lambda_policy="default"` uses the known weights
    (1/2, 1/2) in the randomized scenarios and m^s/N after matching.
    `covariate_effect=False` removes the x-dependent displacement.
    """

    scenario: int
    n: int
    sigma2: float = DEFAULT_SIGMA2
    seed: int = 0
    manifold: Optional[ManifoldKind] = None
    lambda_policy: str = "default"
    covariate_effect: bool = True

    def __post_init__(self):
        if self.scenario not in (1, 2, 3, 4):
            raise ValidationError("scenario must be 1, 2, 3 or 4, got {}".format(self.scenario))
        if self.n < 2:
            raise ValidationError("N must be at least 2")
        if not self.sigma2 > 0:
            raise ValidationError("sigma2 must be positive")
        if self.lambda_policy not in LAMBDA_POLICIES:
            raise ValidationError("lambda_policy must be one of {}".format(LAMBDA_POLICIES))
        expected = scenario_manifold(self.scenario)
        if self.manifold is None:
            object.__setattr__(self, "manifold", expected)
        elif self.manifold != expected:
            raise ValidationError(
                "Scenario {} runs on {}, not {}".format(self.scenario, expected, self.manifold)
            )

    @classmethod
    def from_cfg(cls, cfg, n, scenario=None):
        return cls(
            scenario=cfg.SIMULATION.SCENARIO if scenario is None else scenario,
            n=n,
            sigma2=cfg.SIMULATION.SIGMA2,
            seed=cfg.RNG_SEED,
            lambda_policy=cfg.SIMULATION.LAMBDA_POLICY,
        )


def _complete_randomization(s, num_strata, rng):
    """Assigns floor((m + 1) / 2) treated units uniformly within each stratum."""
    z = np.zeros(s.size, dtype=np.int64)
    for stratum in range(1, num_strata + 1):
        members = np.flatnonzero(s == stratum)
        treated = rng.permutation(members)[: (members.size + 1) // 2]
        z[treated] = 1
    return z


def _unit_ids(n):
    return ["u{:05d}".format(i) for i in range(n)]


def potential_outcomes(kind, x, tangents, covariate_effect=True):
    """
    Displaces the effect centers exp_p(+-e) by the covariate shift
    x^1 v1 + x^2 v2 and then by the noise tangents, both parallel transported
    from the base point.
    Returns:
        r_treated, r_control (ndarray): (N, 3) potential outcomes.
    """
    manifold = build_manifold(kind)
    p = BASE_POINT
    shift = x[:, :1] * V1 + x[:, 1:2] * V2
    if not covariate_effect:
        shift = np.zeros_like(shift)
    out = []
    for sign in (1.0, -1.0):
        zeta = manifold.exp(p, sign * EFFECT)
        shifted = manifold.exp(zeta, manifold.transport(p, zeta, shift))
        out.append(manifold.exp(shifted, manifold.transport(p, shifted, tangents)))
    return out[0], out[1]


def generate_scenario(config, rng):
    """
    Draws one replicate of a simulation scenario.
    Args:
        config (ScenarioConfig): scenario settings.
        rng (Generator): random stream of the replicate.
    Returns:
        data (StratifiedDataset): both potential outcomes stored; scenarios
            3-4 carry a single placeholder stratum until matched.
    Raises:
        EmptyCellError: a stratum lacks treated or control units.
    """
    n = config.n
    x = rng.uniform(-0.5, 0.5, size=(n, 2))
    tangents = riemannian_normal_tangents(config.manifold, BASE_POINT, config.sigma2, rng, n)
    r_treated, r_control = potential_outcomes(config.manifold, x, tangents, config.covariate_effect)

    if is_matched(config.scenario):
        s = np.ones(n, dtype=np.int64)
        z = (rng.uniform(size=n) < expit(x[:, 0] + x[:, 1])).astype(np.int64)
        lambda_hat = np.ones(1)
    else:
        s = np.where(x[:, 0] >= 0, 1, 2)
        z = _complete_randomization(s, 2, rng)
        if config.lambda_policy == "empirical":
            lambda_hat = empirical_lambda(s, 2)
        else:
            lambda_hat = known_lambda([0.5, 0.5])
    return StratifiedDataset(
        kind=config.manifold,
        ids=_unit_ids(n),
        z=z,
        s=s,
        x=x,
        r=np.where((z == 1)[:, None], r_treated, r_control),
        lambda_hat=lambda_hat,
        r_treated=r_treated,
        r_control=r_control,
    )


def draw_with_retries(draw, rng, max_resamples):
    """
    Calls `draw(rng)` until it returns a dataset without empty cells.
    Returns:
        data, resamples: the dataset and the number of discarded draws.
    """
    for attempt in range(max_resamples + 1):
        try:
            return draw(rng), attempt
        except EmptyCellError as err:
            logger.debug("Discarding replicate draw: {}".format(err))
    raise EstimationError("No valid draw after {} resamples".format(max_resamples))


def _example1_outcomes(c):
    """Treated and control outcomes of the three equiprobable configurations."""
    sin_c, cos_c = np.sin(c), np.cos(c)
    half, height = 0.5 * sin_c, 0.5 * np.sqrt(3.0) * sin_c
    treated = np.array(
        [[sin_c, 0.0, cos_c], [-half, height, cos_c], [-half, -height, cos_c]]
    )
    control = treated * np.array([-1.0, 1.0, 1.0])
    return treated, control


def example1_dataset(c, n, rng):
    """
    I.i.d. draws from the three-point counterexample around the north pole:
    stratum 1 holds one configuration, stratum 2 the two configurations at
    longitudes 120 and 240 degrees. Strata weights are the empirical shares.
    """
    if not 0.0 < c < np.pi / 2:
        raise ValidationError("c must lie in (0, pi/2)")
    if n < 1:
        raise ValidationError("N must be positive")
    treated, control = _example1_outcomes(c)
    config = rng.integers(0, 3, size=n)
    s = np.where(config == 0, 1, 2)
    z = _complete_randomization(s, 2, rng)
    r_treated, r_control = treated[config], control[config]
    return StratifiedDataset(
        kind=ManifoldKind.sphere2(),
        ids=_unit_ids(n),
        z=z,
        s=s,
        x=np.zeros((n, 0)),
        r=np.where((z == 1)[:, None], r_treated, r_control),
        lambda_hat=empirical_lambda(s, 2),
        r_treated=r_treated,
        r_control=r_control,
    )


def example1_limit(c):
    """
    Almost-sure limit 4t/3 - 2c/3 of the naive nested estimator, where t is
    the colatitude of the Frechet mean of the two stratum-2 treated points,
    found by minimizing their objective along the meridian.
    """
    if not 0.0 < c < np.pi / 2:
        raise ValidationError("c must lie in (0, pi/2)")
    manifold = build_manifold(ManifoldKind.sphere2())
    stratum2 = _example1_outcomes(c)[0][1:]

    def objective(t):
        point = np.array([-np.sin(t), 0.0, np.cos(t)])
        return float(np.sum(manifold.dist(point, stratum2) ** 2))

    t = minimize_scalar(objective, bounds=(0.0, c), method="bounded", options={"xatol": 1e-12}).x
    return 4.0 * t / 3.0 - 2.0 * c / 3.0


def random_stratified_dataset(kind, n, num_strata, rng, spread=0.3):
    """
    Concentrated random dataset on any manifold: every (stratum, group) cell
    scatters around its own center near a common random base point. Rows
    cycle through the cells, so each holds about n / (2 Xi) units.
    """
    if n < 2 * num_strata:
        raise ValidationError("Need at least one unit per cell, got N={} for {} strata".format(n, num_strata))
    manifold = build_manifold(kind)
    base = manifold.random_point(rng)
    centers = {}
    for stratum in range(1, num_strata + 1):
        for flag in (0, 1):
            centers[stratum, flag] = manifold.exp(base, manifold.random_tangent(base, rng, scale=spread))
    index = np.arange(n)
    s = index % num_strata + 1
    z = (index // num_strata) % 2
    r = np.stack(
        [
            manifold.exp(centers[si, zi], manifold.random_tangent(centers[si, zi], rng, scale=spread))
            for si, zi in zip(s, z)
        ]
    )
    order = rng.permutation(n)
    return StratifiedDataset(
        kind=kind,
        ids=_unit_ids(n),
        z=z[order],
        s=s[order],
        x=np.zeros((n, 0)),
        r=r[order],
        lambda_hat=empirical_lambda(s, num_strata),
    )
