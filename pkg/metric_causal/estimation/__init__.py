#!/usr/bin/env python3

from .estimands import (  # noqa
    EffectEstimate,
    StratifiedDataset,
    Unit,
    empirical_lambda,
    estimate_t_alpha,
    known_lambda,
    naive_nested_estimator,
)
from .frechet import (  # noqa
    SolverOptions,
    SolverResult,
    WeightedSample,
    stratification_weights,
    weighted_l_alpha_estimator,
    weighted_objective,
)
from .regression import GeodesicFit, geodesic_regression_fit, theorem1_check  # noqa
