#!/usr/bin/env python3

from .normal import riemannian_normal_tangents, sample_riemannian_normal  # noqa
from .scenarios import (  # noqa
    TRUE_EFFECT,
    ScenarioConfig,
    draw_with_retries,
    example1_dataset,
    example1_limit,
    generate_scenario,
    is_matched,
    random_stratified_dataset,
    scenario_manifold,
)
