#!/usr/bin/env python3

"""Observational study with landmark-shape outcomes: match, estimate, test, bootstrap."""

import functools
import pprint
import numpy as np
import pandas as pd

import metric_causal.utils.logging as logging
import metric_causal.utils.misc as misc
from metric_causal.datasets import load_study_from_cfg
from metric_causal.estimation import SolverOptions, WeightedSample, estimate_t_alpha, weighted_l_alpha_estimator
from metric_causal.geometry import build_manifold
from metric_causal.geometry.kendall import to_flat, to_landmarks
from metric_causal.geometry.types import ManifoldKind
from metric_causal.inference import bootstrap_pivotal_ci, randomization_test
from metric_causal.matching import match_dataset, match_strata
from metric_causal.utils.report import write_report, write_table

logger = logging.get_logger(__name__)


def analyze_space(cfg, data, space, rng, opts):
    """
    T_alpha, randomization test and bootstrap interval for every alpha on one
    representation of the outcomes.
    Returns:
        results (list): one row per alpha.
        effects (dict): alpha -> EffectEstimate.
    """
    rematch = None
    if cfg.BOOTSTRAP.REMATCH:
        rematch = functools.partial(match_strata, caliper=cfg.MATCHING.CALIPER, ridge=cfg.MATCHING.RIDGE)
    workers = misc.num_workers(cfg)
    results = []
    effects = {}
    for alpha in cfg.ALPHAS:
        effect = estimate_t_alpha(data, alpha, opts)
        test = randomization_test(
            data, alpha, n_perm=cfg.RANDOMIZATION.NUM_PERMUTATIONS, rng=rng, opts=opts, workers=workers
        )
        interval = bootstrap_pivotal_ci(
            data,
            alpha,
            b=cfg.BOOTSTRAP.NUM_SAMPLES,
            level=cfg.BOOTSTRAP.LEVEL,
            rng=rng,
            opts=opts,
            rematch=rematch,
            workers=workers,
        )
        row = {
            "space": space,
            "estimator": "T{}".format(alpha),
            "estimate": effect.value,
            "converged": effect.converged,
            "p_value": test.p_value,
            "permutations": test.permutations,
            "ci_lower": interval.lower,
            "ci_upper": interval.upper,
            "level": interval.level,
            "bootstrap_redraws": interval.redrawn,
        }
        logging.log_json_stats(row)
        results.append(row)
        effects[alpha] = effect
    return results, effects


def euclidean_baseline(data, opts=None):
    """
    Preshapes rotated onto their pooled Frechet mean and flattened to real
    2K-vectors, so translation, scale and rotation are all removed.
    Returns:
        flat (StratifiedDataset): same design with outcomes on R^2K.
    """
    manifold = build_manifold(data.kind)
    pooled = WeightedSample(data.kind, data.r, np.full(data.n, 1.0 / data.n))
    mean = weighted_l_alpha_estimator(pooled, 2, opts).minimizer.coords
    aligned, _, _ = manifold.align(mean, data.r)
    flat = to_flat(aligned)
    return data.with_outcomes(ManifoldKind.euclidean(flat.shape[1]), flat)


def center_shapes(data, effects):
    """
    Landmark matrices of the treated and control centers per estimator, the
    control center rotated onto the treated one.
    """
    manifold = build_manifold(data.kind)
    frames = []
    for alpha, effect in effects.items():
        treated = effect.treated_center.coords
        control, _, _ = manifold.align(treated, effect.control_center.coords)
        for group, center in (("treated", treated), ("control", control)):
            xy = to_landmarks(center)
            frames.append(
                pd.DataFrame(
                    {
                        "estimator": "T{}".format(alpha),
                        "group": group,
                        "landmark": np.arange(1, xy.shape[0] + 1),
                        "x": xy[:, 0],
                        "y": xy[:, 1],
                    }
                )
            )
    return pd.concat(frames, ignore_index=True)


def analyze(cfg):
    """
    Ingests the unit and landmark CSVs, matches on the covariates and
    estimates T_2 and T_1 on Kendall's shape space, optionally repeating the
    analysis on the flattened preshapes.
    Args:
        cfg (CfgNode): configs. Details can be found in
            metric_causal/config/defaults.py
    Returns:
        results (DataFrame): one row per space and estimator.
    """
    logging.setup_logging(cfg.OUTPUT_DIR)
    logger.info("Analyze with config:")
    logger.info(pprint.pformat(cfg))
    seed = cfg.RNG_SEED if cfg.RNG_SEED >= 0 else None
    rng = np.random.default_rng(seed)
    opts = SolverOptions.from_cfg(cfg)

    study = load_study_from_cfg(cfg)
    matched, match = match_dataset(
        study.data, caliper=cfg.MATCHING.CALIPER, ridge=cfg.MATCHING.RIDGE, names=study.covariate_names
    )
    logger.info(
        "Matched {} of {} units into {} sets".format(matched.n, study.data.n, match.n_sets)
    )
    logger.info("Balance:\n{}".format(match.balance_report.to_string()))

    results, effects = analyze_space(cfg, matched, "kendall", rng, opts)
    write_table(cfg, center_shapes(matched, effects), "centers")
    if cfg.ANALYZE.EUCLIDEAN_BASELINE:
        baseline = euclidean_baseline(matched, opts)
        results += analyze_space(cfg, baseline, "euclidean", rng, opts)[0]

    table = pd.DataFrame(results)
    write_table(cfg, table, "results")
    write_table(cfg, match.balance_report, "balance", index=True)
    write_report(
        cfg,
        {
            "num_units": int(study.data.n),
            "num_landmarks": int(study.landmarks.shape[1]),
            "matching": {
                "caliper": float(cfg.MATCHING.CALIPER),
                "n_sets": int(match.n_sets),
                "matched_units": int(matched.n),
                "unmatched": {study.data.ids[i]: reason for i, reason in sorted(match.unmatched.items())},
                "balance": match.balance_report.reset_index().to_dict(orient="records"),
            },
            "results": results,
        },
    )
    return table
