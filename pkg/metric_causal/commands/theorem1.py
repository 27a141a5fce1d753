#!/usr/bin/env python3

"""Geodesic regression on the treatment flag versus T_alpha on random datasets."""

import pprint
from dataclasses import dataclass
from typing import Tuple
import pandas as pd

import metric_causal.utils.logging as logging
import metric_causal.utils.misc as misc
from metric_causal.estimation import SolverOptions, theorem1_check
from metric_causal.geometry.types import ManifoldKind
from metric_causal.sampling import random_stratified_dataset
from metric_causal.utils.report import write_report, write_table

logger = logging.get_logger(__name__)


@dataclass(frozen=True)
class CheckTask:
    kind: ManifoldKind
    manifold_index: int
    dataset_index: int
    seed: int
    n: int
    num_strata: int
    alphas: Tuple[int, ...]
    betas: Tuple[float, ...]
    starts: int
    opts: SolverOptions


def manifold_kinds(cfg):
    kinds = []
    for name in cfg.THEOREM1.MANIFOLDS:
        param = {"euclidean": cfg.THEOREM1.EUCLIDEAN_DIM, "kendall": cfg.THEOREM1.NUM_LANDMARKS}
        kinds.append(ManifoldKind.parse(name, param.get(name.lower(), 0)))
    return kinds


def run_check(task):
    """
    Returns:
        rows (list): one dict per (alpha, beta_T) on one random dataset.
    """
    rng = misc.replicate_rng(task.seed, task.manifold_index, task.dataset_index)
    data = random_stratified_dataset(task.kind, task.n, task.num_strata, rng)
    rows = []
    for alpha in task.alphas:
        for beta_t in task.betas:
            report = theorem1_check(
                data, alpha, beta_t=beta_t, opts=task.opts, starts=task.starts, seed=task.dataset_index
            )
            rows.append(
                {
                    "manifold": str(task.kind),
                    "dataset": task.dataset_index,
                    "estimator": "T{}".format(alpha),
                    "beta_t": beta_t,
                    "norm_v": report.norm_v,
                    "t_alpha": report.t_alpha,
                    "gap": report.gap,
                    "converged": report.fit.converged,
                }
            )
    return rows


def theorem1(cfg):
    """
    For every manifold and random dataset, fits the weighted geodesic
    regression of the outcomes on z for each beta_T and compares |v| with
    T_alpha. Passes when the worst gap and the spread of |v| over beta_T
    both stay within THEOREM1.TOLERANCE.
    Args:
        cfg (CfgNode): configs. Details can be found in
            metric_causal/config/defaults.py
    Returns:
        checks (DataFrame): one row per manifold, dataset, estimator and beta_T.
    """
    logging.setup_logging(cfg.OUTPUT_DIR)
    logger.info("Check regression equivalence with config:")
    logger.info(pprint.pformat(cfg))
    opts = SolverOptions.from_cfg(cfg)
    tasks = [
        CheckTask(
            kind=kind,
            manifold_index=m,
            dataset_index=d,
            seed=cfg.RNG_SEED,
            n=cfg.THEOREM1.N,
            num_strata=cfg.THEOREM1.NUM_STRATA,
            alphas=tuple(cfg.ALPHAS),
            betas=tuple(cfg.THEOREM1.BETA_T),
            starts=cfg.THEOREM1.STARTS,
            opts=opts,
        )
        for m, kind in enumerate(manifold_kinds(cfg))
        for d in range(cfg.THEOREM1.NUM_DATASETS)
    ]
    results = misc.launch_job(cfg, run_check, tasks, desc="theorem1")
    checks = pd.DataFrame([row for rows in results for row in rows])

    spread = checks.groupby(["manifold", "dataset", "estimator"])["norm_v"].agg(lambda v: v.max() - v.min())
    worst_gap = float(checks["gap"].max())
    worst_spread = float(spread.max())
    tolerance = cfg.THEOREM1.TOLERANCE
    passed = worst_gap <= tolerance and worst_spread <= tolerance
    for (manifold, estimator), group in checks.groupby(["manifold", "estimator"]):
        logging.log_json_stats(
            {
                "manifold": manifold,
                "estimator": estimator,
                "worst_gap": float(group["gap"].max()),
                "mean_gap": float(group["gap"].mean()),
            }
        )
    logger.info(
        "Worst gap {:.3e}, worst beta_T spread {:.3e}: {}".format(
            worst_gap, worst_spread, "PASS" if passed else "FAIL"
        )
    )
    write_table(cfg, checks, "checks")
    write_report(
        cfg,
        {
            "checks": checks.to_dict(orient="records"),
            "worst_gap": worst_gap,
            "worst_beta_spread": worst_spread,
            "tolerance": float(tolerance),
            "passed": bool(passed),
        },
    )
    return checks
