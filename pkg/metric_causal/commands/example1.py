#!/usr/bin/env python3

"""Negative control: the naive nested estimator against T_2 on the three-point sphere example."""

import pprint
from dataclasses import dataclass
import numpy as np
import pandas as pd

import metric_causal.utils.logging as logging
import metric_causal.utils.misc as misc
from metric_causal.estimation import SolverOptions, estimate_t_alpha, naive_nested_estimator
from metric_causal.sampling import example1_dataset, example1_limit
from metric_causal.utils.report import write_report, write_table

logger = logging.get_logger(__name__)

# Both potential-outcome distributions share their Frechet mean.
TRUE_AATE = 0.0


@dataclass(frozen=True)
class ExampleTask:
    c: float
    n: int
    seed: int
    index: int
    opts: SolverOptions


def run_example(task):
    rng = misc.replicate_rng(task.seed, task.index)
    data = example1_dataset(task.c, task.n, rng)
    return {
        "replicate": task.index,
        "t2": estimate_t_alpha(data, 2, task.opts).value,
        "naive": naive_nested_estimator(data, 2, task.opts).value,
    }


def example1(cfg):
    """
    Draws EXAMPLE1.REPLICATES datasets and compares the mean T_2 (consistent
    for the zero effect) and the mean naive nested estimate (converging to
    4t/3 - 2c/3) with their limits.
    Args:
        cfg (CfgNode): configs. Details can be found in
            metric_causal/config/defaults.py
    Returns:
        replicates (DataFrame): both estimates per replicate.
    """
    logging.setup_logging(cfg.OUTPUT_DIR)
    logger.info("Example 1 with config:")
    logger.info(pprint.pformat(cfg))
    opts = SolverOptions.from_cfg(cfg)
    c = float(cfg.EXAMPLE1.C)
    tasks = [
        ExampleTask(c=c, n=cfg.EXAMPLE1.N, seed=cfg.RNG_SEED, index=i, opts=opts)
        for i in range(cfg.EXAMPLE1.REPLICATES)
    ]
    replicates = pd.DataFrame(misc.launch_job(cfg, run_example, tasks, desc="example1"))

    limit = example1_limit(c)
    mean_t2 = float(np.mean(replicates["t2"]))
    mean_naive = float(np.mean(replicates["naive"]))
    tolerance = cfg.EXAMPLE1.TOLERANCE
    passed = abs(mean_t2 - TRUE_AATE) <= tolerance and abs(mean_naive - limit) <= tolerance
    logging.log_json_stats(
        {"c": c, "limit": limit, "mean_t2": mean_t2, "mean_naive": mean_naive, "passed": passed}
    )
    write_table(cfg, replicates, "replicates")
    write_report(
        cfg,
        {
            "c": c,
            "n": int(cfg.EXAMPLE1.N),
            "replicates": int(cfg.EXAMPLE1.REPLICATES),
            "limit": float(limit),
            "mean_t2": mean_t2,
            "mean_naive": mean_naive,
            "tolerance": float(tolerance),
            "passed": bool(passed),
        },
    )
    return replicates
