#!/usr/bin/env python3

"""Monte Carlo simulation tables for the four scenario types."""

import functools
import pprint
from dataclasses import dataclass
from typing import Tuple
import pandas as pd
from fvcore.common.timer import Timer

import metric_causal.utils.logging as logging
import metric_causal.utils.misc as misc
from metric_causal.estimation import SolverOptions, estimate_t_alpha
from metric_causal.inference import bootstrap_pivotal_ci
from metric_causal.matching import match_dataset, match_strata
from metric_causal.sampling import TRUE_EFFECT, ScenarioConfig, draw_with_retries, generate_scenario, is_matched
from metric_causal.utils.meters import CellMeter
from metric_causal.utils.report import write_report, write_table

logger = logging.get_logger(__name__)

TABLE_COLUMNS = ["experiment_type", "estimator", "N", "estimate", "standard_error"]


@dataclass(frozen=True)
class ReplicateTask:
    """Everything one worker needs to run one replicate."""

    scenario: ScenarioConfig
    index: int
    alphas: Tuple[int, ...]
    opts: SolverOptions
    max_resamples: int
    num_bootstrap: int
    level: float
    caliper: float
    ridge: float

    @property
    def with_interval(self):
        return self.scenario.scenario in (2, 4)


def _draw(task, rng):
    data = generate_scenario(task.scenario, rng)
    if is_matched(task.scenario.scenario):
        data, _ = match_dataset(data, caliper=task.caliper, ridge=task.ridge)
    return data


def run_replicate(task):
    """
    Draws one replicate and estimates every requested T_alpha, with a
    bootstrap interval in scenarios 2 and 4.
    Returns:
        results (list): one dict per alpha.
    """
    config = task.scenario
    rng = misc.replicate_rng(config.seed, config.scenario, config.n, task.index)
    data, resamples = draw_with_retries(functools.partial(_draw, task), rng, task.max_resamples)
    rematch = None
    if config.scenario == 4:
        rematch = functools.partial(match_strata, caliper=task.caliper, ridge=task.ridge)
    results = []
    for alpha in task.alphas:
        effect = estimate_t_alpha(data, alpha, task.opts)
        interval = None
        if task.with_interval:
            interval = bootstrap_pivotal_ci(
                data,
                alpha,
                b=task.num_bootstrap,
                level=task.level,
                rng=rng,
                opts=task.opts,
                rematch=rematch,
            )
        results.append(
            {
                "alpha": alpha,
                "estimate": effect.value,
                "converged": effect.converged,
                "interval": interval,
                "resamples": resamples,
            }
        )
    return results


def build_tasks(cfg):
    opts = SolverOptions.from_cfg(cfg)
    tasks = []
    for n in cfg.SIMULATION.N_LIST:
        scenario = ScenarioConfig.from_cfg(cfg, n)
        for index in range(cfg.SIMULATION.REPLICATES):
            tasks.append(
                ReplicateTask(
                    scenario=scenario,
                    index=index,
                    alphas=tuple(cfg.ALPHAS),
                    opts=opts,
                    max_resamples=cfg.SIMULATION.MAX_RESAMPLES,
                    num_bootstrap=cfg.BOOTSTRAP.NUM_SAMPLES,
                    level=cfg.BOOTSTRAP.LEVEL,
                    caliper=cfg.MATCHING.CALIPER,
                    ridge=cfg.MATCHING.RIDGE,
                )
            )
    return tasks


def aggregate(tasks, results):
    """
    Folds replicate results into one CellMeter per (N, alpha), in task order.
    """
    meters = {}
    for task, replicate in zip(tasks, results):
        for result in replicate:
            key = (task.scenario.n, result["alpha"])
            if key not in meters:
                meters[key] = CellMeter(task.scenario.scenario, result["alpha"], task.scenario.n, TRUE_EFFECT)
            meters[key].update(
                result["estimate"],
                converged=result["converged"],
                interval=result["interval"],
                resamples=result["resamples"],
            )
    return [meters[key] for key in sorted(meters, key=lambda k: (k[0], -k[1]))]


def summary_table(meters):
    """Table with one row per cell: experiment type, estimator, N, estimate, standard error."""
    rows = []
    for meter in meters:
        stats = meter.summary()
        rows.append([stats["scenario"], stats["estimator"], stats["n"], stats["estimate"], stats["standard_error"]])
    return pd.DataFrame(rows, columns=TABLE_COLUMNS)


def simulate(cfg):
    """
    Runs the scenario grid N x alpha x replicates and writes the summary
    table (CSV) and the JSON report.
    Args:
        cfg (CfgNode): configs. Details can be found in
            metric_causal/config/defaults.py
    Returns:
        table (DataFrame): the summary table.
    """
    logging.setup_logging(cfg.OUTPUT_DIR)
    logger.info("Simulate with config:")
    logger.info(pprint.pformat(cfg))
    timer = Timer()

    tasks = build_tasks(cfg)
    results = misc.launch_job(
        cfg, run_replicate, tasks, desc="scenario {}".format(cfg.SIMULATION.SCENARIO)
    )
    meters = aggregate(tasks, results)
    for meter in meters:
        meter.log_stats()

    table = summary_table(meters)
    write_table(cfg, table, "table")
    cells = [meter.summary() for meter in meters]
    if cfg.REPORT.INCLUDE_REPLICATES:
        for cell, meter in zip(cells, meters):
            cell["estimates"] = meter.estimates
    write_report(
        cfg,
        {
            "scenario": int(cfg.SIMULATION.SCENARIO),
            "sigma2": float(cfg.SIMULATION.SIGMA2),
            "cells": cells,
        },
    )
    usage, total = misc.cpu_mem_usage()
    logger.info("Finished in {:.1f}s, RAM usage: {:.2f}/{:.2f} GB".format(timer.seconds(), usage, total))
    return table
