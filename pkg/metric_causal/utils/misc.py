#!/usr/bin/env python3

import os
from concurrent.futures import ProcessPoolExecutor
import numpy as np
import psutil
from fvcore.common.file_io import PathManager
from tqdm import tqdm

import metric_causal.utils.logging as logging

logger = logging.get_logger(__name__)

THREADS_ENV = "METRIC_CAUSAL_THREADS"


def cpu_mem_usage():
    """
    Compute the system memory (RAM) usage for the current device (GB).
    Returns:
        usage (float): used memory (GB).
        total (float): total memory (GB).
    """
    vram = psutil.virtual_memory()
    usage = (vram.total - vram.available) / 1024 ** 3
    total = vram.total / 1024 ** 3

    return usage, total


def capped_workers(workers):
    """`workers` capped by the METRIC_CAUSAL_THREADS environment variable."""
    cap = os.environ.get(THREADS_ENV, "").strip()
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            logger.warning("Ignoring {}={!r}: not an integer".format(THREADS_ENV, cap))
    return workers


def num_workers(cfg):
    """
    NUM_WORKERS capped by the METRIC_CAUSAL_THREADS environment variable.
    """
    return capped_workers(cfg.NUM_WORKERS)


def replicate_rng(seed, *key):
    """Independent random stream of the replicate identified by `key` under the run seed."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def run_tasks(func, tasks, workers=1, desc=None):
    """
    Runs `func(task)` for every task over at most `workers` processes.
    Args:
        func (function): picklable function of one task when workers > 1.
        tasks (list): task descriptions.
        workers (int): requested processes, capped by METRIC_CAUSAL_THREADS.
        desc (str): progress bar label; no bar when None.
    Returns:
        results (list): func outputs in task order.
    """
    tasks = list(tasks)
    workers = min(capped_workers(workers), max(1, len(tasks)))
    disable = desc is None
    if workers > 1:
        chunksize = max(1, len(tasks) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(func, tasks, chunksize=chunksize)
            return list(tqdm(results, total=len(tasks), desc=desc, disable=disable))
    return [func(task) for task in tqdm(tasks, desc=desc, disable=disable)]


def launch_job(cfg, func, tasks, desc=None):
    """
    Runs `func(task)` for every task, over NUM_WORKERS processes when more
    than one is allowed.
    Args:
        cfg (CfgNode): configs. Details can be found in
            metric_causal/config/defaults.py
        func (function): picklable top-level function of one task.
        tasks (list): picklable task descriptions.
        desc (str): progress bar label.
    Returns:
        results (list): func outputs in task order.
    """
    return run_tasks(func, tasks, cfg.NUM_WORKERS, desc)


def make_output_dir(path_to_output):
    """
    Creates the output directory if it does not exist yet.
    Args:
        path_to_output (string): the path to the run outputs.
    """
    if not PathManager.exists(path_to_output):
        PathManager.mkdirs(path_to_output)
    return path_to_output
