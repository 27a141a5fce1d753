#!/usr/bin/env python3

"""Meters."""

import math
from collections import deque
import numpy as np

import metric_causal.utils.logging as logging

logger = logging.get_logger(__name__)


class ScalarMeter(object):
    """
    A scalar meter uses a deque to track a series of scaler values with a given
    window size. It supports calculating the average value of the
    window, and also supports calculating the global average and its
    standard error.
    """

    def __init__(self, window_size):
        """
        Args:
            window_size (int): size of the max length of the deque.
        """
        self.deque = deque(maxlen=window_size)
        self.total = 0.0
        self.total_sq = 0.0
        self.count = 0

    def add_value(self, value):
        """
        Add a new scalar value to the deque.
        """
        self.deque.append(value)
        self.count += 1
        self.total += value
        self.total_sq += value * value

    def get_win_avg(self):
        """
        Calculate the current average value of the deque.
        """
        return np.mean(self.deque)

    def get_global_avg(self):
        """
        Calculate the global mean value.
        """
        return self.total / self.count

    def get_global_se(self):
        """
        Standard error sd / sqrt(count) of the global mean; nan below two values.
        """
        if self.count < 2:
            return float("nan")
        mean = self.get_global_avg()
        var = max(0.0, (self.total_sq - self.count * mean * mean) / (self.count - 1))
        return math.sqrt(var / self.count)


class CellMeter(object):
    """
    Aggregates the replicates of one simulation cell (scenario, estimator,
    N): absolute errors |T - truth| for point-estimate scenarios, coverage
    indicators for interval scenarios, plus solver and resampling
    diagnostics.
    """

    def __init__(self, scenario, alpha, n, truth, window_size=20):
        self.scenario = scenario
        self.alpha = alpha
        self.n = n
        self.truth = truth
        self.abs_error = ScalarMeter(window_size)
        self.covered = ScalarMeter(window_size)
        self.width = ScalarMeter(window_size)
        self.estimates = []
        self.resamples = 0
        self.redrawn = 0
        self.not_converged = 0

    def update(self, estimate, converged=True, interval=None, resamples=0):
        """
        Args:
            estimate (float): T_alpha of one replicate.
            converged (bool): both group solves converged.
            interval (IntervalEstimate): bootstrap interval, if any.
            resamples (int): discarded draws before the replicate.
        """
        self.estimates.append(float(estimate))
        self.abs_error.add_value(abs(estimate - self.truth))
        self.resamples += resamples
        self.not_converged += int(not converged)
        if interval is not None:
            self.covered.add_value(float(interval.covers(self.truth)))
            self.width.add_value(interval.width)
            self.redrawn += interval.redrawn

    @property
    def measures_coverage(self):
        return self.covered.count > 0

    def summary(self):
        """
        Returns:
            stats (dict): the reported statistic (MAE or coverage) with its
                standard error and diagnostics.
        """
        if self.measures_coverage:
            coverage = self.covered.get_global_avg()
            estimate = coverage
            se = math.sqrt(coverage * (1.0 - coverage) / self.covered.count)
            statistic = "coverage"
        else:
            estimate = self.abs_error.get_global_avg()
            se = self.abs_error.get_global_se()
            statistic = "mae"
        stats = {
            "scenario": self.scenario,
            "estimator": "T{}".format(self.alpha),
            "n": self.n,
            "statistic": statistic,
            "estimate": estimate,
            "standard_error": se,
            "replicates": len(self.estimates),
            "mean_effect": float(np.mean(self.estimates)),
            "mae": self.abs_error.get_global_avg(),
            "resamples": self.resamples,
            "bootstrap_redraws": self.redrawn,
            "solver_failures": self.not_converged,
        }
        if self.measures_coverage:
            stats["mean_width"] = self.width.get_global_avg()
        return stats

    def log_stats(self):
        logging.log_json_stats(self.summary())
