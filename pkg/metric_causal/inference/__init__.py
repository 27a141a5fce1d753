#!/usr/bin/env python3

from .bootstrap import IntervalEstimate, bootstrap_pivotal_ci, pivotal_interval  # noqa
from .randomization import TestResult, randomization_test  # noqa
