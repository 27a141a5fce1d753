#!/usr/bin/env python3

"""Configs."""
import math
from fvcore.common.config import CfgNode
from fvcore.common.file_io import PathManager

from metric_causal.utils.errors import ConfigError

COMMANDS = ("simulate", "analyze", "theorem1", "example1")

# -----------------------------------------------------------------------------
# Config definition
# -----------------------------------------------------------------------------
_C = CfgNode()

# ---------------------------------------------------------------------------- #
# Riemannian gradient descent options
# ---------------------------------------------------------------------------- #
_C.SOLVER = CfgNode()

# Iteration cap of one solve.
_C.SOLVER.MAX_ITERATIONS = 1000

# Multiplier of the preconditioned (Karcher / Weiszfeld) step.
_C.SOLVER.STEP_SIZE = 1.0

# Stop once the (sub)gradient norm falls below this value.
_C.SOLVER.GRADIENT_TOLERANCE = 1e-9

# Points closer than this to the iterate count as coinciding with it when the
# geometric median is computed.
_C.SOLVER.MEDIAN_SMOOTHING = 1e-9

# If True, rerun every solve from random starts and flag non-unique minima.
_C.SOLVER.CHECK_UNIQUENESS = False

# Number of extra starts of the uniqueness diagnostic.
_C.SOLVER.UNIQUENESS_STARTS = 5

# ---------------------------------------------------------------------------- #
# Simulation options
# ---------------------------------------------------------------------------- #
_C.SIMULATION = CfgNode()

# Scenario type: 1, 2 (randomized, S^2) or 3, 4 (matched, H^2).
_C.SIMULATION.SCENARIO = 1

# Sample sizes of the table rows.
_C.SIMULATION.N_LIST = [32, 128, 1024]

# Monte Carlo replicates per cell.
_C.SIMULATION.REPLICATES = 100

# Variance of the Riemannian normal noise, (pi / 8)^2 by default.
_C.SIMULATION.SIGMA2 = (math.pi / 8) ** 2

# Stratum weights: `default`, `known` or `empirical`.
_C.SIMULATION.LAMBDA_POLICY = "default"

# Redraws allowed for a replicate with an empty treated or control cell.
_C.SIMULATION.MAX_RESAMPLES = 1000

# ---------------------------------------------------------------------------- #
# Bootstrap options
# ---------------------------------------------------------------------------- #
_C.BOOTSTRAP = CfgNode()

# Number of bootstrap replicates B.
_C.BOOTSTRAP.NUM_SAMPLES = 500

# Confidence level 1 - delta.
_C.BOOTSTRAP.LEVEL = 0.95

# If True, observational analyses rerun matching inside every resample.
_C.BOOTSTRAP.REMATCH = True

# ---------------------------------------------------------------------------- #
# Randomization test options
# ---------------------------------------------------------------------------- #
_C.RANDOMIZATION = CfgNode()

# Number of within-stratum permutations.
_C.RANDOMIZATION.NUM_PERMUTATIONS = 1000

# ---------------------------------------------------------------------------- #
# Matching options
# ---------------------------------------------------------------------------- #
_C.MATCHING = CfgNode()

# Caliper in standard deviations of the logit propensity score.
_C.MATCHING.CALIPER = 0.2

# Ridge added to a singular rank covariance.
_C.MATCHING.RIDGE = 1e-8

# ---------------------------------------------------------------------------- #
# Observational data analysis options
# ---------------------------------------------------------------------------- #
_C.ANALYZE = CfgNode()

# CSV with one row per unit: id, treatment flag and covariates.
_C.ANALYZE.UNITS_PATH = ""

# CSV with one row per unit: id and K landmarks (x1, y1, ..., xK, yK).
_C.ANALYZE.OUTCOMES_PATH = ""

_C.ANALYZE.ID_COLUMN = "id"

_C.ANALYZE.TREATMENT_COLUMN = "z"

# Covariates one-hot encoded before matching.
_C.ANALYZE.CATEGORICAL_COLUMNS = []

# If True, repeat the analysis on the flattened 2K-dimensional preshapes.
_C.ANALYZE.EUCLIDEAN_BASELINE = False

# ---------------------------------------------------------------------------- #
# Geodesic regression check options
# ---------------------------------------------------------------------------- #
_C.THEOREM1 = CfgNode()

# Manifolds to check: `sphere2`, `hyperbolic2`, `euclidean`, `kendall`.
_C.THEOREM1.MANIFOLDS = ["sphere2", "hyperbolic2", "euclidean", "kendall"]

# Dimension used for `euclidean`.
_C.THEOREM1.EUCLIDEAN_DIM = 3

# Landmarks used for `kendall`.
_C.THEOREM1.NUM_LANDMARKS = 10

# Units per random dataset.
_C.THEOREM1.N = 40

_C.THEOREM1.NUM_STRATA = 2

# Treated shares beta_T over which the invariance is checked.
_C.THEOREM1.BETA_T = [0.5, 0.3, 0.7]

# Random datasets per manifold.
_C.THEOREM1.NUM_DATASETS = 5

# Largest accepted gap between |v| and T_alpha.
_C.THEOREM1.TOLERANCE = 1e-4

# Multi-start restarts when the gap exceeds the retry threshold.
_C.THEOREM1.STARTS = 5

# ---------------------------------------------------------------------------- #
# Example 1 options
# ---------------------------------------------------------------------------- #
_C.EXAMPLE1 = CfgNode()

# Colatitude of the three configurations.
_C.EXAMPLE1.C = math.pi / 4

_C.EXAMPLE1.N = 3000

_C.EXAMPLE1.REPLICATES = 20

# Largest accepted distance between the mean naive estimate and its limit.
_C.EXAMPLE1.TOLERANCE = 0.05

# ---------------------------------------------------------------------------- #
# Report options
# ---------------------------------------------------------------------------- #
_C.REPORT = CfgNode()

# File name stem of the JSON report and CSV tables in OUTPUT_DIR.
_C.REPORT.NAME = ""

# Keep every replicate estimate in the JSON report.
_C.REPORT.INCLUDE_REPLICATES = False

# ---------------------------------------------------------------------------- #
# Misc options
# ---------------------------------------------------------------------------- #

# Estimators to run: 1 (geometric median), 2 (Frechet mean).
_C.ALPHAS = [2, 1]

# Seed of every random stream; -1 means unset, which simulation commands
# reject.
_C.RNG_SEED = -1

# Output basedir.
_C.OUTPUT_DIR = "./output"

# Worker processes; capped by METRIC_CAUSAL_THREADS.
_C.NUM_WORKERS = 1

# Subcommand, filled in from the command line.
_C.COMMAND = ""


def _check(condition, message):
    if not condition:
        raise ConfigError(message)


def assert_and_infer_cfg(cfg):
    # SOLVER assertions.
    _check(cfg.SOLVER.MAX_ITERATIONS >= 1, "SOLVER.MAX_ITERATIONS must be positive")
    _check(cfg.SOLVER.STEP_SIZE > 0, "SOLVER.STEP_SIZE must be positive")
    _check(cfg.SOLVER.GRADIENT_TOLERANCE > 0, "SOLVER.GRADIENT_TOLERANCE must be positive")
    _check(cfg.SOLVER.UNIQUENESS_STARTS >= 1, "SOLVER.UNIQUENESS_STARTS must be positive")

    # SIMULATION assertions.
    _check(cfg.SIMULATION.SCENARIO in (1, 2, 3, 4), "SIMULATION.SCENARIO must be 1, 2, 3 or 4")
    _check(len(cfg.SIMULATION.N_LIST) > 0, "SIMULATION.N_LIST is empty")
    _check(all(n >= 2 for n in cfg.SIMULATION.N_LIST), "SIMULATION.N_LIST entries must be >= 2")
    _check(cfg.SIMULATION.REPLICATES >= 1, "SIMULATION.REPLICATES must be positive")
    _check(cfg.SIMULATION.SIGMA2 > 0, "SIMULATION.SIGMA2 must be positive")
    _check(
        cfg.SIMULATION.LAMBDA_POLICY in ("default", "known", "empirical"),
        "SIMULATION.LAMBDA_POLICY must be default, known or empirical",
    )
    _check(cfg.SIMULATION.MAX_RESAMPLES >= 0, "SIMULATION.MAX_RESAMPLES must be nonnegative")

    # Inference assertions.
    _check(cfg.BOOTSTRAP.NUM_SAMPLES >= 100, "BOOTSTRAP.NUM_SAMPLES must be at least 100")
    _check(0.0 < cfg.BOOTSTRAP.LEVEL < 1.0, "BOOTSTRAP.LEVEL must lie in (0, 1)")
    _check(cfg.RANDOMIZATION.NUM_PERMUTATIONS >= 1, "RANDOMIZATION.NUM_PERMUTATIONS must be positive")
    _check(cfg.MATCHING.CALIPER > 0, "MATCHING.CALIPER must be positive")
    _check(cfg.MATCHING.RIDGE > 0, "MATCHING.RIDGE must be positive")

    # THEOREM1 / EXAMPLE1 assertions.
    _check(len(cfg.THEOREM1.MANIFOLDS) > 0, "THEOREM1.MANIFOLDS is empty")
    _check(cfg.THEOREM1.NUM_DATASETS >= 1, "THEOREM1.NUM_DATASETS must be positive")
    _check(len(cfg.THEOREM1.BETA_T) > 0, "THEOREM1.BETA_T is empty")
    _check(all(0.0 < b < 1.0 for b in cfg.THEOREM1.BETA_T), "THEOREM1.BETA_T entries must lie in (0, 1)")
    _check(
        cfg.THEOREM1.N >= 4 * cfg.THEOREM1.NUM_STRATA,
        "THEOREM1.N must allow two treated and two control units per stratum",
    )
    _check(0.0 < cfg.EXAMPLE1.C < math.pi / 2, "EXAMPLE1.C must lie in (0, pi/2)")
    _check(cfg.EXAMPLE1.N >= 2, "EXAMPLE1.N must be at least 2")
    _check(cfg.EXAMPLE1.REPLICATES >= 1, "EXAMPLE1.REPLICATES must be positive")

    # General assertions.
    _check(len(cfg.ALPHAS) > 0, "ALPHAS is empty")
    _check(all(a in (1, 2) for a in cfg.ALPHAS), "ALPHAS entries must be 1 or 2")
    _check(cfg.NUM_WORKERS >= 1, "NUM_WORKERS must be positive")
    _check(cfg.COMMAND in COMMANDS + ("",), "Unknown command '{}'".format(cfg.COMMAND))

    # Command assertions.
    if cfg.COMMAND in ("simulate", "example1", "theorem1"):
        _check(cfg.RNG_SEED >= 0, "A seed is required for {}; pass --seed".format(cfg.COMMAND))
    if cfg.COMMAND == "analyze":
        for key in ("UNITS_PATH", "OUTCOMES_PATH"):
            path = cfg.ANALYZE[key]
            _check(path != "", "ANALYZE.{} is not set".format(key))
            _check(PathManager.isfile(path), "ANALYZE.{} does not exist: {}".format(key, path))

    # Infer the report name from the command.
    if cfg.COMMAND and not cfg.REPORT.NAME:
        cfg.REPORT.NAME = cfg.COMMAND
    return cfg


def get_cfg():
    """
    Get a copy of the default config.
    """
    return assert_and_infer_cfg(_C.clone())
