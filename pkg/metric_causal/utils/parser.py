#!/usr/bin/env python3

"""Argument parser functions."""

import argparse
import sys

import metric_causal.utils.misc as misc
from metric_causal.config.defaults import COMMANDS, assert_and_infer_cfg, get_cfg

ALPHA_CHOICES = {"1": [1], "2": [2], "both": [2, 1]}


def parse_args(argv=None):
    """
    Parse the following arguments for the metric_causal command line.
    Args:
        command (str): one of `simulate`, `analyze`, `theorem1`, `example1`.
        cfg (str): path to a YAML config file.
        seed (int): seed of every random stream.
        out (str): output directory.
        alpha (str): `1`, `2` or `both`.
        euclidean_baseline (bool): repeat `analyze` on flattened preshapes.
        replicates (int): Monte Carlo replicates.
        bootstrap (int): bootstrap replicates B.
        permutations (int): randomization test permutations.
        opts (argument): provide addtional options from the command line, it
            overwrites the config loaded from file.
    """
    parser = argparse.ArgumentParser(
        description="Causal effect estimation for outcomes on metric spaces."
    )
    parser.add_argument("command", choices=COMMANDS, help="Pipeline to run")
    parser.add_argument(
        "--config",
        "--cfg",
        dest="cfg_file",
        help="Path to the config file",
        default=None,
        type=str,
    )
    parser.add_argument("--seed", dest="rng_seed", default=None, type=int, help="Random seed")
    parser.add_argument("--out", dest="output_dir", default=None, type=str, help="Output directory")
    parser.add_argument("--alpha", choices=sorted(ALPHA_CHOICES), default=None, help="Estimators to run")
    parser.add_argument(
        "--euclidean-baseline",
        dest="euclidean_baseline",
        action="store_true",
        help="Also analyze the preshapes as flat 2K-dimensional vectors",
    )
    parser.add_argument("--replicates", default=None, type=int, help="Monte Carlo replicates")
    parser.add_argument("--bootstrap", default=None, type=int, help="Bootstrap replicates B")
    parser.add_argument("--permutations", default=None, type=int, help="Randomization test permutations")
    parser.add_argument(
        "opts",
        help="See metric_causal/config/defaults.py for all options",
        default=None,
        nargs="*",
    )
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) == 0:
        parser.print_help()
    return parser.parse_intermixed_args(argv)


def load_config(args):
    """
    Given the arguemnts, load and initialize the configs: defaults, then the
    config file, then `opts`, then the dedicated flags.
    Args:
        args (argument): output of `parse_args`.
    Returns:
        cfg (CfgNode): validated configs.
    Raises:
        ConfigError: the merged configs violate an invariant.
    """
    # Setup cfg.
    cfg = get_cfg()
    # Load config from cfg.
    if args.cfg_file is not None:
        cfg.merge_from_file(args.cfg_file)
    # Load config from command line, overwrite config from opts.
    if args.opts:
        cfg.merge_from_list(args.opts)

    # Inherit parameters from args.
    cfg.COMMAND = args.command
    if args.rng_seed is not None:
        cfg.RNG_SEED = args.rng_seed
    if args.output_dir is not None:
        cfg.OUTPUT_DIR = args.output_dir
    if args.alpha is not None:
        cfg.ALPHAS = ALPHA_CHOICES[args.alpha]
    if args.euclidean_baseline:
        cfg.ANALYZE.EUCLIDEAN_BASELINE = True
    if args.replicates is not None:
        cfg.SIMULATION.REPLICATES = args.replicates
        cfg.EXAMPLE1.REPLICATES = args.replicates
    if args.bootstrap is not None:
        cfg.BOOTSTRAP.NUM_SAMPLES = args.bootstrap
    if args.permutations is not None:
        cfg.RANDOMIZATION.NUM_PERMUTATIONS = args.permutations

    cfg = assert_and_infer_cfg(cfg)
    # Create the output dir.
    misc.make_output_dir(cfg.OUTPUT_DIR)
    return cfg
