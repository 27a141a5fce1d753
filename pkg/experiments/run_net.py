#!/usr/bin/env python3

"""Wrapper to run the simulation, analysis and check pipelines."""
import sys

from metric_causal.commands import COMMAND_FUNCS
from metric_causal.utils.errors import MetricCausalError
from metric_causal.utils.parser import load_config, parse_args


def main(argv=None):
    """
    Main function to run the requested pipeline.
    """
    args = parse_args(argv)
    try:
        cfg = load_config(args)
        COMMAND_FUNCS[cfg.COMMAND](cfg)
    except MetricCausalError as err:
        print("error: {}".format(err), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
