#!/usr/bin/env python3

"""Run reports: provenance, schema checks, JSON and CSV writers."""

import hashlib
import numbers
import os
import numpy as np
import simplejson
from fvcore.common.file_io import PathManager

import metric_causal
import metric_causal.utils.logging as logging
from metric_causal.utils.errors import ValidationError

logger = logging.get_logger(__name__)

_NUMBER = numbers.Real

_PROVENANCE = {"config_hash": str, "seed": int, "version": str, "command": str}

# Required top-level keys and their types, per command.
REPORT_SCHEMA = {
    "simulate": {"provenance": dict, "scenario": int, "sigma2": _NUMBER, "cells": list},
    "analyze": {
        "provenance": dict,
        "num_units": int,
        "num_landmarks": int,
        "matching": dict,
        "results": list,
    },
    "theorem1": {"provenance": dict, "checks": list, "worst_gap": _NUMBER, "passed": bool},
    "example1": {
        "provenance": dict,
        "c": _NUMBER,
        "n": int,
        "limit": _NUMBER,
        "mean_t2": _NUMBER,
        "mean_naive": _NUMBER,
        "passed": bool,
    },
}


def config_hash(cfg):
    return hashlib.sha256(cfg.dump().encode("utf-8")).hexdigest()


def provenance(cfg):
    """Everything needed to regenerate a report: config digest, seed, version and command."""
    return {
        "config_hash": config_hash(cfg),
        "seed": int(cfg.RNG_SEED),
        "version": metric_causal.__version__,
        "command": cfg.COMMAND,
    }


def _check_types(entries, schema, where):
    for key, expected in schema.items():
        if key not in entries:
            raise ValidationError("{} misses key '{}'".format(where, key))
        value = entries[key]
        if expected is int:
            ok = isinstance(value, numbers.Integral) and not isinstance(value, bool)
        elif expected is _NUMBER:
            ok = isinstance(value, _NUMBER) and not isinstance(value, bool)
        else:
            ok = isinstance(value, expected)
        if not ok:
            raise ValidationError(
                "{} key '{}' has type {}, expected {}".format(
                    where, key, type(value).__name__, expected.__name__
                )
            )


def validate_report(report, command):
    """
    Checks a report against REPORT_SCHEMA.
    Raises:
        ValidationError: a key is missing or has the wrong type.
    """
    if command not in REPORT_SCHEMA:
        raise ValidationError("No report schema for command '{}'".format(command))
    _check_types(report, REPORT_SCHEMA[command], "{} report".format(command))
    _check_types(report["provenance"], _PROVENANCE, "provenance")
    if report["provenance"]["command"] != command:
        raise ValidationError("Report provenance names command '{}'".format(report["provenance"]["command"]))
    return report


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError("Object of type {} is not JSON serializable".format(type(value).__name__))


def write_report(cfg, report):
    """
    Validates and writes `<REPORT.NAME>.json` to OUTPUT_DIR.
    Returns:
        path (str): written file.
    """
    report = dict(report, provenance=provenance(cfg))
    validate_report(report, cfg.COMMAND)
    path = os.path.join(cfg.OUTPUT_DIR, "{}.json".format(cfg.REPORT.NAME))
    with PathManager.open(path, "w") as f:
        f.write(simplejson.dumps(report, sort_keys=True, indent=2, ignore_nan=True, default=_to_builtin))
    logger.info("Wrote report {}".format(path))
    return path


def write_table(cfg, frame, suffix, index=False):
    """
    Writes a pandas DataFrame as `<REPORT.NAME>_<suffix>.csv` in OUTPUT_DIR.
    """
    path = os.path.join(cfg.OUTPUT_DIR, "{}_{}.csv".format(cfg.REPORT.NAME, suffix))
    with PathManager.open(path, "w") as f:
        frame.to_csv(f, index=index)
    logger.info("Wrote table {}".format(path))
    return path
