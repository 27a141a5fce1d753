#!/usr/bin/env python3

"""CSV ingestion of observational studies with landmark-shape outcomes."""

from dataclasses import dataclass, field
from typing import List
import numpy as np
import pandas as pd
from fvcore.common.file_io import PathManager

import metric_causal.utils.logging as logging
from metric_causal.estimation.estimands import StratifiedDataset
from metric_causal.geometry import kendall_preshape
from metric_causal.geometry.types import ManifoldKind
from metric_causal.utils.errors import IngestionError, ValidationError

logger = logging.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Study:
    """An ingested study: unstratified dataset plus covariate names and raw landmarks."""

    data: StratifiedDataset
    covariate_names: List[str]
    landmarks: np.ndarray = field(repr=False)


def _read_csv(path):
    if not PathManager.exists(path):
        raise IngestionError("{} not found".format(path), offenders=[path])
    with PathManager.open(path, "r") as f:
        return pd.read_csv(f)


def _check_ids(frame, id_column, path):
    if id_column not in frame.columns:
        raise IngestionError("{} has no id column '{}'".format(path, id_column))
    ids = frame[id_column].astype(str)
    duplicated = sorted(set(ids[ids.duplicated()]))
    if duplicated:
        raise IngestionError(
            "{} repeats unit ids {}".format(path, duplicated[:10]), offenders=duplicated
        )
    return ids


def load_landmarks(path, id_column="id"):
    """
    Reads one landmark configuration per row: the id column followed by
    x1, y1, ..., xK, yK. K is inferred from the header.
    Returns:
        ids (Series): unit ids as strings.
        landmarks (ndarray): N x K x 2 coordinates.
    """
    frame = _read_csv(path)
    ids = _check_ids(frame, id_column, path)
    values = frame.drop(columns=[id_column])
    if values.shape[1] % 2 or values.shape[1] < 6:
        raise IngestionError(
            "{} must hold 2K >= 6 landmark columns, got {}".format(path, values.shape[1])
        )
    values = values.apply(pd.to_numeric, errors="coerce")
    bad = ids[values.isna().any(axis=1)].tolist()
    if bad:
        raise IngestionError("{}: non-numeric landmarks for units {}".format(path, bad[:10]), offenders=bad)
    landmarks = values.to_numpy(dtype=np.float64).reshape(len(frame), -1, 2)
    return ids, landmarks


def load_units(path, id_column="id", treatment_column="z", categorical_columns=()):
    """
    Reads the unit table: id, treatment flag and covariates. Categorical
    columns are one-hot encoded with the first level dropped.
    Returns:
        ids (Series): unit ids as strings.
        z (ndarray): treatment flags.
        covariates (DataFrame): numeric covariate columns.
    """
    frame = _read_csv(path)
    ids = _check_ids(frame, id_column, path)
    if treatment_column not in frame.columns:
        raise IngestionError("{} has no treatment column '{}'".format(path, treatment_column))
    z = pd.to_numeric(frame[treatment_column], errors="coerce")
    bad = ids[~z.isin([0, 1])].tolist()
    if bad:
        raise IngestionError("{}: treatment must be 0 or 1 for units {}".format(path, bad[:10]), offenders=bad)
    missing = [c for c in categorical_columns if c not in frame.columns]
    if missing:
        raise IngestionError("{} lacks categorical columns {}".format(path, missing), offenders=missing)
    covariates = frame.drop(columns=[id_column, treatment_column])
    covariates = pd.get_dummies(covariates, columns=list(categorical_columns), drop_first=True, dtype=float)
    covariates = covariates.apply(pd.to_numeric, errors="coerce")
    bad = ids[covariates.isna().any(axis=1)].tolist()
    if bad:
        raise IngestionError("{}: missing covariates for units {}".format(path, bad[:10]), offenders=bad)
    return ids, z.to_numpy(dtype=np.int64), covariates.astype(np.float64)


def load_study(units_path, outcomes_path, id_column="id", treatment_column="z", categorical_columns=()):
    """
    Joins the unit table and the landmark table by id and maps every
    configuration to its Kendall preshape.
    Returns:
        study (Study): one placeholder stratum, to be replaced by matching.
    Raises:
        IngestionError: the two files disagree on ids, or a configuration is
            degenerate.
    """
    unit_ids, z, covariates = load_units(units_path, id_column, treatment_column, categorical_columns)
    outcome_ids, landmarks = load_landmarks(outcomes_path, id_column)
    offenders = sorted(set(unit_ids) ^ set(outcome_ids))
    if offenders:
        raise IngestionError(
            "Ids differ between {} and {}: {}".format(units_path, outcomes_path, offenders[:10]),
            offenders=offenders,
        )
    if z.min() == z.max():
        raise IngestionError("{} needs both treated and control units".format(units_path))
    order = pd.Index(outcome_ids).get_indexer(unit_ids)
    landmarks = landmarks[order]

    coords = []
    bad = []
    for uid, config in zip(unit_ids, landmarks):
        try:
            coords.append(kendall_preshape(config).coords)
        except ValidationError as err:
            logger.debug("Unit {}: {}".format(uid, err))
            bad.append(uid)
    if bad:
        raise IngestionError("Degenerate landmark configurations for units {}".format(bad[:10]), offenders=bad)
    num_landmarks = landmarks.shape[1]
    logger.info(
        "Loaded {} units ({} treated) with K={} landmarks and {} covariates".format(
            len(z), int(z.sum()), num_landmarks, covariates.shape[1]
        )
    )
    data = StratifiedDataset(
        kind=ManifoldKind.kendall(num_landmarks),
        ids=unit_ids.to_numpy(),
        z=z,
        s=np.ones(len(z), dtype=np.int64),
        x=covariates.to_numpy(),
        r=np.stack(coords),
        lambda_hat=np.ones(1),
    )
    return Study(data=data, covariate_names=list(covariates.columns), landmarks=landmarks)


def load_study_from_cfg(cfg):
    return load_study(
        cfg.ANALYZE.UNITS_PATH,
        cfg.ANALYZE.OUTCOMES_PATH,
        id_column=cfg.ANALYZE.ID_COLUMN,
        treatment_column=cfg.ANALYZE.TREATMENT_COLUMN,
        categorical_columns=cfg.ANALYZE.CATEGORICAL_COLUMNS,
    )
