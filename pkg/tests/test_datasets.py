#!/usr/bin/env python3

import numpy as np
import pandas as pd
import pytest

from metric_causal.datasets import load_landmarks, load_study, load_units
from metric_causal.geometry import ManifoldKind
from metric_causal.utils.errors import IngestionError

TRIANGLE = [0.0, 0.0, 1.0, 0.0, 0.3, 0.8]


def _landmark_rows(rng, ids):
    rows = []
    for uid in ids:
        rows.append([uid] + list(np.asarray(TRIANGLE) + 0.05 * rng.normal(size=6)))
    return pd.DataFrame(rows, columns=["id", "x1", "y1", "x2", "y2", "x3", "y3"])


@pytest.fixture
def study_files(tmp_path):
    rng = np.random.default_rng(0)
    ids = ["a", "b", "c", "d", "e", "f"]
    units = pd.DataFrame(
        {
            "id": ids,
            "z": [1, 0, 1, 0, 1, 0],
            "age": [30.0, 41.0, 52.0, 23.0, 35.0, 60.0],
            "gender": ["f", "m", "m", "f", "f", "m"],
        }
    )
    units_path = tmp_path / "units.csv"
    outcomes_path = tmp_path / "outcomes.csv"
    units.to_csv(units_path, index=False)
    # Outcome rows in another order than the unit rows.
    _landmark_rows(rng, ids[::-1]).to_csv(outcomes_path, index=False)
    return str(units_path), str(outcomes_path)


def test_load_study(study_files):
    study = load_study(*study_files, categorical_columns=["gender"])
    data = study.data
    assert data.kind == ManifoldKind.kendall(3)
    assert data.ids.tolist() == ["a", "b", "c", "d", "e", "f"]
    assert data.z.tolist() == [1, 0, 1, 0, 1, 0]
    assert study.covariate_names == ["age", "gender_m"]
    assert data.x[:, 1].tolist() == [0.0, 1.0, 1.0, 0.0, 0.0, 1.0]
    assert study.landmarks.shape == (6, 3, 2)
    assert data.xi == 1
    outcomes = pd.read_csv(study_files[1]).set_index("id")
    assert np.allclose(study.landmarks[0].reshape(-1), outcomes.loc["a"].to_numpy())


def test_id_mismatch_lists_offenders(study_files, tmp_path):
    units_path, outcomes_path = study_files
    outcomes = pd.read_csv(outcomes_path)
    outcomes.loc[outcomes["id"] == "c", "id"] = "zz"
    other = tmp_path / "other.csv"
    outcomes.to_csv(other, index=False)
    with pytest.raises(IngestionError) as info:
        load_study(units_path, str(other))
    assert info.value.offenders == ["c", "zz"]


def test_missing_file(tmp_path, study_files):
    with pytest.raises(IngestionError):
        load_study(str(tmp_path / "nothing.csv"), study_files[1])


def test_duplicate_ids(tmp_path):
    path = tmp_path / "units.csv"
    pd.DataFrame({"id": ["a", "a", "b"], "z": [1, 0, 1]}).to_csv(path, index=False)
    with pytest.raises(IngestionError) as info:
        load_units(str(path))
    assert info.value.offenders == ["a"]


@pytest.mark.parametrize(
    "frame",
    [
        pd.DataFrame({"id": ["a", "b"], "z": [1, 2], "age": [1.0, 2.0]}),
        pd.DataFrame({"id": ["a", "b"], "treated": [1, 0], "age": [1.0, 2.0]}),
        pd.DataFrame({"id": ["a", "b"], "z": [1, 0], "age": [1.0, None]}),
    ],
)
def test_invalid_unit_tables(tmp_path, frame):
    path = tmp_path / "units.csv"
    frame.to_csv(path, index=False)
    with pytest.raises(IngestionError):
        load_units(str(path))


def test_missing_categorical_column(tmp_path):
    path = tmp_path / "units.csv"
    pd.DataFrame({"id": ["a", "b"], "z": [1, 0]}).to_csv(path, index=False)
    with pytest.raises(IngestionError):
        load_units(str(path), categorical_columns=["site"])


def test_landmark_table_shape(tmp_path):
    path = tmp_path / "outcomes.csv"
    pd.DataFrame({"id": ["a"], "x1": [0.0], "y1": [0.0], "x2": [1.0], "y2": [1.0]}).to_csv(path, index=False)
    with pytest.raises(IngestionError):
        load_landmarks(str(path))
    ids, landmarks = load_landmarks(str(_write_triangle(tmp_path)))
    assert ids.tolist() == ["a"]
    assert np.allclose(landmarks[0], np.reshape(TRIANGLE, (3, 2)))


def _write_triangle(tmp_path):
    path = tmp_path / "triangle.csv"
    pd.DataFrame([["a"] + TRIANGLE], columns=["id", "x1", "y1", "x2", "y2", "x3", "y3"]).to_csv(path, index=False)
    return path


def test_degenerate_configuration(study_files, tmp_path):
    units_path, outcomes_path = study_files
    outcomes = pd.read_csv(outcomes_path)
    outcomes.loc[outcomes["id"] == "b", ["x1", "y1", "x2", "y2", "x3", "y3"]] = 1.0
    other = tmp_path / "degenerate.csv"
    outcomes.to_csv(other, index=False)
    with pytest.raises(IngestionError) as info:
        load_study(units_path, str(other))
    assert info.value.offenders == ["b"]
