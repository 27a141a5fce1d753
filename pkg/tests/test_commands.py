#!/usr/bin/env python3

import os
import numpy as np
import pandas as pd
import pytest
import simplejson

from metric_causal.commands import analyze, example1, simulate, theorem1
from metric_causal.commands.analyze import euclidean_baseline
from metric_causal.commands.simulate import TABLE_COLUMNS
from metric_causal.estimation import StratifiedDataset, estimate_t_alpha
from metric_causal.geometry import ManifoldKind
from metric_causal.geometry.kendall import preshape
from metric_causal.utils.parser import load_config, parse_args
from metric_causal.utils.report import validate_report
from experiments.run_net import main


def _cfg(argv, out):
    return load_config(parse_args(argv + ["--out", str(out)]))


def _report(cfg):
    with open(os.path.join(cfg.OUTPUT_DIR, "{}.json".format(cfg.REPORT.NAME))) as f:
        report = simplejson.load(f)
    return validate_report(report, cfg.COMMAND)


def _read(path):
    with open(path, "rb") as f:
        return f.read()


def test_simulate_is_reproducible(tmp_path):
    argv = ["simulate", "--seed", "11", "--replicates", "3", "SIMULATION.N_LIST", "[32, 48]"]
    first = _cfg(argv, tmp_path / "first")
    second = _cfg(argv, tmp_path / "second")
    table = simulate(first)
    simulate(second)
    assert list(table.columns) == TABLE_COLUMNS
    assert table["N"].tolist() == [32, 32, 48, 48]
    assert table["estimator"].tolist() == ["T2", "T1", "T2", "T1"]
    assert np.all(table["experiment_type"] == 1)
    assert np.all(table["estimate"] >= 0)
    assert _read(tmp_path / "first" / "simulate_table.csv") == _read(tmp_path / "second" / "simulate_table.csv")
    report = _report(first)
    assert report["scenario"] == 1
    assert report["provenance"]["seed"] == 11
    assert [cell["statistic"] for cell in report["cells"]] == ["mae"] * 4


def test_simulate_reports_coverage(tmp_path):
    cfg = _cfg(
        ["simulate", "--seed", "2", "--replicates", "2", "--alpha", "2", "--bootstrap", "100"]
        + ["SIMULATION.SCENARIO", "2", "SIMULATION.N_LIST", "[40]"],
        tmp_path,
    )
    table = simulate(cfg)
    assert table["estimator"].tolist() == ["T2"]
    assert 0.0 <= table["estimate"].iloc[0] <= 1.0
    cell = _report(cfg)["cells"][0]
    assert cell["statistic"] == "coverage"
    assert cell["replicates"] == 2
    assert cell["mean_width"] >= 0


def test_example1(tmp_path):
    cfg = _cfg(["example1", "--seed", "4", "--replicates", "2", "EXAMPLE1.N", "90"], tmp_path)
    replicates = example1(cfg)
    assert replicates["replicate"].tolist() == [0, 1]
    assert np.all(replicates["t2"] >= 0) and np.all(replicates["naive"] >= 0)
    report = _report(cfg)
    assert report["n"] == 90
    assert report["limit"] == pytest.approx(0.0946, abs=1e-3)
    assert os.path.isfile(tmp_path / "example1_replicates.csv")


def test_theorem1(tmp_path):
    cfg = _cfg(
        ["theorem1", "--seed", "21"]
        + ["THEOREM1.MANIFOLDS", "['euclidean', 'sphere2']", "THEOREM1.NUM_DATASETS", "1"]
        + ["THEOREM1.BETA_T", "[0.5, 0.7]"],
        tmp_path,
    )
    checks = theorem1(cfg)
    assert len(checks) == 2 * 2 * 2
    assert set(checks["manifold"]) == {"Euclidean(3)", "Sphere2"}
    report = _report(cfg)
    assert report["passed"]
    assert report["worst_gap"] <= 1e-4


@pytest.fixture
def study_config(tmp_path):
    rng = np.random.default_rng(0)
    n = 40
    ids = ["u{:02d}".format(i) for i in range(n)]
    z = np.tile([1, 0], n // 2)
    units = pd.DataFrame({"id": ids, "z": z, "age": rng.normal(50.0, 10.0, size=n)})
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    rows = []
    for uid, treated in zip(ids, z):
        shape = square + 0.05 * rng.normal(size=(4, 2))
        shape[2] += 0.3 * treated
        rows.append([uid] + shape.reshape(-1).tolist())
    columns = ["id"] + ["{}{}".format(axis, k) for k in range(1, 5) for axis in ("x", "y")]
    outcomes = pd.DataFrame(rows, columns=columns)
    units.to_csv(tmp_path / "units.csv", index=False)
    outcomes.to_csv(tmp_path / "outcomes.csv", index=False)
    return [
        "ANALYZE.UNITS_PATH",
        str(tmp_path / "units.csv"),
        "ANALYZE.OUTCOMES_PATH",
        str(tmp_path / "outcomes.csv"),
    ]


def test_analyze(tmp_path, study_config):
    out = tmp_path / "out"
    cfg = _cfg(
        ["analyze", "--seed", "3", "--bootstrap", "100", "--permutations", "49", "--euclidean-baseline"]
        + study_config,
        out,
    )
    results = analyze(cfg)
    assert results["space"].tolist() == ["kendall", "kendall", "euclidean", "euclidean"]
    assert results["estimator"].tolist() == ["T2", "T1", "T2", "T1"]
    assert np.all((results["p_value"] > 0) & (results["p_value"] <= 1))
    assert np.all(results["ci_lower"] <= results["ci_upper"])
    report = _report(cfg)
    assert report["num_units"] == 40
    assert report["num_landmarks"] == 4
    centers = pd.read_csv(out / "analyze_centers.csv")
    assert len(centers) == 2 * 2 * 4
    balance = pd.read_csv(out / "analyze_balance.csv")
    assert balance["covariate"].tolist() == ["age"]


def test_main_exit_codes(tmp_path):
    assert main(["simulate", "--out", str(tmp_path)]) == 2
    assert main(["analyze", "--out", str(tmp_path), "ANALYZE.UNITS_PATH", str(tmp_path / "none.csv")]) == 2
    assert main(["theorem1", "--seed", "1", "--out", str(tmp_path)] + ["THEOREM1.MANIFOLDS", "['torus']"]) == 2
    argv = ["theorem1", "--seed", "1", "--out", str(tmp_path), "--alpha", "2"]
    argv += ["THEOREM1.MANIFOLDS", "['euclidean']", "THEOREM1.NUM_DATASETS", "1", "THEOREM1.BETA_T", "[0.5]"]
    assert main(argv) == 0


def _square_study(rng, rotate):
    n = 40
    z = np.tile([1, 0], n // 2)
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    shapes = square + 0.05 * rng.normal(size=(n, 4, 2))
    shapes[:, 2] += 0.3 * z[:, None]
    if rotate:
        angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
        cos, sin = np.cos(angles)[:, None, None], np.sin(angles)[:, None, None]
        shapes = np.concatenate(
            [cos * shapes[..., :1] - sin * shapes[..., 1:], sin * shapes[..., :1] + cos * shapes[..., 1:]], axis=-1
        )
    return StratifiedDataset(
        kind=ManifoldKind.kendall(4),
        ids=[str(i) for i in range(n)],
        z=z,
        s=np.ones(n, dtype=int),
        x=np.zeros((n, 0)),
        r=preshape(shapes),
        lambda_hat=np.ones(1),
    )


@pytest.mark.parametrize("alpha", [1, 2])
def test_euclidean_baseline_ignores_unit_rotations(alpha):
    upright = _square_study(np.random.default_rng(8), rotate=False)
    turned = _square_study(np.random.default_rng(8), rotate=True)
    assert estimate_t_alpha(turned, alpha).value == pytest.approx(estimate_t_alpha(upright, alpha).value, abs=1e-7)
    flat_upright = euclidean_baseline(upright)
    flat_turned = euclidean_baseline(turned)
    assert flat_turned.kind == ManifoldKind.euclidean(8)
    assert estimate_t_alpha(flat_turned, alpha).value == pytest.approx(
        estimate_t_alpha(flat_upright, alpha).value, abs=1e-7
    )
    assert estimate_t_alpha(flat_upright, alpha).value > 0.05
