#!/usr/bin/env python3

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from metric_causal.estimation import (
    StratifiedDataset,
    Unit,
    empirical_lambda,
    estimate_t_alpha,
    known_lambda,
    naive_nested_estimator,
)
from metric_causal.geometry import ManifoldKind, ManifoldPoint, build_manifold
from metric_causal.utils.errors import EmptyCellError, EstimationError, ValidationError

from conftest import KINDS, random_cluster

ids = [str(k) for k in KINDS]


def _dataset(kind, r, z, s, lambda_hat=None):
    n = len(z)
    return StratifiedDataset(
        kind=kind,
        ids=[str(i) for i in range(n)],
        z=z,
        s=s,
        x=np.zeros((n, 0)),
        r=r,
        lambda_hat=empirical_lambda(s) if lambda_hat is None else lambda_hat,
    )


def _random_design(rng, n, num_strata):
    s = np.arange(n) % num_strata + 1
    z = (np.arange(n) // num_strata) % 2
    order = rng.permutation(n)
    return z[order], s[order]


def test_t2_on_the_line():
    # Stratum means: treated (3, 5), control (1, 1).
    r = np.array([[2.0], [4.0], [1.0], [4.0], [6.0], [0.0], [2.0]])
    z = [1, 1, 0, 1, 1, 0, 0]
    s = [1, 1, 1, 2, 2, 2, 2]
    data = _dataset(ManifoldKind.euclidean(1), r, z, s, lambda_hat=[0.5, 0.5])
    estimate = estimate_t_alpha(data, 2)
    assert estimate.value == pytest.approx(3.0, abs=1e-9)
    assert estimate.converged
    assert estimate.treated_center.coords[0] == pytest.approx(4.0)
    assert estimate.control_center.coords[0] == pytest.approx(1.0)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
@pytest.mark.parametrize("alpha", [1, 2])
def test_identical_outcomes_give_zero(kind, alpha):
    manifold = build_manifold(kind)
    q = manifold.random_point(np.random.default_rng(13))
    z, s = _random_design(np.random.default_rng(14), 12, 2)
    data = _dataset(kind, np.tile(q, (12, 1)), z, s)
    assert estimate_t_alpha(data, alpha).value == pytest.approx(0.0, abs=1e-9)
    assert naive_nested_estimator(data, alpha).value == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
@pytest.mark.parametrize("alpha", [1, 2])
def test_naive_equals_t_alpha_with_one_stratum(kind, alpha):
    rng = np.random.default_rng(15)
    z, s = _random_design(rng, 20, 1)
    data = _dataset(kind, random_cluster(kind, rng, 20, spread=0.4), z, s)
    assert naive_nested_estimator(data, alpha).value == pytest.approx(
        estimate_t_alpha(data, alpha).value, abs=1e-9
    )


@pytest.mark.parametrize("seed", range(3))
def test_naive_equals_t2_on_euclidean_space(seed):
    rng = np.random.default_rng(seed)
    kind = ManifoldKind.euclidean(3)
    z, s = _random_design(rng, 30, 3)
    data = _dataset(kind, rng.normal(size=(30, 3)), z, s)
    assert naive_nested_estimator(data, 2).value == pytest.approx(estimate_t_alpha(data, 2).value, abs=1e-9)


def test_t_alpha_is_symmetric_in_the_groups():
    rng = np.random.default_rng(16)
    kind = ManifoldKind.sphere2()
    z, s = _random_design(rng, 16, 2)
    r = random_cluster(kind, rng, 16, spread=0.5)
    swapped = _dataset(kind, r, 1 - z, s)
    data = _dataset(kind, r, z, s)
    for alpha in (1, 2):
        assert estimate_t_alpha(data, alpha).value == pytest.approx(
            estimate_t_alpha(swapped, alpha).value, abs=1e-8
        )


def test_empty_cell_rejected():
    r = np.zeros((4, 1))
    with pytest.raises(EmptyCellError) as info:
        _dataset(ManifoldKind.euclidean(1), r, [1, 0, 1, 1], [1, 1, 2, 2])
    assert info.value.stratum == 2
    assert isinstance(info.value, EstimationError)


@pytest.mark.parametrize(
    "changes",
    [
        {"z": [1, 2, 1, 0]},
        {"s": [0, 1, 1, 1]},
        {"ids": ["a", "a", "b", "c"]},
        {"lambda_hat": [0.7, 0.7]},
        {"r": np.zeros((4, 2))},
    ],
)
def test_invalid_datasets(changes):
    fields = dict(
        kind=ManifoldKind.euclidean(1),
        ids=["a", "b", "c", "d"],
        z=[1, 0, 1, 0],
        s=[1, 1, 2, 2],
        x=np.zeros((4, 0)),
        r=np.zeros((4, 1)),
        lambda_hat=[0.5, 0.5],
    )
    fields.update(changes)
    with pytest.raises(ValidationError):
        StratifiedDataset(**fields)


def test_units_round_trip():
    kind = ManifoldKind.sphere2()
    rng = np.random.default_rng(17)
    z, s = _random_design(rng, 8, 2)
    data = _dataset(kind, random_cluster(kind, rng, 8), z, s)
    rebuilt = StratifiedDataset.from_units(data.units, data.lambda_hat)
    assert np.array_equal(rebuilt.r, data.r)
    assert np.array_equal(rebuilt.z, data.z)
    assert rebuilt.ids.tolist() == data.ids.tolist()


def test_unit_rejects_mismatched_potential_outcome():
    kind = ManifoldKind.euclidean(1)
    a, b = ManifoldPoint(kind, np.array([1.0])), ManifoldPoint(kind, np.array([2.0]))
    with pytest.raises(ValidationError):
        Unit(id="u", z=1, s=1, x=[], r=a, potential=(b, a))


def test_select():
    kind = ManifoldKind.euclidean(1)
    r = np.arange(6, dtype=float)[:, None]
    data = _dataset(kind, r, [1, 0, 1, 0, 1, 0], [1, 1, 1, 1, 1, 1])
    two = data.select(np.arange(6), [1, 1, 2, 2, 2, 2])
    assert two.xi == 2
    assert np.allclose(two.lambda_hat, [1 / 3, 2 / 3])
    assert two.m_treated.tolist() == [1, 2]
    subset = data.select([0, 1, 4, 5], [1, 1, 2, 2])
    assert subset.ids.tolist() == ["0", "1", "4", "5"]
    assert np.allclose(subset.r[:, 0], [0, 1, 4, 5])
    assert np.allclose(subset.lambda_hat, [0.5, 0.5])


def test_lambda_helpers():
    assert np.allclose(empirical_lambda([1, 1, 2, 3]), [0.5, 0.25, 0.25])
    assert np.allclose(known_lambda([0.2, 0.8]), [0.2, 0.8])
    with pytest.raises(ValidationError):
        known_lambda([0.2, 0.7])


@pytest.mark.parametrize("alpha", [1, 2])
def test_t_alpha_is_invariant_under_sphere_rotations(alpha):
    rng = np.random.default_rng(20)
    kind = ManifoldKind.sphere2()
    z, s = _random_design(rng, 24, 2)
    r = random_cluster(kind, rng, 24, spread=0.5)
    rotation = Rotation.random(random_state=21).as_matrix()
    rotated = r @ rotation.T
    rotated /= np.linalg.norm(rotated, axis=1, keepdims=True)
    assert estimate_t_alpha(_dataset(kind, rotated, z, s), alpha).value == pytest.approx(
        estimate_t_alpha(_dataset(kind, r, z, s), alpha).value, abs=1e-8
    )


@pytest.mark.parametrize("alpha", [1, 2])
def test_t_alpha_scales_with_euclidean_outcomes(alpha):
    rng = np.random.default_rng(22)
    kind = ManifoldKind.euclidean(3)
    z, s = _random_design(rng, 30, 3)
    r = rng.normal(size=(30, 3))
    base = estimate_t_alpha(_dataset(kind, r, z, s), alpha).value
    scaled = estimate_t_alpha(_dataset(kind, 3.5 * r, z, s), alpha).value
    assert scaled == pytest.approx(3.5 * base, rel=1e-7)


@pytest.mark.parametrize("seed", range(3))
def test_t2_matches_weighted_mean_differences(seed):
    rng = np.random.default_rng(seed)
    kind = ManifoldKind.euclidean(4)
    z, s = _random_design(rng, 36, 3)
    r = rng.normal(size=(36, 4)) + 0.5 * z[:, None]
    data = _dataset(kind, r, z, s)
    shift = sum(
        share * (r[(s == k) & (z == 1)].mean(axis=0) - r[(s == k) & (z == 0)].mean(axis=0))
        for k, share in zip((1, 2, 3), data.lambda_hat)
    )
    assert estimate_t_alpha(data, 2).value == pytest.approx(np.linalg.norm(shift), abs=1e-9)
