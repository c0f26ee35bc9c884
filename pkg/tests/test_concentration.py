import numpy as np
import pytest

from onofri_lab.core.errors import ConfigurationError, InfeasibleConfigurationError
from onofri_lab.analysis.concentration import (
    PointMeasure,
    centroid,
    lambda_infty,
    min_lambda_over_configs,
    pairwise_dots,
)
from onofri_lab.sphere.geometry import Rotation
from onofri_lab.sphere.moments import conjugate, lambda_norm_sq


def test_antipodal_pair():
    mu = PointMeasure([0.5, 0.5], [[0, 0, 1], [0, 0, -1]])
    assert np.allclose(centroid(mu), 0)
    assert lambda_norm_sq(lambda_infty(mu)) == pytest.approx(2 / 3)


def test_octahedron_is_isotropic():
    pts = np.vstack([np.eye(3), -np.eye(3)])
    assert lambda_norm_sq(lambda_infty(PointMeasure.uniform(pts))) < 1e-30


def test_transformed_measure_is_equivariant(rng):
    mu = PointMeasure.uniform(np.eye(3))
    A = Rotation.random(rng)
    assert np.allclose(
        lambda_infty(mu.transformed(A)).entries, conjugate(lambda_infty(mu), A).entries, atol=1e-14,
    )


def test_measure_validation():
    with pytest.raises(ConfigurationError):
        PointMeasure([0.5, 0.4], [[0, 0, 1], [0, 0, -1]])
    with pytest.raises(ConfigurationError):
        PointMeasure([0.5, 0.5], [[0, 0, 1], [0, 0, 1]])


def test_infeasible_sizes():
    with pytest.raises(InfeasibleConfigurationError):
        min_lambda_over_configs(1)
    with pytest.raises(InfeasibleConfigurationError):
        min_lambda_over_configs(3, even_symmetric=True)


def test_pair_is_analytic():
    result = min_lambda_over_configs(2)
    assert result.infimum == pytest.approx(2 / 3)
    assert result.measure.size == 2


def test_triangle():
    result = min_lambda_over_configs(3, starts=30, seed=1)
    assert result.infimum == pytest.approx(1 / 6, abs=1e-6)
    assert np.allclose(pairwise_dots(result.measure), -0.5, atol=1e-4)
    assert np.allclose(result.measure.weights, 1 / 3, atol=1e-4)


def test_tetrahedron_reaches_zero():
    result = min_lambda_over_configs(4, starts=30, seed=1)
    assert result.infimum < 1e-10


def test_even_four_is_orthogonal_pairs():
    result = min_lambda_over_configs(4, even_symmetric=True, starts=30, seed=1)
    assert result.infimum == pytest.approx(1 / 6, abs=1e-6)


def test_search_is_deterministic():
    a = min_lambda_over_configs(3, starts=8, seed=5, threads=1).to_record()
    b = min_lambda_over_configs(3, starts=8, seed=5, threads=4).to_record()
    assert a == b


@pytest.mark.slow
def test_full_search_thresholds():
    assert min_lambda_over_configs(3, starts=200).infimum == pytest.approx(1 / 6, abs=1e-6)
    assert min_lambda_over_configs(4, starts=200).infimum < 1e-10
    assert min_lambda_over_configs(4, even_symmetric=True, starts=200).infimum == pytest.approx(1 / 6, abs=1e-6)
