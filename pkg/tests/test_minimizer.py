import numpy as np
import pytest

from onofri_lab.core.errors import ConfigurationError, RetractionError
from onofri_lab.solvers.meanfield import AxiProfile
from onofri_lab.solvers.minimizer import (
    ConstraintSpec,
    dirichlet_average,
    functional_J,
    gradient_J,
    lambda_sq,
    minimize,
    multipliers,
    normalize_mass,
    random_profile,
    retract_to_M1,
    sample_lower_bound,
    stationarity_residual,
    x3_moment,
)
from onofri_lab.sphere.fields import ScalarField


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_constrained_minimum_is_zero_near_one_half(seed):
    init = random_profile(np.random.default_rng(seed), 32, amplitude=0.3)
    result = minimize(0.49, ConstraintSpec(0.5), init=init, seed=seed)
    assert result.converged
    assert abs(result.J) < 1e-6
    assert result.sup_norm < 1e-3
    assert np.max(np.abs(result.multipliers)) < 1e-6
    assert result.stationarity_residual < 1e-6
    assert result.feasible_moments and result.feasible_lambda
    record = result.to_record()
    assert record["seed"] == seed
    assert record["feasible"] == {"moments": True, "lambda_bound": True}


def test_minimum_is_zero_above_one_half():
    init = random_profile(np.random.default_rng(3), 32, amplitude=0.3)
    result = minimize(0.6, ConstraintSpec(0.5), init=init, seed=3)
    assert result.converged
    assert abs(result.J) < 1e-6
    assert result.stationarity_residual < 1e-6
    assert result.feasible_moments


def test_multipliers_of_linear_profile():
    # λ₃ = (3/2)∫(1 + t)t·e^{−2t}dt = −3e^{−2}
    lam = multipliers(AxiProfile.legendre(1, 1.0, lmax=32), 0.5)
    assert lam == pytest.approx([0.0, 0.0, -3.0 * np.exp(-2.0)], abs=1e-12)


@pytest.mark.slow
def test_seed_sweep_near_one_half():
    for seed in range(10):
        init = random_profile(np.random.default_rng(seed), 32, amplitude=0.3)
        result = minimize(0.49, ConstraintSpec(0.5), init=init, seed=seed)
        assert result.converged, seed
        assert abs(result.J) < 1e-6
        assert result.feasible_moments and result.feasible_lambda


def test_penalty_mode_converges():
    init = random_profile(np.random.default_rng(7), 32, amplitude=0.3)
    result = minimize(0.49, ConstraintSpec(0.5, mode="penalty"), init=init)
    assert result.converged
    assert result.feasible_moments
    assert abs(result.J) < 1e-6


def test_gradient_matches_finite_differences(rng):
    a = 0.4
    h = 1e-5
    for _ in range(20):
        u = random_profile(rng, 32, amplitude=0.5)
        v = random_profile(rng, 32, amplitude=0.5).values
        plus = functional_J(AxiProfile.from_values(u.values + h * v, 32), a)
        minus = functional_J(AxiProfile.from_values(u.values - h * v, 32), a)
        fd = (plus - minus) / (2 * h)
        exact = u.grid.average(gradient_J(u, a) * v)
        assert abs(fd - exact) < 1e-6 * abs(exact)


def test_retraction_and_normalization(rng):
    w = random_profile(rng, 32, amplitude=0.5)
    u = normalize_mass(retract_to_M1(w))
    assert abs(x3_moment(u)) < 1e-12
    assert u.grid.average(np.exp(2.0 * u.values)) == pytest.approx(1.0, abs=1e-12)


def test_retraction_fails_for_concentrated_field():
    with pytest.raises(RetractionError) as excinfo:
        retract_to_M1(AxiProfile.legendre(1, 5.0, lmax=32))
    assert excinfo.value.value <= 0
    # Від'ємна скоригована густина з'являється у північній півсфері
    assert excinfo.value.node[2] > 0


def test_functional_values():
    zero = AxiProfile.zeros(32)
    assert functional_J(zero, 0.4) == pytest.approx(0.0, abs=1e-12)
    assert lambda_sq(zero) == pytest.approx(0.0, abs=1e-12)
    p = AxiProfile.legendre(2, 1.0, lmax=32)
    assert dirichlet_average(p) == pytest.approx(6.0 / 5.0)
    assert stationarity_residual(zero, 0.4) == pytest.approx(0.0, abs=1e-12)


def test_functional_j_on_sphere_fields(grid16):
    field = ScalarField.constant(grid16, 0.0)
    assert functional_J(field, 0.5) == pytest.approx(0.0, abs=1e-14)


def test_constraint_spec_validation():
    with pytest.raises(ConfigurationError):
        ConstraintSpec(0.7)
    with pytest.raises(ConfigurationError):
        ConstraintSpec(0.0)
    with pytest.raises(ConfigurationError):
        ConstraintSpec(0.5, mode="newton")
    with pytest.raises(ConfigurationError):
        ConstraintSpec(0.5, mode="penalty", weight=0.0)


def test_minimize_rejects_a_outside_range():
    with pytest.raises(ConfigurationError):
        minimize(0.3, ConstraintSpec(0.5))
    with pytest.raises(ConfigurationError):
        minimize(1.0, ConstraintSpec(0.5))


def test_sample_lower_bound_positive():
    sample = sample_lower_bound(3.0, 0.05, count=200, seed=0)
    assert sample.accepted > 0
    assert sample.positive
    record = sample.to_record()
    assert record["empirical_C0"] == pytest.approx(sample.minimum)
    with pytest.raises(ConfigurationError):
        sample_lower_bound(0.0, 0.05)
