import numpy as np
import pytest

from onofri_lab.core.errors import ConfigurationError, OverflowGuardError
from onofri_lab.solvers.meanfield import (
    AxiProfile,
    bifurcation_points,
    collocation,
    diagnostics,
    jacobian,
    kazdan_warner_defect,
    newton_iterate,
    newton_solve,
    residual,
    residual_values,
    trivial_spectrum,
)


def _random_start(rng, lmax=64, sup=0.5):
    c = np.zeros(lmax + 1)
    degrees = np.arange(1, 7)
    c[1:7] = rng.standard_normal(6) / (degrees + 1.0) ** 2
    c[0] = rng.standard_normal() * 0.1
    profile = AxiProfile(c)
    return profile.scaled(sup * rng.uniform(0.2, 1.0) / profile.sup_norm())


def test_newton_converges_to_zero_above_one_half(rng):
    for _ in range(20):
        init = _random_start(rng)
        assert init.sup_norm() <= 0.5 + 1e-12
        result = newton_iterate(0.6, init, tol=1e-11)
        assert result.iterations <= 25
        assert result.profile.sup_norm() < 1e-10


def test_converged_start_takes_no_steps():
    result = newton_iterate(0.6, AxiProfile.zeros(64))
    assert result.iterations == 0
    assert result.residual_norm == pytest.approx(0.0, abs=1e-12)
    assert newton_solve(0.6, AxiProfile.zeros(32)).sup_norm() == pytest.approx(0.0, abs=1e-12)


def test_jacobian_matches_finite_differences(rng):
    a = 0.45
    h = 1e-6
    for _ in range(20):
        u = _random_start(rng, lmax=32)
        v = rng.standard_normal(u.grid.size)
        fd = (residual_values(u.grid, u.values + h * v, a) - residual_values(u.grid, u.values - h * v, a)) / (2 * h)
        exact = jacobian(u, a) @ v
        assert np.max(np.abs(fd - exact)) < 1e-6 * max(1.0, np.max(np.abs(exact)))


def test_minus_laplacian_on_legendre_modes():
    grid = collocation(32)
    for degree in (1, 2, 5):
        values = grid.values(np.eye(grid.size)[degree])
        assert np.allclose(grid.minus_laplacian(values), degree * (degree + 1) * values, atol=1e-10)


def test_trivial_spectrum_and_bifurcations():
    spectrum = dict(trivial_spectrum(0.5, lmax=3))
    assert spectrum[0] == -2.0
    assert spectrum[1] == pytest.approx(-1.0)
    assert spectrum[2] == pytest.approx(1.0)
    assert bifurcation_points(3) == pytest.approx([1.0, 1.0 / 3.0, 1.0 / 6.0])
    # На a = 1/3 вироджується саме степінь 2
    degenerate = [l for l, value in trivial_spectrum(1.0 / 3.0, lmax=6) if abs(value) < 1e-12]
    assert degenerate == [2]


def test_kazdan_warner_defect():
    assert kazdan_warner_defect(AxiProfile.zeros(32)) == pytest.approx(0.0, abs=1e-12)
    assert kazdan_warner_defect(AxiProfile.legendre(2, 0.3, lmax=32)) < 1e-14
    assert kazdan_warner_defect(AxiProfile.legendre(1, 0.3, lmax=32)) > 1e-2


def test_residual_of_zero_profile_is_zero():
    assert np.max(np.abs(residual(AxiProfile.zeros(32), 0.4))) == pytest.approx(0.0, abs=1e-12)


def test_overflow_guard():
    with pytest.raises(OverflowGuardError) as excinfo:
        residual(AxiProfile.legendre(0, 400.0, lmax=32), 0.5)
    assert excinfo.value.max_value == pytest.approx(400.0)


def test_profile_validation():
    with pytest.raises(ConfigurationError):
        AxiProfile(np.zeros(10))
    with pytest.raises(ConfigurationError):
        AxiProfile(np.full(33, np.nan))
    with pytest.raises(ConfigurationError):
        residual(AxiProfile.zeros(32), 0.0)
    with pytest.raises(ConfigurationError):
        trivial_spectrum(-1.0)


def test_profile_resize_and_evaluate():
    p = AxiProfile.legendre(2, 1.0, lmax=32)
    assert p.resized(64).lmax == 64
    assert p.resized(64).coefficients[2] == 1.0
    assert p.evaluate(1.0) == pytest.approx(1.0)
    assert p.evaluate(0.0) == pytest.approx(-0.5)
    assert p.sup_norm() == pytest.approx(1.0)
    assert (p + AxiProfile.zeros(64)).lmax == 64


def test_diagnostics_of_zero_and_pure_p2():
    zero = diagnostics(AxiProfile.zeros(32), 0.4)
    assert zero.mass_defect == pytest.approx(0.0, abs=1e-12)
    assert zero.beta == pytest.approx(0.0, abs=1e-12)
    assert zero.profile_corr == pytest.approx(0.0, abs=1e-12)
    d = diagnostics(AxiProfile.legendre(2, 0.01, lmax=32), 0.4)
    assert d.profile_corr == pytest.approx(1.0)
    assert d.beta > 0
    assert d.lambda_norm_sq == pytest.approx(1.5 * d.beta ** 2)
    assert set(d.as_dict()) >= {"sup_norm", "beta_ratio", "uhat_l2", "kw3"}
