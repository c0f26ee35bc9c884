import numpy as np
import pytest

from onofri_lab.core.errors import ConfigurationError, QuadratureError
from onofri_lab.sphere.fields import ScalarField, dirichlet_energy
from onofri_lab.sphere.spectral import (
    QUADRUPOLE_COEFF,
    X_COORD_COEFF,
    SHExpansion,
    analyze,
    dirichlet_energy_spectral,
    eigenvalue_table,
    harmonic_basis,
    laplace_beltrami,
    random_expansion,
    sh_index,
    synthesize,
)


def test_analyze_recovers_coefficients(grid16, rng):
    e = random_expansion(6, rng)
    back = analyze(synthesize(e, grid16), 6)
    assert np.allclose(back.coefficients, e.coefficients, atol=1e-12)


def test_basis_is_orthonormal(grid16):
    Y, _ = harmonic_basis(grid16.nodes, 5)
    gram = (Y.T * grid16.weights) @ Y
    assert np.allclose(gram, np.eye(Y.shape[1]), atol=1e-12)


def test_coordinate_functions(grid16):
    x = grid16.nodes
    e3 = analyze(ScalarField.from_samples(grid16, x[:, 2]), 2)
    assert e3.coefficient(1, 0) == pytest.approx(X_COORD_COEFF, abs=1e-12)
    e1 = analyze(ScalarField.from_samples(grid16, x[:, 0]), 2)
    assert e1.coefficient(1, 1) == pytest.approx(X_COORD_COEFF, abs=1e-12)
    e2 = analyze(ScalarField.from_samples(grid16, x[:, 1]), 2)
    assert e2.coefficient(1, -1) == pytest.approx(X_COORD_COEFF, abs=1e-12)
    q = analyze(ScalarField.from_samples(grid16, x[:, 2] ** 2 - 1 / 3), 2)
    assert q.coefficient(2, 0) == pytest.approx(QUADRUPOLE_COEFF, abs=1e-12)


def test_eigenvalues():
    assert eigenvalue_table(3) == [(0, 0.0), (1, 2.0), (2, 6.0), (3, 12.0)]
    e = SHExpansion.single(4, 3, -2, 2.0)
    assert laplace_beltrami(e).coefficient(3, -2) == pytest.approx(-24.0)


def test_spectral_energy_matches_gradient_quadrature(grid16, rng):
    e = random_expansion(5, rng)
    u = synthesize(e, grid16)
    assert dirichlet_energy(u) == pytest.approx(dirichlet_energy_spectral(e), rel=1e-12)


def test_energy_of_x3():
    e = SHExpansion.single(1, 1, 0, X_COORD_COEFF)
    assert dirichlet_energy_spectral(e) == pytest.approx(8 * np.pi / 3)


def test_gradient_matches_finite_differences(rng):
    e = random_expansion(4, rng)
    p = rng.standard_normal(3)
    p /= np.linalg.norm(p)
    v = np.cross(p, rng.standard_normal(3))
    v /= np.linalg.norm(v)
    h = 1e-6
    # геодезична p(s) = cos s·p + sin s·v
    fp = e.evaluate(np.cos(h) * p + np.sin(h) * v)[0]
    fm = e.evaluate(np.cos(h) * p - np.sin(h) * v)[0]
    g = e.gradient(p[None, :])[0]
    assert abs(g @ p) < 1e-12
    assert (fp - fm) / (2 * h) == pytest.approx(g @ v, rel=1e-6, abs=1e-8)


def test_analyze_requires_resolution(grid16):
    u = ScalarField.from_samples(grid16, np.zeros(grid16.size))
    with pytest.raises(QuadratureError):
        analyze(u, 16)


def test_filters():
    e = SHExpansion(2, np.arange(1.0, 10.0))
    assert np.all(e.high_pass(2).coefficients[:4] == 0)
    assert e.high_pass(2).coefficient(2, 1) == e.coefficient(2, 1)
    assert e.axisymmetric().coefficient(2, 1) == 0
    assert e.axisymmetric().coefficient(2, 0) == e.coefficient(2, 0)


def test_bad_indices():
    with pytest.raises(ConfigurationError):
        sh_index(1, 2)
    with pytest.raises(ConfigurationError):
        SHExpansion(2, np.zeros(4))
