import numpy as np
import pytest
from scipy.integrate import quad

from onofri_lab.core.errors import ConfigurationError, QuadratureError
from onofri_lab.sphere.quadrature import (
    FOUR_PI,
    build_cap_patches,
    build_gauss_grid,
    composite_integrate,
    integrate,
    monomial_integral,
    quadrature_exactness_suite,
)


def test_constant_integrates_to_four_pi(grid32):
    assert integrate(grid32, np.ones(grid32.size)) == pytest.approx(FOUR_PI, abs=1e-12)


def test_second_moments(grid32):
    x = grid32.nodes
    for k in range(3):
        assert integrate(grid32, x[:, k] ** 2) == pytest.approx(FOUR_PI / 3, abs=1e-12)
    assert integrate(grid32, x[:, 2] ** 4) == pytest.approx(FOUR_PI / 5, abs=1e-12)
    assert abs(integrate(grid32, x[:, 0] * x[:, 1])) < 1e-13


def test_closed_form_monomials():
    assert monomial_integral(0, 0, 0) == pytest.approx(FOUR_PI)
    assert monomial_integral(2, 0, 0) == pytest.approx(FOUR_PI / 3)
    assert monomial_integral(2, 2, 0) == pytest.approx(FOUR_PI / 15)
    assert monomial_integral(1, 0, 2) == 0.0


def test_exactness_suite_passes_at_32():
    frame = quadrature_exactness_suite(32)
    assert len(frame) == 35
    assert frame["passed"].all()


def test_exactness_suite_fails_degree_four_at_L2():
    frame = quadrature_exactness_suite(2)
    assert not frame[frame["degree"] == 4]["passed"].all()
    assert frame[frame["degree"] <= 3]["passed"].all()


def test_grid_rejects_small_L():
    with pytest.raises(ConfigurationError):
        build_gauss_grid(0)


def test_non_finite_integrand_reports_node(grid16):
    values = np.ones(grid16.size)
    values[5] = np.inf
    with pytest.raises(QuadratureError, match="вузлі"):
        integrate(grid16, values)


def test_cap_weights_sum_to_area():
    (patch,) = build_cap_patches([[0.0, 0.0, 1.0]], 0.7, n_r=64, n_ang=16)
    assert np.sum(patch.weights) == pytest.approx(2 * np.pi * (1 - np.cos(0.7)), abs=1e-12)


def test_overlapping_caps_rejected():
    with pytest.raises(QuadratureError):
        build_cap_patches([[0.0, 0.0, 1.0], [0.0, np.sin(0.5), np.cos(0.5)]], 0.7)


def test_composite_rule_of_constant_is_exact(grid16):
    patches = build_cap_patches([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]], 0.7, n_r=32, n_ang=16)
    total = composite_integrate(
        grid16, patches, lambda v, p: np.ones_like(v), lambda p: np.zeros(len(p)),
    )
    assert total == pytest.approx(FOUR_PI, abs=1e-12)


def test_composite_rule_integrates_cap_bump(grid16):
    # u = 1 − r²/δ² всередині r < δ, поза шапкою 0
    delta = 0.3
    center = np.array([0.0, 0.0, 1.0])

    def evaluate(points):
        r = np.arccos(np.clip(points @ center, -1.0, 1.0))
        return np.where(r < delta, 1.0 - (r / delta) ** 2, 0.0)

    patches = build_cap_patches([center], 2 * delta, n_r=200, n_ang=8)
    total = composite_integrate(grid16, patches, lambda v, p: v, evaluate)
    exact = 2 * np.pi * quad(lambda r: (1 - (r / delta) ** 2) * np.sin(r), 0, delta)[0]
    assert total == pytest.approx(exact, rel=1e-10)
