import numpy as np
import pytest

from onofri_lab.core.errors import ConfigurationError
from onofri_lab.analysis.bubbles import (
    CONFIGURATIONS,
    REPORT_COLUMNS,
    BubbleSpec,
    bubble_report,
    cutoff,
    cutoff_derivative,
    ladder_checks,
    make_bubble_field,
    predicted_asymptotics,
    verify_asymptotics,
)
from onofri_lab.sphere.fields import exp_mass

EXPECTED_LAMBDA = {"PAIR": 2 / 3, "TRIANGLE": 1 / 6, "TETRAHEDRON": 0.0, "OCTAHEDRON": 0.0}


def test_configurations_are_centred_unit_sets():
    for points, nu in CONFIGURATIONS.values():
        assert np.allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-15)
        assert np.allclose(points.mean(axis=0), 0.0, atol=1e-15)
        assert nu * len(points) == pytest.approx(1.0)


def test_cutoff_shape():
    d = 0.35
    assert cutoff(np.array([0.0, d]), d).tolist() == [1.0, 1.0]
    assert cutoff(np.array([2 * d, 3.0]), d).tolist() == [0.0, 0.0]
    r = np.linspace(d, 2 * d, 7)
    h = 1e-7
    fd = (cutoff(r + h, d) - cutoff(r - h, d)) / (2 * h)
    assert np.allclose(cutoff_derivative(r, d), fd, atol=1e-6)


def test_eps_above_limit_rejected():
    with pytest.raises(ConfigurationError):
        BubbleSpec.named("PAIR", 0.05, delta=0.35)


def test_overlapping_configuration_rejected():
    with pytest.raises(ConfigurationError):
        BubbleSpec.named("OCTAHEDRON", 1e-3, delta=0.5)


def test_unknown_configuration():
    with pytest.raises(ConfigurationError):
        BubbleSpec.named("CUBE", 1e-3)


def test_background_is_zero_outside_caps():
    spec = BubbleSpec.named("PAIR", 1e-2)
    u = make_bubble_field(spec)
    equator = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    assert np.all(u.evaluate(equator) == 0.0)


@pytest.mark.parametrize("config", list(CONFIGURATIONS))
def test_asymptotics_at_small_eps(config):
    report = verify_asymptotics(BubbleSpec.named(config, 1e-3))
    assert abs(report.mass_ratio - 1) < 0.05
    assert abs(report.energy_ratio_refined - 1) < 0.05
    assert abs(report.lambda_norm_sq - EXPECTED_LAMBDA[config]) < 0.02
    assert report.kw_defect < 1e-6


def test_trends_along_ladder():
    reports = [verify_asymptotics(BubbleSpec.named("TRIANGLE", eps)) for eps in (1e-2, 3e-3, 1e-3)]
    mean_dev = [r.mean_deviation for r in reports]
    energy_dev = [abs(r.energy_ratio - 1) for r in reports]
    onofri_dev = [abs(r.onofri_ratio - 1 / 3) for r in reports]
    assert mean_dev[0] > mean_dev[1] > mean_dev[2]
    assert energy_dev[0] > energy_dev[1] > energy_dev[2]
    assert onofri_dev[0] > onofri_dev[1] > onofri_dev[2]


def test_predictions():
    spec = BubbleSpec.named("TETRAHEDRON", 1e-3)
    pred = predicted_asymptotics(spec)
    assert pred["mass_leading"] == pytest.approx(1 / (4e-6))
    assert pred["energy_leading"] == pytest.approx(32 * np.pi * np.log(1e3))
    assert np.max(np.abs(pred["lambda_limit"])) < 1e-15


def test_composite_mass_converges_with_cap_resolution():
    spec = BubbleSpec.named("PAIR", 1e-2)
    coarse = exp_mass(make_bubble_field(spec, n_r=100, n_ang=8))
    fine = exp_mass(make_bubble_field(spec, n_r=200, n_ang=8))
    assert coarse == pytest.approx(fine, rel=1e-8)


def test_report_marks_bad_rows():
    frame = bubble_report(["PAIR"], [1e-2, 0.05], threads=1)
    assert list(frame.columns) == REPORT_COLUMNS
    assert frame.loc[0, "error"] == ""
    assert "ε" in frame.loc[1, "error"]
    assert np.isnan(frame.loc[1, "mass_ratio"])


def test_bad_cap_resolution():
    with pytest.raises(ConfigurationError):
        make_bubble_field(BubbleSpec.named("PAIR", 1e-2), n_r=1)


def test_octahedron_field_is_even():
    u = make_bubble_field(BubbleSpec.named("OCTAHEDRON", 1e-2), n_r=60, n_ang=8)
    rng = np.random.default_rng(5)
    p = rng.standard_normal((50, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    assert np.allclose(u.evaluate(p), u.evaluate(-p), atol=1e-12)


def test_ladder_checks_pass_on_computed_ladder():
    frame = bubble_report(["TRIANGLE", "CUBE"], [1e-2, 3e-3, 1e-3], threads=1)
    checks = ladder_checks(frame)
    assert checks["config"].tolist() == ["TRIANGLE"]
    assert checks.loc[0, "eps"] == pytest.approx(1e-3)
    assert bool(checks.loc[0, "passed"])


def test_ladder_checks_flag_each_threshold():
    frame = bubble_report(["PAIR"], [1e-2], grid_L=16, n_r=60, n_ang=8, threads=1)
    assert bool(ladder_checks(frame).loc[0, "passed"])
    for column, value, flag in (
        ("mass_ratio", 1.2, "mass_ok"),
        ("energy_ratio_refined", 0.8, "energy_ok"),
        ("lambda_norm_sq", 1.0 / 6.0, "lambda_ok"),
        ("kw_defect", 1e-3, "kw_ok"),
    ):
        broken = frame.copy()
        broken[column] = value
        checks = ladder_checks(broken)
        assert not checks.loc[0, flag]
        assert not checks.loc[0, "passed"]


def test_ladder_checks_require_decreasing_deviation():
    frame = bubble_report(["PAIR"], [1e-2, 3e-3], grid_L=16, n_r=60, n_ang=8, threads=1)
    frame.loc[1, "mean_deviation"] = frame.loc[0, "mean_deviation"] * 2.0
    checks = ladder_checks(frame)
    assert not checks.loc[0, "trend_ok"]
    assert not checks.loc[0, "passed"]
