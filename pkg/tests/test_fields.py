import numpy as np
import pytest

from onofri_lab.core.errors import FieldRepresentationError, OverflowGuardError, QuadratureError
from onofri_lab.sphere.fields import (
    ScalarField,
    dirichlet_energy,
    dump_field,
    exp_first_moments,
    exp_mass,
    load_field,
    mean_value,
    onofri_functional,
    onofri_gap,
)
from onofri_lab.sphere.geometry import Rotation


def linear_field(grid, s, axis=2):
    def evaluate(p):
        return s * np.asarray(p)[:, axis]

    def gradient(p):
        p = np.asarray(p)
        e = np.zeros(3)
        e[axis] = 1.0
        return s * (e - p[:, axis:axis + 1] * p)

    return ScalarField.from_function(grid, evaluate, gradient)


def test_zero_field(grid32):
    u = ScalarField.constant(grid32, 0.0)
    assert exp_mass(u) == pytest.approx(1.0, abs=1e-14)
    assert mean_value(u) == 0.0
    assert onofri_gap(u) == pytest.approx(0.0, abs=1e-14)


def test_constant_shift_invariance(grid32):
    u = linear_field(grid32, 0.7)
    assert onofri_gap(u.shifted(2.5)) == pytest.approx(onofri_gap(u), abs=1e-12)


def test_linear_field_gap_closed_form(grid32):
    s = 0.8
    u = linear_field(grid32, s)
    expected = 2 * s * s / 3 - np.log(np.sinh(2 * s) / (2 * s))
    assert onofri_gap(u) == pytest.approx(expected, abs=1e-12)
    assert onofri_gap(u) > 0


def test_functional_at_half_for_x3(grid32):
    u = linear_field(grid32, 1.0)
    assert onofri_functional(u, 0.5) == pytest.approx(1 / 3 - np.log(np.sinh(2.0) / 2), abs=1e-12)


def test_first_moments(grid32):
    u = linear_field(grid32, 0.5)
    m = exp_first_moments(u)
    # (1/4π)∫e^{t}t dV = (1/2)∫₋₁¹ t e^t dt = 1/e
    assert m[2] == pytest.approx(np.exp(-1.0), abs=1e-12)
    assert abs(m[0]) < 1e-14 and abs(m[1]) < 1e-14


def test_overflow_guard(grid16):
    u = ScalarField.constant(grid16, 400.0)
    with pytest.raises(OverflowGuardError) as exc:
        exp_mass(u)
    assert exc.value.max_value == 400.0


def test_sampled_field_has_no_energy(grid16):
    u = ScalarField.from_samples(grid16, np.zeros(grid16.size))
    with pytest.raises(FieldRepresentationError):
        dirichlet_energy(u)
    with pytest.raises(FieldRepresentationError):
        u.compose(Rotation.identity())


def test_non_finite_samples_rejected(grid16):
    values = np.zeros(grid16.size)
    values[0] = np.nan
    with pytest.raises(QuadratureError):
        ScalarField.from_samples(grid16, values)


def test_compose_evaluates_at_rotated_points(grid16, rng):
    u = linear_field(grid16, 1.0)
    A = Rotation.random(rng)
    v = u.compose(A)
    assert np.allclose(v.samples, (grid16.nodes @ A.matrix.T)[:, 2], atol=1e-14)
    assert dirichlet_energy(v) == pytest.approx(dirichlet_energy(u), rel=1e-12)


@pytest.mark.parametrize("suffix", [".csv", ".parquet"])
def test_dump_and_load(grid16, tmp_path, suffix):
    u = linear_field(grid16, 0.3)
    path = dump_field(u, tmp_path / f"field{suffix}")
    back = load_field(path)
    assert back.grid.L == 16
    assert np.array_equal(back.samples, u.samples)


def test_load_rejects_foreign_nodes(grid16, tmp_path):
    path = dump_field(ScalarField.constant(grid16, 0.0), tmp_path / "field.csv")
    text = path.read_text().splitlines()
    header, first = text[0], text[1].split(",")
    first[0] = "0.5"
    path.write_text("\n".join([header, ",".join(first), *text[2:]]) + "\n")
    with pytest.raises(QuadratureError):
        load_field(path)
