import pandas as pd
import pytest

from onofri_lab.analysis.inequalities import SAMPLE_COLUMNS, random_field_suite


def test_no_violations_on_small_sample():
    suite = random_field_suite(count=20, lmax=4, amplitude=1.0, seed=3, grid_L=32)
    assert list(suite.frame.columns) == SAMPLE_COLUMNS
    assert len(suite.frame) == 20
    assert suite.passed
    record = suite.to_record()
    assert record["count"] == 20
    assert record["violations"] == 0
    assert record["min_onofri_gap"] >= -1e-10
    assert record["min_jensen_gap"] >= -1e-12
    assert suite.worst_field is not None


def test_sample_is_independent_of_thread_count():
    a = random_field_suite(count=8, lmax=3, seed=11, grid_L=16, threads=1)
    b = random_field_suite(count=8, lmax=3, seed=11, grid_L=16, threads=4)
    pd.testing.assert_frame_equal(a.frame, b.frame)


def test_empty_sample():
    suite = random_field_suite(count=0, grid_L=16)
    assert suite.passed
    assert suite.worst_field is None
    assert suite.to_record()["min_onofri_gap"] is None


@pytest.mark.slow
def test_full_sample_has_no_violations():
    suite = random_field_suite(count=1000, lmax=6, seed=0)
    assert len(suite.frame) == 1000
    assert suite.passed
    assert suite.to_record()["min_onofri_gap"] >= -1e-10
