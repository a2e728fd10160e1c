import math

import pytest

from app.core import validation
from app.core.validation import (
    CRITERIA,
    VALIDATION_GROUPS,
    Criterion,
    invsqrt_scaled_remainder,
    run_validation,
    select_criteria,
)
from app.exceptions import ConvergenceError, UsageError


def test_groups():
    assert VALIDATION_GROUPS == ["ac", "coulomb", "invsqrt", "log", "rates", "roots", "special", "spectra"]
    assert len({c.name for c in CRITERIA}) == len(CRITERIA)


def test_select_by_group_and_name():
    names = [c.name for c in select_criteria(["coulomb", "root_residuals"])]
    assert names == [
        "coulomb_exact_vs_oracle",
        "transposition_invariance",
        "coulomb_asymptotic_order",
        "root_residuals",
    ]
    assert select_criteria(None) == CRITERIA


def test_unknown_selector():
    with pytest.raises(UsageError):
        select_criteria(["coulomb", "nonsense"])


def test_subset_passes():
    report = run_validation(["special", "ac", "rates"], threads=2)
    assert report.passed
    assert [r.group for r in report.results] == ["special", "ac", "rates"]


def test_tolerance_scale_can_fail_a_criterion():
    report = run_validation(["special"], tol_scale=0.0)
    (result,) = report.results
    assert result.tolerance == 0.0
    assert result.passed is (result.measured <= 0.0)


def test_raising_criterion_is_reported(monkeypatch):
    def broken(ctx):
        raise ConvergenceError("no convergence after 3 levels")

    monkeypatch.setattr(validation, "CRITERIA", [Criterion("broken", "special", broken)])
    report = run_validation()
    assert not report.passed
    (result,) = report.results
    assert result.detail == "convergence: no convergence after 3 levels"
    assert math.isnan(result.measured)


def test_invsqrt_remainder_is_finite():
    assert 0.0 < invsqrt_scaled_remainder(1e-2) < invsqrt_scaled_remainder(1e-3) < 1.0


@pytest.mark.slow
def test_full_suite_passes():
    report = run_validation(threads=4)
    failed = [(r.name, r.measured, r.tolerance, r.detail) for r in report.results if not r.passed]
    assert failed == []
    assert len(report.results) == len(CRITERIA)


def test_invsqrt_remainder_criterion_passes():
    report = run_validation(["invsqrt_remainder_bounded"])
    (result,) = report.results
    assert result.passed, result.detail
    assert result.measured <= result.tolerance
