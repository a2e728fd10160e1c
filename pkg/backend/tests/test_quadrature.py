import math

import numpy as np
import pytest

from app.exceptions import ConvergenceError
from app.models.schemas import EvalConfig
from app.services.quadrature import (
    integrate_from_endpoint,
    integrate_geometric,
    tanh_sinh,
    tanh_sinh_unit,
)


def test_polynomial():
    assert tanh_sinh(lambda x: x * x, 0.0, 1.0) == pytest.approx(1.0 / 3.0, rel=1e-13)


def test_square_root_endpoint():
    assert tanh_sinh(np.sqrt, 0.0, 1.0) == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_reversed_limits_change_sign():
    forward = tanh_sinh(np.cos, 0.0, 1.0)
    assert tanh_sinh(np.cos, 1.0, 0.0) == pytest.approx(-forward, rel=1e-15)
    assert forward == pytest.approx(math.sin(1.0), rel=1e-13)


def test_empty_interval():
    assert tanh_sinh(np.exp, 2.0, 2.0) == 0.0


def test_unit_rule_receives_exact_complement():
    def f(u, uc):
        assert np.allclose(u + uc, 1.0)
        # 1/sqrt(1 - u) through the complement
        return 1.0 / np.sqrt(uc)

    assert tanh_sinh_unit(f) == pytest.approx(2.0, rel=1e-12)


def test_inverse_square_root_through_substitution():
    assert integrate_from_endpoint(lambda d: 1.0 / np.sqrt(d), 4.0) == pytest.approx(4.0, rel=1e-13)


def test_general_power_substitution():
    # d**(-2/3) needs d = u**3
    value = integrate_from_endpoint(lambda d: d ** (-2.0 / 3.0), 1.0, power=3.0)
    assert value == pytest.approx(3.0, rel=1e-12)


def test_geometric_panels_resolve_a_narrow_feature():
    def f(x):
        return np.exp(-x / 1e-4) / 1e-4 + 1.0

    value = integrate_geometric(f, 0.0, 100.0, 1e-5)
    assert value == pytest.approx(101.0, rel=1e-12)


def test_level_cap_raises():
    with pytest.raises(ConvergenceError):
        tanh_sinh(np.exp, 0.0, 1.0, EvalConfig(quad_levels=1))
