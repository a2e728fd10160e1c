import math

import numpy as np
import pytest
from scipy import special

from app.exceptions import DomainError, NoBarrierError
from app.models.schemas import PotentialSpec, ScaledCase
from app.services.potentials import potential_total
from app.services.turning_points import (
    coulomb_roots,
    cubic_roots_cardano,
    generic_turning_points,
    log_epsilon_from_level,
    log_turning_points,
    scaled_field,
)

EPSILONS = [float(e) for e in np.geomspace(1e-4, 0.05, 6)]


def test_coulomb_reference_roots():
    z1, z2 = coulomb_roots(0.1).roots
    assert z1 == pytest.approx(1.1270167, abs=1e-7)
    assert z2 == pytest.approx(8.8729833, abs=1e-7)


@pytest.mark.parametrize("epsilon", EPSILONS)
def test_coulomb_residuals(epsilon):
    for z in coulomb_roots(epsilon).roots:
        assert abs(z - 1.0 - epsilon * z * z) <= 1e-12 * max(1.0, abs(z))


def test_coulomb_small_field_keeps_inner_root():
    z1, _ = coulomb_roots(1e-12).roots
    assert z1 == pytest.approx(1.0 + 1e-12, rel=1e-15)


def test_coulomb_limits():
    with pytest.raises(DomainError):
        coulomb_roots(0.25)
    with pytest.raises(DomainError):
        coulomb_roots(0.0)


@pytest.mark.parametrize("epsilon", EPSILONS)
def test_cubic_roots(epsilon):
    roots = cubic_roots_cardano(epsilon)
    z1, z2, z3 = roots.roots
    assert z1 < 1.0 < z2 < z3
    for z in roots.roots:
        assert abs(z - 1.0 - epsilon * z ** 3) <= 1e-12 * max(1.0, abs(z))


def test_cubic_limit():
    with pytest.raises(DomainError):
        cubic_roots_cardano(0.15)


@pytest.mark.parametrize("epsilon", [1e-6, 0.01, 0.2, 0.36])
def test_log_roots_match_scipy(epsilon):
    z_left, z_right = log_turning_points(epsilon).roots
    assert z_left == pytest.approx(-special.lambertw(-epsilon, 0).real, rel=1e-12)
    assert z_right == pytest.approx(-special.lambertw(-epsilon, -1).real, rel=1e-12)


def test_log_branch_point_and_limit():
    z_left, z_right = log_turning_points(math.exp(-1.0)).roots
    assert z_left == z_right == 1.0
    with pytest.raises(DomainError):
        log_turning_points(0.4)


def test_physical_positions():
    roots = coulomb_roots(0.04, -0.5)
    for x in (roots.x_left, roots.x_right):
        assert potential_total(PotentialSpec.power_law(1.0), 0.01, x) == pytest.approx(-0.5, rel=1e-12)
    roots = cubic_roots_cardano(0.01, -0.5)
    for x in (roots.x_left, roots.x_right):
        assert potential_total(PotentialSpec.power_law(0.5), 0.00125, x) == pytest.approx(-0.5, rel=1e-12)


def test_scaled_field_cases():
    assert scaled_field(PotentialSpec.power_law(1.0), -0.5, 0.01).case is ScaledCase.COULOMB
    assert scaled_field(PotentialSpec.power_law(1.0), -0.5, 0.01).epsilon == pytest.approx(0.04)
    assert scaled_field(PotentialSpec.power_law(0.5), -0.5, 0.01).epsilon == pytest.approx(0.08)
    generic = scaled_field(PotentialSpec.power_law(1.5), -0.5, 0.01)
    assert generic.case is ScaledCase.GENERIC
    assert generic.epsilon == pytest.approx(0.01 / 0.5 ** (5.0 / 3.0))
    log = scaled_field(PotentialSpec.logarithmic(1.0, 1.0), -1.0, 0.1)
    assert log.epsilon == pytest.approx(0.1 * math.exp(-1.0))


def test_log_epsilon_agrees_on_quantized_levels():
    V0, a, n, F = 2.0, 0.5, 3, 0.01
    E = V0 * math.log((n - 0.25) * math.sqrt(2.0 * math.pi / V0) / a)
    direct = scaled_field(PotentialSpec.logarithmic(V0, a), E, F).epsilon
    assert log_epsilon_from_level(V0, n, F) == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("epsilon", EPSILONS)
def test_generic_matches_closed_forms(epsilon):
    E = -0.5
    closed = coulomb_roots(epsilon, E)
    generic = generic_turning_points(PotentialSpec.power_law(1.0), E, epsilon * E ** 2)
    assert generic.x_left == pytest.approx(closed.x_left, rel=1e-10)
    assert generic.x_right == pytest.approx(closed.x_right, rel=1e-10)

    closed = cubic_roots_cardano(epsilon, E)
    generic = generic_turning_points(PotentialSpec.power_law(0.5), E, epsilon * abs(E) ** 3)
    assert generic.x_left == pytest.approx(closed.x_left, rel=1e-10)
    assert generic.x_right == pytest.approx(closed.x_right, rel=1e-10)


def test_generic_log_roots():
    spec = PotentialSpec.logarithmic(1.0, 1.0)
    E, F = -0.5, 0.01
    epsilon = scaled_field(spec, E, F).epsilon
    closed = log_turning_points(epsilon, 1.0, F)
    generic = generic_turning_points(spec, E, F)
    assert generic.x_left == pytest.approx(closed.x_left, rel=1e-10)
    assert generic.x_right == pytest.approx(closed.x_right, rel=1e-10)


def test_generic_for_other_exponents_brackets_the_barrier():
    spec = PotentialSpec.power_law(1.5)
    roots = generic_turning_points(spec, -0.4, 1e-3)
    assert roots.x_left < roots.x_right
    for x in (roots.x_left, roots.x_right):
        assert potential_total(spec, 1e-3, x) == pytest.approx(-0.4, rel=1e-12)


def test_no_barrier():
    with pytest.raises(NoBarrierError):
        generic_turning_points(PotentialSpec.power_law(1.0), -0.5, 0.1)


def _decade_ratio(error, epsilon=1e-2):
    return error(epsilon) / error(epsilon / 10.0)


def test_coulomb_roots_follow_their_expansions():
    def inner(epsilon):
        return abs(coulomb_roots(epsilon).roots[0] - (1.0 + epsilon))

    def outer(epsilon):
        z2 = coulomb_roots(epsilon).roots[1]
        return abs(z2 - (1.0 / epsilon - 1.0)) / z2

    assert 80.0 < _decade_ratio(inner) < 120.0
    assert 80.0 < _decade_ratio(outer) < 120.0


def test_cubic_roots_satisfy_vieta():
    for epsilon in EPSILONS:
        z1, z2, z3 = cubic_roots_cardano(epsilon).roots
        assert abs(z1 + z2 + z3) <= 1e-12 / math.sqrt(epsilon)
        assert z1 * z2 + z1 * z3 + z2 * z3 == pytest.approx(-1.0 / epsilon, rel=1e-12)
        assert z1 * z2 * z3 == pytest.approx(-1.0 / epsilon, rel=1e-12)


def test_cubic_roots_follow_their_expansions():
    def small(epsilon):
        return abs(cubic_roots_cardano(epsilon).roots[1] - (1.0 + epsilon))

    assert 80.0 < _decade_ratio(small) < 120.0
    epsilon = 1e-5
    z1, _, z3 = cubic_roots_cardano(epsilon).roots
    root = math.sqrt(epsilon)
    # next correction to +-1/sqrt(eps) - 1/2 is -+(3/8) sqrt(eps)
    assert z3 - (1.0 / root - 0.5) == pytest.approx(-0.375 * root, rel=0.05)
    assert z1 - (-1.0 / root - 0.5) == pytest.approx(0.375 * root, rel=0.05)


def test_log_left_root_follows_its_expansion():
    def left(epsilon):
        return abs(log_turning_points(epsilon).roots[0] - (epsilon + epsilon ** 2))

    assert 800.0 < _decade_ratio(left) < 1200.0
