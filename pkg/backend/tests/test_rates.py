import math

import pytest
from scipy import integrate

from app.core.barrier import action_coulomb_exact, action_log_improved, action_log_leading
from app.core.rates import (
    FLAG_AC_EXPONENT,
    FLAG_REFERENCE_PRECONDITION,
    FLAG_WEAK_FIELD,
    ac_average_factor,
    ac_average_factor_log,
    cycle_averaged_penetrability,
    general_prefactor,
    rate_coulomb,
    rate_general_s,
    rate_invsqrt,
    rate_log,
    rate_power_law,
    reference_rates,
    static_exponent,
)
from app.exceptions import ApplicabilityError, DomainError, UnsupportedError
from app.models.schemas import (
    FLAG_W_UNDERFLOW,
    FieldMode,
    Method,
    PotentialSpec,
    RateResult,
    ReferenceKind,
    ValidityLimits,
)
from app.services.spectra import energy_closed


class TestPrefactors:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_coulomb_specialisation(self, n):
        E = -1.0 / (2.0 * n * n)
        assert general_prefactor(1.0, E) == pytest.approx(1.0 / (2.0 * math.pi * n ** 3), rel=1e-12)

    def test_inverse_sqrt_specialisation(self):
        E = energy_closed(PotentialSpec.power_law(0.5), 2)
        expected = 2.0 * math.sqrt(2.0) / (3.0 * math.pi) * abs(E) ** 2.5
        assert general_prefactor(0.5, E) == pytest.approx(expected, rel=1e-12)

    def test_positive_energy(self):
        with pytest.raises(DomainError):
            general_prefactor(1.0, 0.1)


class TestCoulombRate:
    def test_exponent_is_the_exact_action(self):
        result = rate_coulomb(1, 0.01)
        assert result.method is Method.EXACT
        assert result.exponent == action_coulomb_exact(0.04, -0.5).value
        assert result.prefactor == pytest.approx(1.0 / (2.0 * math.pi))
        assert result.w == pytest.approx(result.prefactor * math.exp(result.exponent), rel=1e-15)
        assert result.log_w == pytest.approx(math.log(result.w), rel=1e-14)
        assert result.validity_flags == []

    def test_oracle_agrees_with_exact(self, oracle_cfg):
        exact = rate_coulomb(2, 0.001)
        oracle = rate_coulomb(2, 0.001, Method.ORACLE, oracle_cfg=oracle_cfg)
        assert oracle.w == pytest.approx(exact.w, rel=1e-5)

    def test_asymptotic_order(self):
        result = rate_coulomb(1, 0.01, Method.ASYMPTOTIC, order=2)
        assert result.order == 2
        assert result.method is Method.ASYMPTOTIC

    def test_weak_field_flag(self):
        assert FLAG_WEAK_FIELD in rate_coulomb(1, 0.05).validity_flags

    def test_barrier_suppressed(self):
        with pytest.raises(DomainError):
            rate_coulomb(1, 0.07)


class TestACMode:
    def test_factor_multiplies_the_static_rate(self):
        static = rate_coulomb(1, 0.01)
        ac = rate_coulomb(1, 0.01, field_mode=FieldMode.LOW_FREQUENCY_AC)
        expected_factor = math.sqrt(3.0 * 0.01 / math.pi)
        assert ac.ac_factor == pytest.approx(expected_factor, rel=1e-14)
        assert ac.w == pytest.approx(static.w * expected_factor, rel=1e-14)
        assert ac.log_w == pytest.approx(static.log_w + math.log(expected_factor), rel=1e-14)

    def test_small_exponent_flag(self):
        limits = ValidityLimits(ac_exponent_warning=100.0)
        result = rate_coulomb(1, 0.01, field_mode=FieldMode.LOW_FREQUENCY_AC, limits=limits)
        assert FLAG_AC_EXPONENT in result.validity_flags

    @pytest.mark.parametrize("K", [30.0, 60.0, 120.0])
    def test_saddle_point_matches_cycle_average(self, K):
        E = -0.5
        F = 2.0 * (2.0 * abs(E)) ** 1.5 / (3.0 * K)
        assert static_exponent(E, F) == pytest.approx(K)
        averaged = cycle_averaged_penetrability(K)
        saddle = ac_average_factor(E, F) * math.exp(-K)
        assert saddle == pytest.approx(averaged, rel=0.05)

    def test_cycle_average_against_scipy(self):
        K = 5.0
        expected, _ = integrate.quad(lambda phi: math.exp(-K / math.cos(phi)),
                                     -math.pi / 2.0, math.pi / 2.0, epsabs=0.0, epsrel=1e-12)
        assert cycle_averaged_penetrability(K) == pytest.approx(expected / math.pi, rel=1e-10)

    def test_log_factor(self):
        factor = ac_average_factor_log(1.0, 1, 0.01)
        assert 0.0 < factor < 1.0
        with pytest.raises(DomainError):
            ac_average_factor_log(1.0, 1, 1.0)


class TestInverseSqrtRate:
    def test_from_quantum_number(self):
        result = rate_invsqrt(1e-3, n=1)
        E = energy_closed(PotentialSpec.power_law(0.5), 1)
        assert result.E == pytest.approx(E)
        assert result.s == 0.5
        assert result.epsilon == pytest.approx(1e-3 / abs(E) ** 3)

    def test_methods_agree(self, oracle_cfg):
        exact = rate_invsqrt(1e-3, n=1)
        oracle = rate_invsqrt(1e-3, Method.ORACLE, n=1, oracle_cfg=oracle_cfg)
        assert oracle.exponent == pytest.approx(exact.exponent, rel=1e-7)

    def test_needs_a_level(self):
        with pytest.raises(DomainError):
            rate_invsqrt(1e-3)

    def test_dispatch_keeps_the_level(self):
        E = energy_closed(PotentialSpec.power_law(0.5), 1)
        result = rate_power_law(0.5, E, 1e-3, Method.ASYMPTOTIC, n=1)
        assert result.n == 1
        assert result.exponent == rate_invsqrt(1e-3, Method.ASYMPTOTIC, n=1).exponent


class TestGeneralS:
    def test_explicit_energy(self):
        result = rate_power_law(1.7, -0.4, 1e-2)
        assert result.method is Method.ORACLE
        assert result.exponent < 0.0
        assert 0.0 < result.w < 1.0
        assert result.n is None

    def test_asymptotic_close_to_oracle(self, oracle_cfg):
        oracle = rate_general_s(1.5, -0.5, 1e-4, oracle_cfg=oracle_cfg)
        asymptotic = rate_general_s(1.5, -0.5, 1e-4, Method.ASYMPTOTIC)
        assert asymptotic.exponent == pytest.approx(oracle.exponent, rel=1e-4)
        assert asymptotic.prefactor == oracle.prefactor

    def test_no_exact_form(self):
        with pytest.raises(UnsupportedError):
            rate_general_s(1.5, -0.5, 1e-4, Method.EXACT)

    def test_applicability_guard(self):
        with pytest.raises(ApplicabilityError):
            rate_general_s(1.5, -0.5, 0.3)

    def test_domain(self):
        with pytest.raises(DomainError):
            rate_general_s(0.8, -0.5, 1e-4)

    def test_dispatch(self):
        assert rate_power_law(1.0, -0.5, 0.01).exponent == rate_coulomb(1, 0.01).exponent
        assert rate_power_law(0.5, -0.5, 1e-3).method is Method.EXACT
        assert rate_power_law(0.7, -0.5, 1e-3).method is Method.ORACLE
        with pytest.raises(UnsupportedError):
            rate_power_law(0.7, -0.5, 1e-3, Method.ASYMPTOTIC)


class TestLogRate:
    def test_default_is_the_oracle(self):
        result = rate_log(1.0, 1.0, 1, 0.005)
        assert result.method is Method.ORACLE
        assert result.potential == "log"
        assert result.prefactor == pytest.approx(1.0 / (math.pi * 0.75))
        assert result.n == 1

    def test_asymptotic_orders(self):
        E = energy_closed(PotentialSpec.logarithmic(1.0, 1.0), 1)
        improved = rate_log(1.0, 1.0, 1, 0.005, Method.ASYMPTOTIC)
        leading = rate_log(1.0, 1.0, 1, 0.005, Method.ASYMPTOTIC, order=1)
        assert improved.exponent == action_log_improved(1.0, 1.0, E, 0.005).value
        assert leading.exponent == action_log_leading(1.0, 1, 0.005).value

    def test_improved_log_rate_is_closer_to_oracle(self, oracle_cfg):
        oracle = rate_log(1.0, 1.0, 1, 0.005, oracle_cfg=oracle_cfg)
        improved = rate_log(1.0, 1.0, 1, 0.005, Method.ASYMPTOTIC)
        leading = rate_log(1.0, 1.0, 1, 0.005, Method.ASYMPTOTIC, order=1)
        assert abs(improved.log_w - oracle.log_w) < abs(leading.log_w - oracle.log_w)

    def test_fractional_level(self):
        assert rate_log(1.0, 1.0, 1.5, 0.005).n == 1.5

    def test_suppressed_barrier(self):
        with pytest.raises(DomainError):
            rate_log(1.0, 1.0, 1, 0.5)

    def test_no_exact_form(self):
        with pytest.raises(UnsupportedError):
            rate_log(1.0, 1.0, 1, 0.005, Method.EXACT)

    def test_ac_mode(self):
        result = rate_log(1.0, 1.0, 1, 0.005, field_mode=FieldMode.LOW_FREQUENCY_AC)
        assert result.ac_factor == pytest.approx(ac_average_factor_log(1.0, 1, 0.005))


class TestReferenceRates:
    def test_hydrogen(self):
        result = reference_rates(ReferenceKind.HYDROGEN_1S, 0.01)
        assert result.prefactor == pytest.approx(400.0)
        assert result.exponent == pytest.approx(-2.0 / 0.03)
        assert result.validity_flags == []

    def test_short_range_well_shares_the_exponent(self):
        hydrogen = reference_rates(ReferenceKind.HYDROGEN_1S, 0.02)
        well = reference_rates(ReferenceKind.SHORT_RANGE_WELL, 0.02, kappa=1.0)
        assert well.exponent == pytest.approx(hydrogen.exponent)
        assert well.prefactor == pytest.approx(0.01)

    def test_precondition_flag(self):
        result = reference_rates(ReferenceKind.HYDROGEN_1S, 0.2)
        assert FLAG_REFERENCE_PRECONDITION in result.validity_flags


class TestUnderflow:
    def test_zero_rate_is_flagged(self):
        result = RateResult.assemble(prefactor=0.5, exponent=-800.0, potential="powerlaw", F=1e-4,
                                     E=-0.4, method=Method.ORACLE, validity_flags=[FLAG_WEAK_FIELD])
        assert result.w == 0.0
        assert result.log_w == pytest.approx(math.log(0.5) - 800.0, rel=1e-15)
        assert result.validity_flags == [FLAG_WEAK_FIELD, FLAG_W_UNDERFLOW]

    def test_representable_rate_is_not_flagged(self):
        result = RateResult.assemble(prefactor=0.5, exponent=-700.0, potential="powerlaw", F=1e-4,
                                     E=-0.4, method=Method.ORACLE)
        assert result.w > 0.0
        assert FLAG_W_UNDERFLOW not in result.validity_flags
