"""
Tunnel-ionization probabilities per unit time.

Every rate is w = prefactor * exp(exponent) * (ac_factor or 1), with the
prefactor A**2/4 of the bound state and the exponent taken from one of the
barrier routes. Validity heuristics never abort a calculation on their
own; they are recorded in ``RateResult.validity_flags``.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from app.core.barrier import (
    action_coulomb_asymptotic,
    action_coulomb_exact,
    action_general_s,
    action_invsqrt_asymptotic,
    action_invsqrt_exact,
    action_log_improved,
    action_log_leading,
    action_oracle,
    f_of_s,
)
from app.exceptions import ApplicabilityError, DomainError, UnsupportedError
from app.models.schemas import (
    ActionResult,
    EvalConfig,
    FieldMode,
    Method,
    PotentialKind,
    PotentialSpec,
    RateResult,
    ReferenceKind,
    ValidityLimits,
)
from app.services.potentials import weak_field_ratio
from app.services.quadrature import tanh_sinh_unit
from app.services.spectra import energy_closed
from app.services.special_functions import gamma_ratio
from app.services.turning_points import log_epsilon_from_level

logger = logging.getLogger(__name__)

_INV_E = math.exp(-1.0)
_SQRT2 = math.sqrt(2.0)

FLAG_WEAK_FIELD = "weak_field"
FLAG_AC_EXPONENT = "ac_exponent_small"
FLAG_REFERENCE_PRECONDITION = "reference_precondition"


# ============================================================================
# PREFACTORS AND AC AVERAGING
# ============================================================================

def general_prefactor(s: float, E: float) -> float:
    """A**2/4 for -1/x**s, |E|^(1/2+1/s) Gamma(1/s) / (sqrt(2 pi) Gamma(1/2+1/s))"""
    if E >= 0.0:
        raise DomainError(f"power-law prefactor needs E < 0, got {E}")
    return abs(E) ** (0.5 + 1.0 / s) / math.sqrt(2.0 * math.pi) * gamma_ratio(1.0 / s, 0.5 + 1.0 / s)


def static_exponent(E: float, F: float) -> float:
    """Magnitude of the leading exponent 2(2|E|)^(3/2)/(3F)"""
    return 2.0 * (2.0 * abs(E)) ** 1.5 / (3.0 * F)


def ac_average_factor(E: float, F: float, warning_threshold: float = 10.0) -> float:
    """Low-frequency cycle-averaging factor sqrt(3F / (pi (2|E|)^(3/2)))"""
    if F <= 0.0:
        raise DomainError(f"AC averaging needs F > 0, got {F}")
    exponent = static_exponent(E, F)
    if exponent < warning_threshold:
        logger.warning(f"Static exponent {exponent:.4g} below {warning_threshold:g}: "
                       f"cycle averaging is unreliable")
    return math.sqrt(3.0 * F / (math.pi * (2.0 * abs(E)) ** 1.5))


def ac_average_factor_log(V0: float, n: float, F: float) -> float:
    """Cycle-averaging factor for the logarithmic well"""
    if F <= 0.0:
        raise DomainError(f"AC averaging needs F > 0, got {F}")
    log_inverse = math.log(V0 ** 1.5 / ((n - 0.25) * F * math.sqrt(2.0 * math.pi)))
    if log_inverse <= 0.0:
        raise DomainError("logarithmic AC factor needs epsilon < 1")
    return log_inverse ** -0.75 * math.sqrt(3.0 * F / (math.pi * (2.0 * V0) ** 1.5))


def cycle_averaged_penetrability(K: float, cfg: Optional[EvalConfig] = None) -> float:
    """(1/pi) int_{-pi/2}^{pi/2} exp(-K/cos(phi)) dphi"""
    if K <= 0.0:
        raise DomainError(f"static exponent must be positive, got {K}")

    def integrand(u: np.ndarray, uc: np.ndarray) -> np.ndarray:
        # phi = pi*u/2; 1/cos(phi) - 1 = 2 sin^2(phi/2) / cos(phi)
        cos_phi = np.sin(0.5 * np.pi * uc)
        excess = 2.0 * np.sin(0.25 * np.pi * u) ** 2 / cos_phi
        return np.exp(-K * excess)

    return math.exp(-K) * tanh_sinh_unit(integrand, cfg)


# ============================================================================
# ASSEMBLY
# ============================================================================

def _assemble(potential: PotentialKind, action: ActionResult, prefactor: float, *,
              E: float, F: float, field_mode: FieldMode,
              ac_log: Optional[Tuple[float, float]] = None, s: Optional[float] = None,
              n: Optional[float] = None,
              flags: Optional[List[str]] = None,
              limits: Optional[ValidityLimits] = None) -> RateResult:
    limits = limits or ValidityLimits()
    flags = list(flags or [])
    ac_factor = None
    if field_mode is FieldMode.LOW_FREQUENCY_AC:
        if ac_log is not None:
            ac_factor = ac_average_factor_log(*ac_log, F)
            if -action.value < limits.ac_exponent_warning:
                flags.append(FLAG_AC_EXPONENT)
        else:
            ac_factor = ac_average_factor(E, F, limits.ac_exponent_warning)
            if static_exponent(E, F) < limits.ac_exponent_warning:
                flags.append(FLAG_AC_EXPONENT)
    return RateResult.assemble(
        prefactor=prefactor,
        exponent=action.value,
        ac_factor=ac_factor,
        potential=potential.value,
        F=F,
        E=E,
        method=action.method,
        s=s,
        n=n,
        epsilon=action.epsilon,
        order=action.order,
        validity_flags=flags,
    )


def _weak_field_flags(s: float, E: float, F: float, limits: ValidityLimits) -> List[str]:
    ratio = weak_field_ratio(s, E, F)
    if ratio >= limits.weak_field_threshold:
        logger.warning(f"Weak-field ratio {ratio:.4g} at s={s}, E={E}, F={F} exceeds "
                       f"{limits.weak_field_threshold:g}")
        return [FLAG_WEAK_FIELD]
    return []


# ============================================================================
# POWER-LAW RATES
# ============================================================================

def rate_general_s(s: float, E: float, F: float, method: Method = Method.ORACLE, *,
                   field_mode: FieldMode = FieldMode.STATIC, n: Optional[float] = None,
                   cfg: Optional[EvalConfig] = None, oracle_cfg: Optional[EvalConfig] = None,
                   limits: Optional[ValidityLimits] = None) -> RateResult:
    """Rate for 1 < s < 2 from the A**2/4 prefactor and the weak-field exponent"""
    limits = limits or ValidityLimits()
    if not 1.0 < s < 2.0:
        raise DomainError(f"general-s rate needs 1 < s < 2, got {s}")
    if method is Method.EXACT:
        raise UnsupportedError(f"no exact closed-form action exists for s = {s}")

    depth = abs(E)
    leading = static_exponent(E, F)
    correction = 2.0 * _SQRT2 * (f_of_s(s, cfg) + 1.0) / depth ** (1.0 / s - 0.5)
    if limits.applicability_margin * correction >= leading:
        raise ApplicabilityError(
            f"correction term {correction:.4g} is not smaller than the leading term {leading:.4g}"
        )

    flags = _weak_field_flags(s, E, F, limits)
    if method is Method.ASYMPTOTIC:
        action = action_general_s(s, E, F, cfg, limits.weak_field_threshold)
    else:
        action = action_oracle(PotentialSpec.power_law(s), E, F, oracle_cfg)
    return _assemble(PotentialKind.POWER_LAW, action, general_prefactor(s, E), E=E, F=F,
                     field_mode=field_mode, s=s, n=n, flags=flags, limits=limits)


def _coulomb_action(E: float, F: float, method: Method, order: Optional[int],
                    cfg: Optional[EvalConfig], oracle_cfg: Optional[EvalConfig]) -> ActionResult:
    epsilon = F / E ** 2
    if not 0.0 < epsilon < 0.25:
        raise DomainError(f"Coulomb barrier needs 0 < epsilon < 1/4, got {epsilon:.6g}")
    if method is Method.EXACT:
        return action_coulomb_exact(epsilon, E, cfg=cfg)
    if method is Method.ASYMPTOTIC:
        n_eff = 1.0 / math.sqrt(2.0 * abs(E))
        return action_coulomb_asymptotic(epsilon, n_eff, order or 3)
    return action_oracle(PotentialSpec.power_law(1.0), E, F, oracle_cfg)


def rate_coulomb(n: int, F: float, method: Method = Method.EXACT, *,
                 order: Optional[int] = None, field_mode: FieldMode = FieldMode.STATIC,
                 cfg: Optional[EvalConfig] = None, oracle_cfg: Optional[EvalConfig] = None,
                 limits: Optional[ValidityLimits] = None) -> RateResult:
    """Coulomb rate with w0 = 1/(2 pi n**3)"""
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    limits = limits or ValidityLimits()
    E = -1.0 / (2.0 * n * n)
    action = _coulomb_action(E, F, method, order, cfg, oracle_cfg)
    flags = _weak_field_flags(1.0, E, F, limits)
    return _assemble(PotentialKind.POWER_LAW, action, 1.0 / (2.0 * math.pi * n ** 3), E=E, F=F,
                     field_mode=field_mode, s=1.0, n=n, flags=flags, limits=limits)


def rate_invsqrt(F: float, method: Method = Method.EXACT, *, n: Optional[int] = None,
                 energy: Optional[float] = None, order: Optional[int] = None,
                 field_mode: FieldMode = FieldMode.STATIC, cfg: Optional[EvalConfig] = None,
                 oracle_cfg: Optional[EvalConfig] = None,
                 limits: Optional[ValidityLimits] = None) -> RateResult:
    """Inverse-square-root rate with prefactor (2 sqrt2/(3 pi)) |E|^(5/2)"""
    limits = limits or ValidityLimits()
    spec = PotentialSpec.power_law(0.5)
    if energy is None:
        if n is None:
            raise DomainError("inverse-sqrt rate needs a quantum number or an energy")
        energy = energy_closed(spec, n)
    if energy >= 0.0:
        raise DomainError(f"inverse-sqrt rate needs E < 0, got {energy}")
    epsilon = F / abs(energy) ** 3
    if method is Method.EXACT:
        action = action_invsqrt_exact(epsilon, F, cfg=cfg)
    elif method is Method.ASYMPTOTIC:
        action = action_invsqrt_asymptotic(epsilon, F, order or 3)
    else:
        action = action_oracle(spec, energy, F, oracle_cfg)
    prefactor = 2.0 * _SQRT2 / (3.0 * math.pi) * abs(energy) ** 2.5
    flags = _weak_field_flags(0.5, energy, F, limits)
    return _assemble(PotentialKind.POWER_LAW, action, prefactor, E=energy, F=F,
                     field_mode=field_mode, s=0.5, n=n, flags=flags, limits=limits)


def rate_power_law(s: float, E: float, F: float, method: Optional[Method] = None, *,
                   n: Optional[float] = None, order: Optional[int] = None,
                   field_mode: FieldMode = FieldMode.STATIC, cfg: Optional[EvalConfig] = None,
                   oracle_cfg: Optional[EvalConfig] = None,
                   limits: Optional[ValidityLimits] = None) -> RateResult:
    """Rate for any 0 < s < 2 at an explicit energy.

    Defaults to the exact closed form where one exists (s = 1, s = 1/2)
    and to the oracle otherwise.
    """
    spec = PotentialSpec.power_law(s)
    limits = limits or ValidityLimits()
    if spec.is_coulomb:
        action = _coulomb_action(E, F, method or Method.EXACT, order, cfg, oracle_cfg)
        flags = _weak_field_flags(1.0, E, F, limits)
        return _assemble(PotentialKind.POWER_LAW, action, general_prefactor(1.0, E), E=E, F=F,
                         field_mode=field_mode, s=1.0, n=n, flags=flags, limits=limits)
    if spec.is_inverse_sqrt:
        return rate_invsqrt(F, method or Method.EXACT, n=n, energy=E, order=order,
                            field_mode=field_mode, cfg=cfg, oracle_cfg=oracle_cfg, limits=limits)
    if 1.0 < s < 2.0:
        return rate_general_s(s, E, F, method or Method.ORACLE, field_mode=field_mode, n=n,
                              cfg=cfg, oracle_cfg=oracle_cfg, limits=limits)

    method = method or Method.ORACLE
    if method is not Method.ORACLE:
        raise UnsupportedError(f"only the oracle route is available for s = {s}")
    flags = _weak_field_flags(s, E, F, limits)
    action = action_oracle(spec, E, F, oracle_cfg)
    return _assemble(PotentialKind.POWER_LAW, action, general_prefactor(s, E), E=E, F=F,
                     field_mode=field_mode, s=s, n=n, flags=flags, limits=limits)


# ============================================================================
# LOGARITHMIC RATE
# ============================================================================

def rate_log(V0: float, a: float, n: float, F: float, method: Method = Method.ORACLE, *,
             order: Optional[int] = None, field_mode: FieldMode = FieldMode.STATIC,
             oracle_cfg: Optional[EvalConfig] = None,
             limits: Optional[ValidityLimits] = None) -> RateResult:
    """Logarithmic-well rate with prefactor V0/(pi (n - 1/4)).

    n may be fractional when the level is given through its energy.
    Asymptotic order 1 is the leading term, order 2 the two-term expansion.
    """
    spec = PotentialSpec.logarithmic(V0, a)
    if n <= 0.25:
        raise DomainError(f"logarithmic level needs n > 1/4, got {n}")
    epsilon = log_epsilon_from_level(V0, n, F)
    if epsilon >= _INV_E:
        raise DomainError(f"logarithmic barrier is suppressed at epsilon = {epsilon:.6g} >= 1/e")
    E = energy_closed(spec, n)

    if method is Method.EXACT:
        raise UnsupportedError("no exact closed-form action exists for the logarithmic well")
    if method is Method.ASYMPTOTIC:
        order = order or 2
        if order not in (1, 2):
            raise DomainError(f"logarithmic expansion has orders 1..2, got {order}")
        action = action_log_leading(V0, n, F) if order == 1 else action_log_improved(V0, a, E, F)
    else:
        action = action_oracle(spec, E, F, oracle_cfg)

    prefactor = V0 / (math.pi * (n - 0.25))
    n_record = int(n) if float(n).is_integer() else n
    return _assemble(PotentialKind.LOGARITHMIC, action, prefactor, E=E, F=F, field_mode=field_mode,
                     ac_log=(V0, n), n=n_record, limits=limits)


# ============================================================================
# REFERENCE RATES
# ============================================================================

def reference_rates(kind: ReferenceKind, F: float, kappa: float = 1.0,
                    threshold: float = 0.1) -> RateResult:
    """Three-dimensional literature rates, for comparison only"""
    if F <= 0.0:
        raise DomainError(f"field strength must be positive, got {F}")
    flags: List[str] = []
    if kind is ReferenceKind.HYDROGEN_1S:
        prefactor = 4.0 / F
        exponent = -2.0 / (3.0 * F)
        energy = -0.5
        smallness = F
    else:
        if kappa <= 0.0:
            raise DomainError(f"kappa must be positive, got {kappa}")
        prefactor = F / (2.0 * kappa)
        exponent = -2.0 * kappa ** 3 / (3.0 * F)
        energy = -0.5 * kappa ** 2
        smallness = F / kappa ** 3
    if smallness >= threshold:
        logger.warning(f"{kind.value}: field {F} is not small against the binding field")
        flags.append(FLAG_REFERENCE_PRECONDITION)
    return RateResult.assemble(prefactor=prefactor, exponent=exponent, potential=kind.value, F=F,
                               E=energy, method=Method.ASYMPTOTIC, validity_flags=flags)
