"""
WKB bound states of the field-free potentials.

Levels solve int_0^{x_inner} p0 dx = pi*(n - mu). The closed forms for
s = 1, s = 1/2 and the logarithmic well follow from that condition with
the Maslov indices 0, 1/6 and 1/4.
"""
import logging
import math
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from app.exceptions import ConvergenceError, DomainError, UnsupportedError
from app.models.schemas import BoundState, EvalConfig, PotentialSpec
from app.services.potentials import energy_gap, unperturbed_turning_point
from app.services.quadrature import Integrand, integrate_from_endpoint, tanh_sinh
from app.services.special_functions import gamma_ratio

logger = logging.getLogger(__name__)

_BRACKET_STEPS = 400


def default_maslov_index(spec: PotentialSpec) -> float:
    """Maslov index reproducing the known closed-form spectra"""
    if spec.is_coulomb:
        return 0.0
    if spec.is_inverse_sqrt:
        return 1.0 / 6.0
    if not spec.is_power_law:
        return 0.25
    raise UnsupportedError(f"no default Maslov index for s = {spec.s}; pass mu explicitly")


def energy_closed(spec: PotentialSpec, n: float) -> float:
    """Closed-form WKB level for s = 1, s = 1/2 and the logarithmic well.

    The logarithmic level accepts any effective n > 1/4.
    """
    if spec.is_power_law and n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    if not spec.is_power_law and n <= 0.25:
        raise DomainError(f"logarithmic level needs n > 1/4, got {n}")
    if spec.is_coulomb:
        return -1.0 / (2.0 * n * n)
    if spec.is_inverse_sqrt:
        return -0.5 * (n - 1.0 / 6.0) ** (-2.0 / 3.0)
    if not spec.is_power_law:
        return spec.V0 * math.log((n - 0.25) * math.sqrt(2.0 * math.pi / spec.V0) / spec.a)
    raise UnsupportedError(f"no closed-form spectrum for s = {spec.s}; use energy_quantize")


# ============================================================================
# CLASSICAL INTEGRALS OVER [0, x_inner]
# ============================================================================

def _inner_split(spec: PotentialSpec, E: float) -> Tuple[float, float, Integrand, Integrand]:
    x_in = unperturbed_turning_point(spec, E)
    half = 0.5 * x_in

    def momentum_from_turning_point(d: np.ndarray) -> np.ndarray:
        # E - V(x_in - d) = -(V(x_in - d) - V(x_in))
        return np.sqrt(np.maximum(-2.0 * np.asarray(energy_gap(spec, 0.0, x_in, -d)), 0.0))

    def momentum(x: np.ndarray) -> np.ndarray:
        if spec.is_power_law:
            return np.sqrt(2.0 * (E + x ** (-spec.s)))
        return np.sqrt(np.maximum(2.0 * (E - spec.V0 * np.log(x / spec.a)), 0.0))

    return x_in, half, momentum_from_turning_point, momentum


def classical_action(spec: PotentialSpec, E: float, cfg: Optional[EvalConfig] = None) -> float:
    """int_0^{x_inner} p0(x) dx"""
    x_in, half, p_near, p = _inner_split(spec, E)

    if spec.is_power_law:
        # x = d**m makes the x**(-s/2) origin behaviour regular
        power = 2.0 / (2.0 - spec.s)
        origin = integrate_from_endpoint(p, half, cfg, power=power)
    else:
        origin = tanh_sinh(p, 0.0, half, cfg)
    turning = integrate_from_endpoint(p_near, half, cfg)
    return origin + turning


def normalization_integral(spec: PotentialSpec, E: float, cfg: Optional[EvalConfig] = None) -> float:
    """int_0^{x_inner} dx / (2 p0(x))"""
    x_in, half, p_near, p = _inner_split(spec, E)

    def inverse_near(d: np.ndarray) -> np.ndarray:
        return 0.5 / p_near(d)

    def inverse(x: np.ndarray) -> np.ndarray:
        return 0.5 / p(x)

    return tanh_sinh(inverse, 0.0, half, cfg) + integrate_from_endpoint(inverse_near, half, cfg)


# ============================================================================
# QUANTIZATION
# ============================================================================

def energy_quantize(spec: PotentialSpec, n: int, mu: Optional[float] = None,
                    cfg: Optional[EvalConfig] = None) -> float:
    """Solve int p0 dx = pi*(n - mu) for E by a bracketed root search"""
    if n < 1:
        raise DomainError(f"quantum number must be >= 1, got {n}")
    if mu is None:
        mu = default_maslov_index(spec)
    if not 0.0 <= mu < 1.0:
        raise DomainError(f"Maslov index must lie in [0, 1), got {mu}")
    target = math.pi * (n - mu)

    def mismatch(E: float) -> float:
        return classical_action(spec, E, cfg) - target

    if spec.is_power_law:
        lo = hi = -1.0
        for _ in range(_BRACKET_STEPS):
            if mismatch(hi) >= 0.0:
                break
            hi *= 0.25
        else:
            raise ConvergenceError(f"could not bracket level n={n} from above")
        for _ in range(_BRACKET_STEPS):
            if mismatch(lo) <= 0.0:
                break
            lo *= 4.0
        else:
            raise ConvergenceError(f"could not bracket level n={n} from below")
    else:
        lo, hi = -spec.V0, spec.V0
        step = spec.V0
        for _ in range(_BRACKET_STEPS):
            if mismatch(hi) >= 0.0:
                break
            hi += step
            step *= 2.0
        else:
            raise ConvergenceError(f"could not bracket level n={n} from above")
        step = spec.V0
        for _ in range(_BRACKET_STEPS):
            if mismatch(lo) <= 0.0:
                break
            lo -= step
            step *= 2.0
        else:
            raise ConvergenceError(f"could not bracket level n={n} from below")

    logger.debug(f"Quantization bracket for n={n}, mu={mu}: [{lo:.6g}, {hi:.6g}]")
    if lo == hi:
        return lo
    try:
        return float(optimize.brentq(mismatch, lo, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps,
                                     maxiter=200))
    except RuntimeError as e:
        raise ConvergenceError(f"level n={n} did not converge: {e}") from e


# ============================================================================
# NORMALIZATION
# ============================================================================

def _log_effective_level(spec: PotentialSpec, E: float) -> float:
    """n - 1/4 implied by a logarithmic level E"""
    return spec.a * math.exp(E / spec.V0) / math.sqrt(2.0 * math.pi / spec.V0)


def normalization(spec: PotentialSpec, state: BoundState) -> float:
    """Normalization constant A**2 of the WKB wave function"""
    if spec.is_power_law:
        s = spec.s
        x0 = state.x_inner
        return 2.0 * x0 ** (-1.0 - 0.5 * s) * math.sqrt(2.0 / math.pi) \
            * gamma_ratio(1.0 / s, 0.5 + 1.0 / s)
    # equals n - 1/4 on the quantized levels
    return 2.0 * spec.V0 / (math.pi * _log_effective_level(spec, state.E))


def bound_state(spec: PotentialSpec, n: Optional[int] = None, mu: Optional[float] = None,
                energy: Optional[float] = None, cfg: Optional[EvalConfig] = None) -> BoundState:
    """Level from an explicit energy, a closed form, or quantization"""
    if energy is None and n is None:
        raise DomainError("a bound state needs either a quantum number or an energy")
    if energy is None:
        if mu is None and (spec.is_coulomb or spec.is_inverse_sqrt or not spec.is_power_law):
            energy = energy_closed(spec, n)
            mu = default_maslov_index(spec)
        else:
            energy = energy_quantize(spec, n, mu, cfg)
    x_inner = unperturbed_turning_point(spec, energy)
    draft = BoundState(E=energy, x_inner=x_inner, A_sq=0.0, n=n, mu=mu)
    return BoundState(E=energy, x_inner=x_inner, A_sq=normalization(spec, draft), n=n, mu=mu)
