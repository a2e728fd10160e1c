"""
Confining potentials in an external field.

Power law:   V(x) = -1/x**s - F*x      (V0 = 1)
Logarithmic: V(x) = V0*ln(x/a) - F*x

All functions accept floats or numpy arrays of positions.
"""
import logging
from typing import Tuple, Union

import numpy as np

from app.exceptions import DomainError, NoBarrierError, UnsupportedError
from app.models.schemas import PotentialSpec, WeakFieldCheck

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

RADICAND_TOLERANCE = 1e-12
DEFAULT_WEAK_FIELD_THRESHOLD = 0.1


def _as_output(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def potential_total(spec: PotentialSpec, F: float, x: ArrayLike) -> ArrayLike:
    """Binding potential plus the -F*x field term"""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("potential is defined for x > 0 only")
    if spec.is_power_law:
        value = -x ** (-spec.s) - F * x
    else:
        value = spec.V0 * np.log(x / spec.a) - F * x
    return _as_output(value)


def energy_gap(spec: PotentialSpec, F: float, x_ref: float, dx: ArrayLike) -> ArrayLike:
    """V(x_ref + dx) - V(x_ref) without cancellation for small dx"""
    dx = np.asarray(dx, dtype=float)
    ratio = dx / x_ref
    if spec.is_power_law:
        value = -x_ref ** (-spec.s) * np.expm1(-spec.s * np.log1p(ratio)) - F * dx
    else:
        value = spec.V0 * np.log1p(ratio) - F * dx
    return _as_output(value)


def _checked_root(radicand: np.ndarray) -> ArrayLike:
    if np.any(radicand < -RADICAND_TOLERANCE):
        worst = float(np.min(radicand))
        raise DomainError(f"momentum radicand {worst:.3e} is negative: point lies on the wrong side of a turning point")
    return _as_output(np.sqrt(np.maximum(radicand, 0.0)))


def momentum_classical(spec: PotentialSpec, E: float, x: ArrayLike, F: float = 0.0) -> ArrayLike:
    """sqrt(2(E - V(x))) in the classically allowed region"""
    radicand = 2.0 * (E - np.asarray(potential_total(spec, F, x)))
    return _checked_root(radicand)


def momentum_barrier(spec: PotentialSpec, E: float, F: float, x: ArrayLike) -> ArrayLike:
    """sqrt(2(V(x) - E)) under the barrier"""
    radicand = 2.0 * (np.asarray(potential_total(spec, F, x)) - E)
    return _checked_root(radicand)


def unperturbed_turning_point(spec: PotentialSpec, E: float) -> float:
    """Turning point of the field-free potential at energy E"""
    if spec.is_power_law:
        if E >= 0.0:
            raise DomainError(f"power-law bound states need E < 0, got {E}")
        return float(abs(E) ** (-1.0 / spec.s))
    return float(spec.a * np.exp(E / spec.V0))


def weak_field_ratio(s: float, E: float, F: float) -> float:
    """F/|E|^(1+1/s)"""
    if E >= 0.0:
        raise DomainError(f"weak-field check needs E < 0, got {E}")
    return F / abs(E) ** (1.0 + 1.0 / s)


def weak_field_check(spec: PotentialSpec, E: float, F: float,
                     threshold: float = DEFAULT_WEAK_FIELD_THRESHOLD) -> WeakFieldCheck:
    """Compare F with |E|^(1+1/s)"""
    if not spec.is_power_law:
        raise UnsupportedError("weak-field ratio is defined for power-law potentials; "
                               "use the scaled field epsilon for the logarithmic case")
    ratio = weak_field_ratio(spec.s, E, F)
    valid = ratio < threshold
    if not valid:
        logger.warning(f"Weak-field ratio {ratio:.4g} exceeds threshold {threshold:g} (s={spec.s}, E={E}, F={F})")
    return WeakFieldCheck(ratio=ratio, valid=valid)


def barrier_top(spec: PotentialSpec, F: float) -> Tuple[float, float]:
    """Position and height of the barrier maximum, (x_max, V(x_max))"""
    if F <= 0.0:
        raise NoBarrierError("no barrier forms without an external field (F = 0)")
    if spec.is_power_law:
        x_max = (spec.s / F) ** (1.0 / (spec.s + 1.0))
    else:
        x_max = spec.V0 / F
    return x_max, float(potential_total(spec, F, x_max))
