"""
Barrier turning points.

Each special case is solved in a dimensionless variable z:

    Coulomb       z - 1 - eps*z**2 = 0,   x = z/|E|
    inverse sqrt  z - 1 - eps*z**3 = 0,   x = z**2/E**2
    logarithmic   z = eps*exp(z),         x = V0*z/F

Any other potential is handled by bracketed bisection on E - V(x).
"""
import logging
import math
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from app.exceptions import ConvergenceError, DomainError, NoBarrierError
from app.models.schemas import PotentialSpec, RootSet, ScaledCase, ScaledField
from app.services.potentials import barrier_top, potential_total
from app.services.special_functions import lambert_w0, lambert_wm1

logger = logging.getLogger(__name__)

_CARDANO_LIMIT = 4.0 / 27.0
_BRACKET_STEPS = 2000
_BISECT_RTOL = 4.0 * np.finfo(float).eps


def scaled_field(spec: PotentialSpec, E: float, F: float) -> ScaledField:
    """Dimensionless field strength for the given potential and level"""
    if F <= 0.0:
        raise DomainError(f"scaled field needs F > 0, got {F}")
    if not spec.is_power_law:
        return ScaledField(ScaledCase.LOG, spec.a * F * math.exp(E / spec.V0) / spec.V0)
    if E >= 0.0:
        raise DomainError(f"power-law bound states need E < 0, got {E}")
    if spec.is_coulomb:
        return ScaledField(ScaledCase.COULOMB, F / E ** 2)
    if spec.is_inverse_sqrt:
        return ScaledField(ScaledCase.INV_SQRT, F / abs(E) ** 3)
    return ScaledField(ScaledCase.GENERIC, F / abs(E) ** (1.0 + 1.0 / spec.s))


def log_epsilon_from_level(V0: float, n: float, F: float) -> float:
    """Logarithmic scaled field written through the quantum number"""
    return (n - 0.25) * F * math.sqrt(2.0 * math.pi) / V0 ** 1.5


def _newton_polish(f: Callable[[float], float], fprime: Callable[[float], float], z: float) -> float:
    slope = fprime(z)
    if abs(slope) < 1e-8:
        return z
    return z - f(z) / slope


def coulomb_roots(epsilon: float, energy: Optional[float] = None) -> RootSet:
    """Roots of z - 1 - eps*z**2; physical positions when the energy is known"""
    if not 0.0 < epsilon < 0.25:
        raise DomainError(f"Coulomb barrier needs 0 < epsilon < 1/4, got {epsilon}")
    root = math.sqrt(1.0 - 4.0 * epsilon)
    # z1 rationalised so small epsilon keeps full precision
    z1 = 2.0 / (1.0 + root)
    z2 = (1.0 + root) / (2.0 * epsilon)

    def f(z: float) -> float:
        return z - 1.0 - epsilon * z * z

    def fprime(z: float) -> float:
        return 1.0 - 2.0 * epsilon * z

    z1 = _newton_polish(f, fprime, z1)
    z2 = _newton_polish(f, fprime, z2)
    if energy is None:
        return RootSet(ScaledCase.COULOMB, (z1, z2))
    scale = 1.0 / abs(energy)
    return RootSet(ScaledCase.COULOMB, (z1, z2), x_left=z1 * scale, x_right=z2 * scale)


def cubic_roots_cardano(epsilon: float, energy: Optional[float] = None) -> RootSet:
    """Three real roots of z - 1 - eps*z**3, ascending; barrier edges are z2, z3"""
    if not 0.0 < epsilon < _CARDANO_LIMIT:
        raise DomainError(f"cubic has three real roots only for 0 < epsilon < 4/27, got {epsilon}")
    radius = 2.0 / math.sqrt(3.0 * epsilon)
    phi = math.acos(-1.5 * math.sqrt(3.0 * epsilon))
    raw = [radius * math.cos(phi / 3.0 - 2.0 * math.pi * k / 3.0) for k in range(3)]

    def f(z: float) -> float:
        return z - 1.0 - epsilon * z ** 3

    def fprime(z: float) -> float:
        return 1.0 - 3.0 * epsilon * z * z

    z1, z2, z3 = sorted(_newton_polish(f, fprime, z) for z in raw)
    if energy is None:
        return RootSet(ScaledCase.INV_SQRT, (z1, z2, z3))
    scale = 1.0 / energy ** 2
    return RootSet(ScaledCase.INV_SQRT, (z1, z2, z3), x_left=z2 * z2 * scale, x_right=z3 * z3 * scale)


def log_turning_points(epsilon: float, V0: Optional[float] = None,
                       F: Optional[float] = None) -> RootSet:
    """z_L = -W0(-eps), z_R = -W-1(-eps)"""
    if not 0.0 < epsilon <= math.exp(-1.0):
        raise DomainError(f"logarithmic barrier needs 0 < epsilon <= 1/e, got {epsilon}")
    z_left = -lambert_w0(-epsilon)
    z_right = -lambert_wm1(-epsilon)
    if V0 is None or F is None:
        return RootSet(ScaledCase.LOG, (z_left, z_right))
    scale = V0 / F
    return RootSet(ScaledCase.LOG, (z_left, z_right), x_left=z_left * scale, x_right=z_right * scale)


def generic_turning_points(spec: PotentialSpec, E: float, F: float) -> RootSet:
    """Barrier edges by bisection on E - V(x) either side of the barrier top"""
    x_max, v_max = barrier_top(spec, F)
    if v_max < E:
        raise NoBarrierError(f"barrier top {v_max:.6g} lies below the level E = {E}")

    def excess(x: float) -> float:
        return E - float(potential_total(spec, F, x))

    if v_max == E:
        return RootSet(ScaledCase.GENERIC, (x_max, x_max), x_left=x_max, x_right=x_max)

    lo = 0.5 * x_max
    for _ in range(_BRACKET_STEPS):
        if excess(lo) >= 0.0:
            break
        lo *= 0.5
    else:
        raise ConvergenceError(f"could not bracket the left turning point below x = {x_max:.6g}")

    hi = 2.0 * x_max
    for _ in range(_BRACKET_STEPS):
        if excess(hi) >= 0.0:
            break
        hi *= 2.0
    else:
        raise ConvergenceError(f"could not bracket the right turning point above x = {x_max:.6g}")

    logger.debug(f"Turning-point brackets: [{lo:.6g}, {x_max:.6g}] and [{x_max:.6g}, {hi:.6g}]")
    x_left = optimize.bisect(excess, lo, x_max, xtol=1e-300, rtol=_BISECT_RTOL, maxiter=400)
    x_right = optimize.bisect(excess, x_max, hi, xtol=1e-300, rtol=_BISECT_RTOL, maxiter=400)
    return RootSet(ScaledCase.GENERIC, (x_left, x_right), x_left=x_left, x_right=x_right)
