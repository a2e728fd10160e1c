"""
Barrier action exponents, -2 * int_{x_L}^{x_R} |p(x)| dx.

Three routes lead to the same quantity:

* ``action_oracle`` integrates numerically between exact turning points
  and is the reference every other route is compared with;
* the exact closed forms for s = 1 (Gauss 2F1) and s = 1/2 (Appell F1);
* the asymptotic expansions in the scaled field epsilon.
"""
import logging
import math
from typing import Dict, Optional

import numpy as np

from app.exceptions import ApplicabilityError, DomainError
from app.models.schemas import ActionResult, EvalConfig, Method, PotentialSpec
from app.services.potentials import energy_gap, weak_field_ratio
from app.services.quadrature import integrate_from_endpoint, integrate_geometric, tanh_sinh
from app.services.special_functions import appell_f1, gauss_2f1
from app.services.turning_points import (
    coulomb_roots,
    cubic_roots_cardano,
    generic_turning_points,
    log_epsilon_from_level,
    log_turning_points,
    scaled_field,
)

logger = logging.getLogger(__name__)

_INV_E = math.exp(-1.0)
_SQRT2 = math.sqrt(2.0)
ACTION_FORMS = ("transposed", "direct")
DEFAULT_WEAK_FIELD_THRESHOLD = 0.1


def _check_form(form: str) -> None:
    if form not in ACTION_FORMS:
        raise DomainError(f"unknown action form '{form}', expected one of {ACTION_FORMS}")


# ============================================================================
# QUADRATURE ORACLE
# ============================================================================

def action_oracle(spec: PotentialSpec, E: float, F: float,
                  cfg: Optional[EvalConfig] = None) -> ActionResult:
    """Barrier action by quadrature between bisected turning points.

    The square-root zeros at both turning points are removed with
    x = x_turn +- u**2; the interior is split into geometrically growing
    panels because the left edge varies on the scale x_L while the
    barrier extends to roughly |E|/F.
    """
    roots = generic_turning_points(spec, E, F)
    x_left, x_right = roots.x_left, roots.x_right
    span = x_right - x_left
    epsilon = scaled_field(spec, E, F).epsilon
    if span <= 0.0:
        return ActionResult(0.0, Method.ORACLE, epsilon=epsilon,
                            terms={"x_left": x_left, "x_right": x_right})

    left_length = min(x_left, 0.25 * span)
    right_length = 0.25 * span

    def momentum_from_left(d: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(2.0 * np.asarray(energy_gap(spec, F, x_left, d)), 0.0))

    def momentum_from_right(d: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(2.0 * np.asarray(energy_gap(spec, F, x_right, -d)), 0.0))

    def momentum(x: np.ndarray) -> np.ndarray:
        return momentum_from_left(x - x_left)

    left = integrate_from_endpoint(momentum_from_left, left_length, cfg)
    right = integrate_from_endpoint(momentum_from_right, right_length, cfg)
    middle = integrate_geometric(momentum, x_left + left_length, x_right - right_length,
                                 left_length, cfg)
    value = -2.0 * (left + middle + right)
    logger.debug(f"Oracle action {value:.12g} on [{x_left:.10g}, {x_right:.10g}]")
    return ActionResult(value, Method.ORACLE, epsilon=epsilon,
                        terms={"x_left": x_left, "x_right": x_right})


# ============================================================================
# GENERAL 1 < s < 2
# ============================================================================

def f_of_s(s: float, cfg: Optional[EvalConfig] = None) -> float:
    """int_1^inf dy / ((sqrt(1 - y**-s) + 1) y**s), finite for s > 1"""
    if s <= 1.0:
        raise DomainError(f"f(s) diverges for s <= 1, got {s}")

    def near_one(d: np.ndarray) -> np.ndarray:
        # y = 1 + d
        log_y = np.log1p(d)
        root = np.sqrt(-np.expm1(-s * log_y))
        return np.exp(-s * log_y) / (root + 1.0)

    def tail_remainder(t: np.ndarray) -> np.ndarray:
        # y = 1/t with the t**(s-2)/2 part integrated in closed form
        root = np.sqrt(-np.expm1(s * np.log(t)))
        return t ** (2.0 * s - 2.0) / (2.0 * (1.0 + root) ** 2)

    head = integrate_from_endpoint(near_one, 1.0, cfg)
    tail = 2.0 ** (1.0 - s) / (2.0 * (s - 1.0)) + tanh_sinh(tail_remainder, 0.0, 0.5, cfg)
    return head + tail


def action_general_s(s: float, E: float, F: float, cfg: Optional[EvalConfig] = None,
                     threshold: float = DEFAULT_WEAK_FIELD_THRESHOLD) -> ActionResult:
    """Weak-field decomposition I_s1 + I_s2 + I_s3"""
    if not 1.0 < s <= 2.0:
        raise DomainError(f"the decomposition holds for 1 < s <= 2, got {s}")
    ratio = weak_field_ratio(s, E, F)
    if ratio >= threshold:
        raise ApplicabilityError(
            f"weak-field ratio {ratio:.4g} is not below {threshold:g}; the decomposition does not apply"
        )
    depth = abs(E)
    f_value = f_of_s(s, cfg)
    scale = 2.0 * _SQRT2 / depth ** (1.0 / s - 0.5)
    terms = {
        "I_s1": -2.0 * (2.0 * depth) ** 1.5 / (3.0 * F),
        "I_s2": scale,
        "I_s3": scale * f_value,
        "f_s": f_value,
    }
    value = terms["I_s1"] + terms["I_s2"] + terms["I_s3"]
    return ActionResult(value, Method.ASYMPTOTIC, epsilon=ratio, terms=terms)


# ============================================================================
# COULOMB s = 1
# ============================================================================

def action_coulomb_exact(epsilon: float, E: float, form: str = "transposed",
                         cfg: Optional[EvalConfig] = None) -> ActionResult:
    """Exact Coulomb action through 2F1(1/2, 3/2; 3; .)"""
    _check_form(form)
    if E >= 0.0:
        raise DomainError(f"Coulomb action needs E < 0, got {E}")
    z1, z2 = coulomb_roots(epsilon).roots
    pivot, other = (z2, z1) if form == "transposed" else (z1, z2)
    argument = 1.0 - other / pivot
    hyp = gauss_2f1(0.5, 1.5, 3.0, argument, cfg)
    value = -(2.0 * _SQRT2 / math.sqrt(abs(E))) * (z2 - z1) ** 2 / math.sqrt(pivot) \
        * math.sqrt(epsilon) * (math.pi / 8.0) * hyp
    return ActionResult(value, Method.EXACT, epsilon=epsilon,
                        terms={"z1": z1, "z2": z2, "argument": argument, "hyp2f1": hyp})


def action_coulomb_asymptotic(epsilon: float, n: float, order: int = 3) -> ActionResult:
    """-4n (2/(3 eps) + ln(eps)/2 - (ln 16 + 1)/2), truncated after `order` terms"""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if order not in (1, 2, 3):
        raise DomainError(f"Coulomb expansion has orders 1..3, got {order}")
    pieces = [
        2.0 / (3.0 * epsilon),
        0.5 * math.log(epsilon),
        -0.5 * (math.log(16.0) + 1.0),
    ]
    terms = {f"term_{k + 1}": -4.0 * n * piece for k, piece in enumerate(pieces[:order])}
    return ActionResult(sum(terms.values()), Method.ASYMPTOTIC, epsilon=epsilon,
                        order=order, terms=terms)


# ============================================================================
# INVERSE SQUARE ROOT s = 1/2
# ============================================================================

def invsqrt_appell_arguments(z1: float, z2: float, z3: float, form: str = "transposed") -> Dict[str, float]:
    """Appell arguments and root prefactor for either labelling of the barrier edges"""
    _check_form(form)
    if form == "transposed":
        return {
            "y1": 1.0 - z2 / z3,
            "y2": (z2 - z3) / (z1 - z3),
            "root_factor": math.sqrt(z3 * (z3 - z1)),
        }
    return {
        "y1": 1.0 - z3 / z2,
        "y2": (z3 - z2) / (z1 - z2),
        "root_factor": math.sqrt(z2 * (z2 - z1)),
    }


def action_invsqrt_exact(epsilon: float, F: float, form: str = "transposed",
                         cfg: Optional[EvalConfig] = None) -> ActionResult:
    """Exact inverse-square-root action through F1(3/2; -1/2, -1/2; 3; y1, y2)"""
    if F <= 0.0:
        raise DomainError(f"field strength must be positive, got {F}")
    z1, z2, z3 = cubic_roots_cardano(epsilon).roots
    args = invsqrt_appell_arguments(z1, z2, z3, form)
    appell = appell_f1(1.5, -0.5, -0.5, 3.0, args["y1"], args["y2"], cfg)
    value = -(math.pi * _SQRT2 * epsilon / (2.0 * math.sqrt(F))) * (z3 - z2) ** 2 \
        * args["root_factor"] * appell
    terms = {"z1": z1, "z2": z2, "z3": z3, "y1": args["y1"], "y2": args["y2"], "appell_f1": appell}
    return ActionResult(value, Method.EXACT, epsilon=epsilon, terms=terms)


def action_invsqrt_asymptotic(epsilon: float, F: float, order: int = 3) -> ActionResult:
    """Three-term small-epsilon expansion of the inverse-square-root action"""
    if epsilon <= 0.0 or F <= 0.0:
        raise DomainError(f"epsilon and F must be positive, got ({epsilon}, {F})")
    if order not in (1, 2, 3):
        raise DomainError(f"inverse-sqrt expansion has orders 1..3, got {order}")
    scale = -4.0 * _SQRT2 * epsilon / math.sqrt(F)
    pieces = [
        1.0 / (3.0 * epsilon ** 1.5),
        -math.pi / (4.0 * epsilon),
        (2.0 - 3.0 * math.pi) / (48.0 * math.sqrt(epsilon)),
    ]
    terms = {f"term_{k + 1}": scale * piece for k, piece in enumerate(pieces[:order])}
    return ActionResult(sum(terms.values()), Method.ASYMPTOTIC, epsilon=epsilon,
                        order=order, terms=terms)


# ============================================================================
# LOGARITHMIC
# ============================================================================

def action_log_leading(V0: float, n: float, F: float) -> ActionResult:
    """Leading right-turning-point contribution, -(4 sqrt2 V0^(3/2)/(3F)) ln(1/eps)^(3/2)"""
    if V0 <= 0.0 or F <= 0.0:
        raise DomainError(f"V0 and F must be positive, got ({V0}, {F})")
    epsilon = log_epsilon_from_level(V0, n, F)
    if epsilon >= _INV_E:
        raise DomainError(f"logarithmic barrier is suppressed at epsilon = {epsilon:.6g} >= 1/e")
    value = -(4.0 * _SQRT2 * V0 ** 1.5 / (3.0 * F)) * math.log(1.0 / epsilon) ** 1.5
    return ActionResult(value, Method.ASYMPTOTIC, epsilon=epsilon, order=1)


def action_log_improved(V0: float, a: float, E: float, F: float) -> ActionResult:
    """Two-term expansion of the logarithmic action about the right turning point.

    value = ((2 V0 z_R)^(3/2) / (3F)) (1 + (6/z_R)(1 - atanh w)), w = sqrt(1 - z_L/z_R).
    The direct integral of the same expansion is reported in terms.
    """
    if V0 <= 0.0 or a <= 0.0 or F <= 0.0:
        raise DomainError(f"V0, a and F must be positive, got ({V0}, {a}, {F})")
    epsilon = a * F * math.exp(E / V0) / V0
    if epsilon >= _INV_E:
        raise DomainError(f"logarithmic barrier is suppressed at epsilon = {epsilon:.6g} >= 1/e")
    z_left, z_right = log_turning_points(epsilon).roots
    ratio = z_left / z_right
    w = math.sqrt(1.0 - ratio)
    # atanh(w) with 1 - w = ratio / (1 + w)
    atanh_w = 0.5 * math.log((1.0 + w) ** 2 / ratio)
    value = ((2.0 * V0 * z_right) ** 1.5 / (3.0 * F)) * (1.0 + (6.0 / z_right) * (1.0 - atanh_w))
    if value > 0.0:
        raise ApplicabilityError(
            f"two-term logarithmic action changes sign at epsilon = {epsilon:.6g}"
        )
    correction = 2.0 * math.log1p(w) - 2.0 * w - (1.0 - w) * math.log(ratio)
    bracket = (2.0 / 3.0) * (z_right - z_left) ** 1.5 + math.sqrt(z_right) * correction
    integral = -((2.0 * V0) ** 1.5 / F) * bracket
    terms = {"z_left": z_left, "z_right": z_right, "atanh_w": atanh_w, "expansion_integral": integral}
    return ActionResult(value, Method.ASYMPTOTIC, epsilon=epsilon, order=2, terms=terms)
