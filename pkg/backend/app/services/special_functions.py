"""
Special functions behind the closed-form barrier actions.

Gauss 2F1 is summed as a power series on |x| <= 3/4, reflected through
the Pfaff transformation for x < -1/2 and evaluated near x = 1 from its
Euler integral (or the 1 - x linear transformation when the integral is
not available). Appell F1 is always evaluated from its Euler integral.
Both Euler integrals are split at t = 1/2 and substituted so that the
algebraic endpoint weights vanish before the tanh-sinh rule is applied.
"""
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import special

from app.exceptions import ConvergenceError, DivergenceError, DomainError
from app.models.schemas import EvalConfig
from app.services.quadrature import tanh_sinh

logger = logging.getLogger(__name__)

_INV_E = math.exp(-1.0)
_EPS = np.finfo(float).eps
_NEAR_UNITY = 0.75
_PFAFF_BELOW = -0.5
HYP2F1_METHODS = ("auto", "series", "integral", "transform")


def _is_nonpositive_integer(value: float) -> bool:
    return value <= 0.0 and value == math.floor(value)


def _is_integer(value: float) -> bool:
    return value == math.floor(value)


# ============================================================================
# GAMMA RATIOS
# ============================================================================

def gamma_ratio(p: float, q: float) -> float:
    """Gamma(p)/Gamma(q) for positive arguments, via log-Gamma"""
    if p <= 0.0 or q <= 0.0:
        raise DomainError(f"gamma_ratio needs positive arguments, got ({p}, {q})")
    return math.exp(float(special.gammaln(p) - special.gammaln(q)))


# ============================================================================
# EULER-TYPE INTEGRALS
# ============================================================================

def _euler_integral(a: float, c: float, factors: Sequence[Tuple[float, float]],
                    cfg: EvalConfig) -> float:
    """Gamma(c)/(Gamma(a)Gamma(c-a)) * int_0^1 t^(a-1)(1-t)^(c-a-1) prod (1-y t)^(-b) dt

    factors holds the (b, y) pairs. The interval is split at t = 1/2; the
    left half uses t = u^(1/a) and the right half 1 - t = v^(1/(c-a)),
    which absorb the endpoint weights for any a > 0, c - a > 0.
    """
    norm = math.exp(float(special.gammaln(c) - special.gammaln(a) - special.gammaln(c - a)))
    rest = c - a
    active = [(b, y) for b, y in factors if b != 0.0 and y != 0.0]

    def weights(t: np.ndarray, one_minus_t: np.ndarray) -> np.ndarray:
        value = np.ones_like(t)
        for b, y in active:
            # 1 - y t written so that y -> 1 keeps full precision near t = 1
            value = value * ((1.0 - y) * t + one_minus_t) ** (-b)
        return value

    def left(u: np.ndarray) -> np.ndarray:
        t = u ** (1.0 / a)
        return (1.0 - t) ** (rest - 1.0) * weights(t, 1.0 - t) / a

    def right(v: np.ndarray) -> np.ndarray:
        d = v ** (1.0 / rest)
        t = 1.0 - d
        return t ** (a - 1.0) * weights(t, d) / rest

    total = tanh_sinh(left, 0.0, 0.5 ** a, cfg) + tanh_sinh(right, 0.0, 0.5 ** rest, cfg)
    return norm * total


# ============================================================================
# GAUSS HYPERGEOMETRIC FUNCTION
# ============================================================================

def _hyp2f1_series(a: float, b: float, c: float, x: float, cfg: EvalConfig) -> float:
    term = 1.0
    total = 1.0
    for k in range(cfg.max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x
        total += term
        if term == 0.0 or abs(term) <= 0.1 * cfg.rel_tol * abs(total):
            return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {x}) series not converged after {cfg.max_terms} terms"
    )


def _gauss_sum(a: float, b: float, c: float) -> float:
    excess = c - a - b
    if excess <= 0.0:
        raise DivergenceError(f"2F1 diverges at x = 1 when c - a - b = {excess} <= 0")
    return float(special.gamma(c) * special.gamma(excess)
                 * special.rgamma(c - a) * special.rgamma(c - b))


def _euler_parameter(a: float, b: float, c: float) -> Optional[Tuple[float, float]]:
    """(exponent, weight parameter) pair for which the Euler integral is valid"""
    for weight, exponent in ((b, a), (a, b)):
        if 0.0 < weight < c:
            return exponent, weight
    return None


def _hyp2f1_integral(a: float, b: float, c: float, x: float, cfg: EvalConfig) -> float:
    pair = _euler_parameter(a, b, c)
    if pair is None:
        raise DomainError(f"no Euler integral for 2F1({a}, {b}; {c}; x): need 0 < a or b < c")
    exponent, weight = pair
    return _euler_integral(weight, c, [(exponent, x)], cfg)


def _hyp2f1_transform(a: float, b: float, c: float, x: float, cfg: EvalConfig) -> float:
    excess = c - a - b
    if _is_integer(excess):
        raise DomainError(f"1 - x transformation is degenerate for integer c - a - b = {excess}")
    y = 1.0 - x
    first = special.gamma(c) * special.gamma(excess) * special.rgamma(c - a) * special.rgamma(c - b)
    second = special.gamma(c) * special.gamma(-excess) * special.rgamma(a) * special.rgamma(b)
    value = first * _hyp2f1_series(a, b, 1.0 - excess, y, cfg)
    if second != 0.0:
        value += second * y ** excess * _hyp2f1_series(c - a, c - b, 1.0 + excess, y, cfg)
    return float(value)


def gauss_2f1(a: float, b: float, c: float, x: float,
              cfg: Optional[EvalConfig] = None, method: str = "auto") -> float:
    """Gauss hypergeometric function 2F1(a, b; c; x) for real x <= 1"""
    cfg = cfg or EvalConfig()
    if method not in HYP2F1_METHODS:
        raise DomainError(f"unknown 2F1 method '{method}', expected one of {HYP2F1_METHODS}")
    if _is_nonpositive_integer(c):
        raise DomainError(f"2F1 undefined for non-positive integer c = {c}")
    if x > 1.0:
        raise DomainError(f"2F1 is evaluated for x <= 1 only, got {x}")
    if x == 1.0:
        return _gauss_sum(a, b, c)

    if method == "series":
        return _hyp2f1_series(a, b, c, x, cfg)
    if method == "integral":
        return _hyp2f1_integral(a, b, c, x, cfg)
    if method == "transform":
        return _hyp2f1_transform(a, b, c, x, cfg)

    if x < _PFAFF_BELOW:
        # Pfaff: 2F1(a,b;c;x) = (1-x)^(-a) 2F1(a, c-b; c; x/(x-1))
        return (1.0 - x) ** (-a) * gauss_2f1(a, c - b, c, x / (x - 1.0), cfg)
    if x <= _NEAR_UNITY:
        return _hyp2f1_series(a, b, c, x, cfg)
    if _euler_parameter(a, b, c) is not None:
        return _hyp2f1_integral(a, b, c, x, cfg)
    if not _is_integer(c - a - b):
        return _hyp2f1_transform(a, b, c, x, cfg)
    logger.debug(f"2F1({a}, {b}; {c}; {x}): falling back to the direct series")
    return _hyp2f1_series(a, b, c, x, cfg)


# ============================================================================
# APPELL F1
# ============================================================================

def appell_f1(a: float, b1: float, b2: float, c: float, y1: float, y2: float,
              cfg: Optional[EvalConfig] = None) -> float:
    """Appell F1(a; b1, b2; c; y1, y2) from its Euler integral (a > 0, c - a > 0)"""
    cfg = cfg or EvalConfig()
    if a <= 0.0 or c - a <= 0.0:
        raise DomainError(f"Euler integral for F1 needs a > 0 and c - a > 0, got a={a}, c={c}")
    if y1 >= 1.0 or y2 >= 1.0:
        raise DomainError(f"F1 arguments must be below 1, got ({y1}, {y2})")
    return _euler_integral(a, c, [(b1, y1), (b2, y2)], cfg)


def appell_f1_near_unity_general(a: float, b1: float, b2: float, c: float,
                                 y1: float, y2: float,
                                 cfg: Optional[EvalConfig] = None) -> float:
    """Two-term expansion of F1 about y1 = 1 as a product of Gauss functions.

    Needs c - a - b1 > 1 so that both Gauss sums at unit argument exist.
    """
    cfg = cfg or EvalConfig()
    leading = gauss_2f1(a, b1, c, 1.0, cfg) * gauss_2f1(a, b2, c - b1, y2, cfg)
    slope = (a * b1 / c) * gauss_2f1(a + 1.0, b1 + 1.0, c + 1.0, 1.0, cfg) \
        * gauss_2f1(a + 1.0, b2, c - b1, y2, cfg)
    return leading + slope * (y1 - 1.0)


def appell_f1_near_unity(y1: float, y2: float, cfg: Optional[EvalConfig] = None) -> float:
    """F1(3/2; -1/2, -1/2; 3; y1, y2) to first order in y1 - 1, in elementary form"""
    if not 0.0 < y2 < 1.0:
        raise DomainError(f"near-unity expansion needs 0 < y2 < 1, got {y2}")
    cfg = cfg or EvalConfig()
    leading = 32.0 / (15.0 * math.pi) * gauss_2f1(-0.5, 1.5, 3.5, y2, cfg)
    bracket = (math.sqrt(1.0 - y2) * (2.0 / y2 + 3.0 / y2 ** 2 - 8.0)
               - 3.0 * math.asin(math.sqrt(y2)) / y2 ** 2.5)
    return leading + bracket * (y1 - 1.0) / (6.0 * math.pi)


# ============================================================================
# LAMBERT W
# ============================================================================

def _clamp_branch_argument(x: float) -> float:
    if x < -_INV_E:
        if x >= -_INV_E - 4.0 * _EPS:
            return -_INV_E
        raise DomainError(f"Lambert W is real only for x >= -1/e, got {x}")
    return x


def _branch_point_series(x: float, upper: bool) -> float:
    p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
    if not upper:
        p = -p
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def _halley(w: float, x: float) -> float:
    for _ in range(64):
        ew = math.exp(w)
        residual = w * ew - x
        if residual == 0.0:
            break
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * residual / (2.0 * wp1)
        if denom == 0.0:
            break
        step = residual / denom
        w -= step
        if abs(step) <= _EPS * (1.0 + abs(w)):
            break
    return w


def lambert_w0(x: float) -> float:
    """Principal branch W0(x) >= -1, x >= -1/e"""
    x = _clamp_branch_argument(x)
    if x == 0.0:
        return 0.0
    if x == -_INV_E:
        return -1.0
    if x < -0.25:
        guess = _branch_point_series(x, upper=True)
    elif x < 0.3:
        guess = x - x * x + 1.5 * x ** 3
    elif x <= math.e:
        guess = math.log1p(x)
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        guess = l1 - l2 + l2 / l1
    return max(_halley(guess, x), -1.0)


def lambert_wm1(x: float) -> float:
    """Lower branch W-1(x) <= -1, -1/e <= x < 0"""
    x = _clamp_branch_argument(x)
    if x >= 0.0:
        raise DomainError(f"W-1 is real only for -1/e <= x < 0, got {x}")
    if x == -_INV_E:
        return -1.0
    if x < -0.25:
        guess = _branch_point_series(x, upper=False)
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        guess = l1 - l2 + l2 / l1
    return min(_halley(guess, x), -1.0)
