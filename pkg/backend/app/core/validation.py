"""
Acceptance suite: every closed form and expansion checked against the
quadrature oracle or an exact identity.

Each criterion is a plain function of a ``ValidationContext`` returning a
``CriterionResult``; criteria are independent and run in a thread pool.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence

import numpy as np

from app.core.barrier import (
    action_coulomb_asymptotic,
    action_coulomb_exact,
    action_invsqrt_asymptotic,
    action_invsqrt_exact,
    action_log_improved,
    action_log_leading,
    action_oracle,
    f_of_s,
)
from app.core.rates import ac_average_factor, cycle_averaged_penetrability, static_exponent
from app.exceptions import TunnelingError, UsageError
from app.models.schemas import (
    BoundState,
    CriterionResult,
    EvalConfig,
    PotentialSpec,
    ValidationReport,
)
from app.services.potentials import potential_total, unperturbed_turning_point
from app.services.spectra import (
    energy_closed,
    energy_quantize,
    normalization,
    normalization_integral,
)
from app.services.turning_points import (
    coulomb_roots,
    cubic_roots_cardano,
    generic_turning_points,
    log_turning_points,
)

logger = logging.getLogger(__name__)

COULOMB_EPSILONS = (1e-4, 1e-3, 1e-2, 0.04, 0.1)
INVSQRT_EPSILONS = (1e-4, 1e-3, 1e-2)


@dataclass(frozen=True)
class ValidationContext:
    cfg: EvalConfig
    oracle_cfg: EvalConfig
    tol_scale: float = 1.0

    def tol(self, value: float) -> float:
        return value * self.tol_scale


class Criterion(NamedTuple):
    name: str
    group: str
    check: Callable[[ValidationContext], CriterionResult]


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _result(name: str, group: str, measured: float, tolerance: float, detail: str = "",
            passed: Optional[bool] = None) -> CriterionResult:
    if passed is None:
        passed = bool(measured <= tolerance)
    return CriterionResult(name=name, group=group, passed=passed, measured=measured,
                           tolerance=tolerance, detail=detail)


# ============================================================================
# CRITERIA
# ============================================================================

def check_f_limit(ctx: ValidationContext) -> CriterionResult:
    value = f_of_s(2.0, ctx.cfg)
    error = abs(value - (math.pi / 2.0 - 1.0))
    return _result("f_of_s_limit", "special", error, ctx.tol(1e-9), f"f(2) = {value:.15g}")


def check_coulomb_exact(ctx: ValidationContext) -> CriterionResult:
    E = -0.5
    spec = PotentialSpec.power_law(1.0)
    worst = 0.0
    for epsilon in COULOMB_EPSILONS:
        exact = action_coulomb_exact(epsilon, E, cfg=ctx.cfg).value
        oracle = action_oracle(spec, E, epsilon * E ** 2, ctx.oracle_cfg).value
        worst = max(worst, _relative(exact, oracle))
    return _result("coulomb_exact_vs_oracle", "coulomb", worst, ctx.tol(1e-8),
                   f"epsilon in {COULOMB_EPSILONS}")


def check_transposition(ctx: ValidationContext) -> CriterionResult:
    worst = 0.0
    for epsilon in COULOMB_EPSILONS:
        transposed = action_coulomb_exact(epsilon, -0.5, "transposed", ctx.cfg).value
        direct = action_coulomb_exact(epsilon, -0.5, "direct", ctx.cfg).value
        worst = max(worst, _relative(direct, transposed))
    for epsilon in (1e-3, 1e-2):
        F = epsilon * 0.125
        transposed = action_invsqrt_exact(epsilon, F, "transposed", ctx.cfg).value
        direct = action_invsqrt_exact(epsilon, F, "direct", ctx.cfg).value
        worst = max(worst, _relative(direct, transposed))
    return _result("transposition_invariance", "coulomb", worst, ctx.tol(1e-10))


def check_coulomb_asymptotic(ctx: ValidationContext) -> CriterionResult:
    errors = []
    for epsilon in (1e-2, 1e-3):
        exact = action_coulomb_exact(epsilon, -0.5, cfg=ctx.cfg).value
        asymptotic = action_coulomb_asymptotic(epsilon, 1).value
        errors.append(abs(exact - asymptotic))
    ratio = errors[0] / errors[1]
    return _result("coulomb_asymptotic_order", "coulomb", ratio, 20.0,
                   f"error ratio over one decade, expected in [5, 20]",
                   passed=5.0 <= ratio <= 20.0)


def check_invsqrt_exact(ctx: ValidationContext) -> CriterionResult:
    E = -0.5
    spec = PotentialSpec.power_law(0.5)
    worst = 0.0
    for epsilon in INVSQRT_EPSILONS:
        F = epsilon * abs(E) ** 3
        exact = action_invsqrt_exact(epsilon, F, cfg=ctx.cfg).value
        oracle = action_oracle(spec, E, F, ctx.oracle_cfg).value
        worst = max(worst, _relative(exact, oracle))
    return _result("invsqrt_exact_vs_oracle", "invsqrt", worst, ctx.tol(1e-7),
                   f"epsilon in {INVSQRT_EPSILONS}")


def invsqrt_scaled_remainder(epsilon: float, E: float = -0.5,
                             cfg: Optional[EvalConfig] = None) -> float:
    """Drift of the eps^(-1/2) coefficient: |exact - three-term| * sqrt(F eps) / (4 sqrt2 eps).

    The three-term expansion lacks an eps^(-1/2) ln(eps) piece, so this
    grows like ln(1/eps) / 16 rather than staying flat.
    """
    F = epsilon * abs(E) ** 3
    exact = action_invsqrt_exact(epsilon, F, cfg=cfg).value
    asymptotic = action_invsqrt_asymptotic(epsilon, F, 3).value
    return abs(exact - asymptotic) * math.sqrt(F * epsilon) / (4.0 * math.sqrt(2.0) * epsilon)


def invsqrt_expansion_errors(epsilon: float, E: float = -0.5,
                             cfg: Optional[EvalConfig] = None) -> List[float]:
    """|exact - k-term| for k = 1, 2, 3"""
    F = epsilon * abs(E) ** 3
    exact = action_invsqrt_exact(epsilon, F, cfg=cfg).value
    return [abs(exact - action_invsqrt_asymptotic(epsilon, F, order).value) for order in (1, 2, 3)]


def check_invsqrt_remainder(ctx: ValidationContext) -> CriterionResult:
    epsilons = (1e-2, 1e-3, 1e-4)
    improving = all(
        errors[2] < errors[1] < errors[0]
        for errors in (invsqrt_expansion_errors(eps, cfg=ctx.cfg) for eps in epsilons)
    )
    per_log = [invsqrt_scaled_remainder(eps, cfg=ctx.cfg) / math.log(1.0 / eps) for eps in epsilons]
    growth = max(value / per_log[0] for value in per_log[1:])
    detail = f"remainder / ln(1/eps) at 1e-2 = {per_log[0]:.6g}, terms reduce error: {improving}"
    return _result("invsqrt_remainder_bounded", "invsqrt", growth, 3.0, detail,
                   passed=improving and growth <= 3.0)


def check_log_ordering(ctx: ValidationContext) -> CriterionResult:
    V0, a, n = 1.0, 1.0, 1
    spec = PotentialSpec.logarithmic(V0, a)
    E = energy_closed(spec, n)
    worst = 0.0
    for epsilon in np.geomspace(1e-3, 0.05, 10):
        F = float(epsilon) / ((n - 0.25) * math.sqrt(2.0 * math.pi))
        exact = action_oracle(spec, E, F, ctx.oracle_cfg).value
        improved = action_log_improved(V0, a, E, F).value
        leading = action_log_leading(V0, n, F).value
        worst = max(worst, abs(improved - exact) / abs(leading - exact))
    return _result("log_improvement_ordering", "log", worst, 1.0,
                   "largest |two-term - oracle| / |leading - oracle|", passed=worst < 1.0)


def check_quantization(ctx: ValidationContext) -> CriterionResult:
    worst = 0.0
    for spec in (PotentialSpec.power_law(1.0), PotentialSpec.power_law(0.5),
                 PotentialSpec.logarithmic(1.0, 1.0)):
        for n in range(1, 6):
            quantized = energy_quantize(spec, n, cfg=ctx.cfg)
            worst = max(worst, _relative(quantized, energy_closed(spec, n)))
    return _result("quantization_regression", "spectra", worst, ctx.tol(1e-8), "n = 1..5")


def _closure(spec: PotentialSpec, E: float, cfg: EvalConfig) -> float:
    state = BoundState(E=E, x_inner=unperturbed_turning_point(spec, E), A_sq=0.0)
    return normalization(spec, state) * normalization_integral(spec, E, cfg)


def check_normalization(ctx: ValidationContext) -> CriterionResult:
    power_laws = [
        (PotentialSpec.power_law(0.5), energy_closed(PotentialSpec.power_law(0.5), 1)),
        (PotentialSpec.power_law(1.0), -0.5),
        (PotentialSpec.power_law(1.5), -0.5),
    ]
    worst = max(abs(_closure(spec, E, ctx.cfg) - 1.0) for spec, E in power_laws)

    log_spec = PotentialSpec.logarithmic(1.0, 1.0)
    log_error = abs(_closure(log_spec, energy_closed(log_spec, 2), ctx.cfg) - 1.0)

    specialisations = []
    for n in (1, 2, 3):
        coulomb = PotentialSpec.power_law(1.0)
        E = energy_closed(coulomb, n)
        A_sq = normalization(coulomb, BoundState(E=E, x_inner=unperturbed_turning_point(coulomb, E), A_sq=0.0))
        specialisations.append(_relative(A_sq, 2.0 / (math.pi * n ** 3)))
        inv = PotentialSpec.power_law(0.5)
        E = energy_closed(inv, n)
        A_sq = normalization(inv, BoundState(E=E, x_inner=unperturbed_turning_point(inv, E), A_sq=0.0))
        specialisations.append(_relative(A_sq, 8.0 * math.sqrt(2.0) / (3.0 * math.pi) * abs(E) ** 2.5))
    special_error = max(specialisations)

    passed = (worst <= ctx.tol(1e-8) and log_error <= ctx.tol(1e-2)
              and special_error <= ctx.tol(1e-12))
    detail = f"log closure error {log_error:.3g}, specialisation error {special_error:.3g}"
    return _result("normalization_closure", "spectra", worst, ctx.tol(1e-8), detail, passed=passed)


def check_ac_average(ctx: ValidationContext) -> CriterionResult:
    E = -0.5
    worst = 0.0
    for K in (30.0, 60.0, 120.0):
        F = 2.0 * (2.0 * abs(E)) ** 1.5 / (3.0 * K)
        averaged = cycle_averaged_penetrability(static_exponent(E, F), ctx.cfg)
        saddle = ac_average_factor(E, F) * math.exp(-static_exponent(E, F))
        worst = max(worst, _relative(saddle, averaged))
    return _result("ac_saddle_point", "ac", worst, ctx.tol(0.05), "static exponent 30, 60, 120")


def check_roots(ctx: ValidationContext) -> CriterionResult:
    residual = 0.0
    mismatch = 0.0
    E = -0.5
    log_spec = PotentialSpec.logarithmic(1.0, 1.0)
    E_log = energy_closed(log_spec, 1)
    for epsilon in np.geomspace(1e-4, 0.05, 6):
        epsilon = float(epsilon)

        coulomb = coulomb_roots(epsilon, E)
        for z in coulomb.roots:
            residual = max(residual, abs(z - 1.0 - epsilon * z * z) / max(1.0, abs(z)))
        generic = generic_turning_points(PotentialSpec.power_law(1.0), E, epsilon * E ** 2)
        mismatch = max(mismatch, _relative(generic.x_left, coulomb.x_left),
                       _relative(generic.x_right, coulomb.x_right))

        cubic = cubic_roots_cardano(epsilon, E)
        for z in cubic.roots:
            residual = max(residual, abs(z - 1.0 - epsilon * z ** 3) / max(1.0, abs(z)))
        generic = generic_turning_points(PotentialSpec.power_law(0.5), E, epsilon * abs(E) ** 3)
        mismatch = max(mismatch, _relative(generic.x_left, cubic.x_left),
                       _relative(generic.x_right, cubic.x_right))

        F_log = epsilon / math.exp(E_log)
        lambert = log_turning_points(epsilon, 1.0, F_log)
        for z in lambert.roots:
            residual = max(residual, abs(z - epsilon * math.exp(z)) / max(1.0, abs(z)))
        generic = generic_turning_points(log_spec, E_log, F_log)
        mismatch = max(mismatch, _relative(generic.x_left, lambert.x_left),
                       _relative(generic.x_right, lambert.x_right))
        for x in (generic.x_left, generic.x_right):
            level_error = abs(float(potential_total(log_spec, F_log, x)) - E_log)
            residual = max(residual, level_error / max(1.0, abs(E_log)))

    passed = residual <= ctx.tol(1e-12) and mismatch <= ctx.tol(1e-10)
    return _result("root_residuals", "roots", mismatch, ctx.tol(1e-10),
                   f"largest scaled residual {residual:.3g}", passed=passed)


def check_rate_identity(ctx: ValidationContext) -> CriterionResult:
    worst = 0.0
    for n, F in ((1, 0.01), (2, 0.001)):
        epsilon = 4.0 * n ** 4 * F
        from_action = math.exp(action_coulomb_asymptotic(epsilon, n).value)
        closed = (4.0 / (n ** 4 * F)) ** (2 * n) * math.exp(-2.0 / (3.0 * n ** 3 * F) + 2.0 * n)
        worst = max(worst, _relative(from_action, closed))
    return _result("coulomb_rate_identity", "rates", worst, ctx.tol(1e-10))


CRITERIA: List[Criterion] = [
    Criterion("f_of_s_limit", "special", check_f_limit),
    Criterion("coulomb_exact_vs_oracle", "coulomb", check_coulomb_exact),
    Criterion("transposition_invariance", "coulomb", check_transposition),
    Criterion("coulomb_asymptotic_order", "coulomb", check_coulomb_asymptotic),
    Criterion("invsqrt_exact_vs_oracle", "invsqrt", check_invsqrt_exact),
    Criterion("invsqrt_remainder_bounded", "invsqrt", check_invsqrt_remainder),
    Criterion("log_improvement_ordering", "log", check_log_ordering),
    Criterion("quantization_regression", "spectra", check_quantization),
    Criterion("normalization_closure", "spectra", check_normalization),
    Criterion("ac_saddle_point", "ac", check_ac_average),
    Criterion("root_residuals", "roots", check_roots),
    Criterion("coulomb_rate_identity", "rates", check_rate_identity),
]

VALIDATION_GROUPS = sorted({criterion.group for criterion in CRITERIA})


def select_criteria(only: Optional[Sequence[str]] = None) -> List[Criterion]:
    """Criteria whose name or group appears in `only` (all when empty)"""
    if not only:
        return list(CRITERIA)
    wanted = set(only)
    known = {c.name for c in CRITERIA} | {c.group for c in CRITERIA}
    unknown = wanted - known
    if unknown:
        raise UsageError(f"unknown validation selector(s): {', '.join(sorted(unknown))}")
    return [c for c in CRITERIA if c.name in wanted or c.group in wanted]


def _run_one(criterion: Criterion, ctx: ValidationContext) -> CriterionResult:
    logger.info(f"Running criterion {criterion.name}")
    try:
        return criterion.check(ctx)
    except TunnelingError as e:
        logger.error(f"Criterion {criterion.name} raised: {e}", exc_info=True)
        return CriterionResult(name=criterion.name, group=criterion.group, passed=False,
                               measured=float("nan"), tolerance=float("nan"),
                               detail=f"{e.category}: {e}")


def run_validation(only: Optional[Sequence[str]] = None, tol_scale: float = 1.0,
                   cfg: Optional[EvalConfig] = None, oracle_cfg: Optional[EvalConfig] = None,
                   threads: int = 1) -> ValidationReport:
    """Run the selected criteria; results keep the registry order"""
    ctx = ValidationContext(cfg=cfg or EvalConfig(),
                            oracle_cfg=oracle_cfg or EvalConfig(rel_tol=1e-10),
                            tol_scale=tol_scale)
    selected = select_criteria(only)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(lambda criterion: _run_one(criterion, ctx), selected))
    report = ValidationReport(results)
    failed = [r.name for r in results if not r.passed]
    logger.info(f"Validation finished: {len(results) - len(failed)}/{len(results)} passed")
    if failed:
        logger.warning(f"Failed criteria: {', '.join(failed)}")
    return report
