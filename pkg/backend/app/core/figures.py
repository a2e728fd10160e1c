"""
Data behind the three figures: the Coulomb barrier with its turning
points, the f(s) curve, and the logarithmic actions normalized to the
quadrature value. Only data is produced; plotting is left to the caller.
"""
import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from app.core.barrier import action_log_improved, action_log_leading, action_oracle, f_of_s
from app.exceptions import UsageError
from app.models.schemas import FIGURE_IDS, EvalConfig, FigureResponse, PotentialSpec
from app.services.potentials import potential_total
from app.services.spectra import energy_closed
from app.services.turning_points import coulomb_roots

logger = logging.getLogger(__name__)


def potential_curve(F: float = 0.01, E: float = -0.5, x_min: float = 0.2,
                    x_max: float = 120.0, count: int = 600) -> FigureResponse:
    """Samples of -1/x - F*x plus the two turning-point rows at level E"""
    spec = PotentialSpec.power_law(1.0)
    xs = np.linspace(x_min, x_max, count)
    values = potential_total(spec, F, xs)
    rows: List[Dict[str, Any]] = [
        {"x": float(x), "V": float(v), "label": ""} for x, v in zip(xs, values)
    ]
    roots = coulomb_roots(F / E ** 2, E)
    for label, x in (("x_L", roots.x_left), ("x_R", roots.x_right)):
        rows.append({"x": x, "V": float(potential_total(spec, F, x)), "label": label})
    return FigureResponse(figure="fig1", columns=["x", "V", "label"], rows=rows)


def f_curve(count: int = 100, cfg: Optional[EvalConfig] = None) -> FigureResponse:
    """f(s) on (1, 2] with the s = 2 limit as a constant column"""
    limit = math.pi / 2.0 - 1.0
    rows = [
        {"s": float(s), "f": f_of_s(float(s), cfg), "f_limit": limit}
        for s in np.linspace(1.0, 2.0, count + 1)[1:]
    ]
    return FigureResponse(figure="fig2", columns=["s", "f", "f_limit"], rows=rows)


def log_action_ratios(eps_min: float = 1e-3, eps_max: float = 0.05, count: int = 10,
                      V0: float = 1.0, a: float = 1.0, n: int = 1,
                      oracle_cfg: Optional[EvalConfig] = None) -> FigureResponse:
    """Two-term and leading logarithmic actions divided by the oracle action"""
    spec = PotentialSpec.logarithmic(V0, a)
    E = energy_closed(spec, n)
    rows = []
    for epsilon in np.geomspace(eps_min, eps_max, count):
        F = float(epsilon) * V0 ** 1.5 / ((n - 0.25) * math.sqrt(2.0 * math.pi))
        exact = action_oracle(spec, E, F, oracle_cfg).value
        improved = action_log_improved(V0, a, E, F).value
        leading = action_log_leading(V0, n, F).value
        rows.append({
            "epsilon": float(epsilon),
            "improved_ratio": improved / exact,
            "leading_ratio": leading / exact,
            "exact_ratio": 1.0,
        })
    return FigureResponse(figure="fig3",
                          columns=["epsilon", "improved_ratio", "leading_ratio", "exact_ratio"],
                          rows=rows)


def build_figure(figure_id: str, cfg: Optional[EvalConfig] = None,
                 oracle_cfg: Optional[EvalConfig] = None) -> FigureResponse:
    if figure_id not in FIGURE_IDS:
        raise UsageError(f"unknown figure '{figure_id}', expected one of {', '.join(FIGURE_IDS)}")
    logger.info(f"Generating data for {figure_id}")
    if figure_id == "fig1":
        return potential_curve()
    if figure_id == "fig2":
        return f_curve(cfg=cfg)
    return log_action_ratios(oracle_cfg=oracle_cfg)
