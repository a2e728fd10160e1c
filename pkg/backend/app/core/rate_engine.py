from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence
import logging
import math

import numpy as np
from pydantic import ValidationError

from app.config import Settings, get_eval_config, get_oracle_config, get_settings, get_validity_limits
from app.core.figures import build_figure
from app.core.rates import rate_log, rate_power_law, reference_rates
from app.core.validation import run_validation
from app.exceptions import DomainError, TunnelingError, UsageError
from app.models.schemas import (
    SCAN_COLUMNS,
    FigureResponse,
    Method,
    PotentialKind,
    PotentialSpec,
    RateRequest,
    RateResult,
    ReferenceKind,
    ScanRequest,
    ScanResponse,
    ValidationReport,
)
from app.services.spectra import bound_state, energy_quantize

logger = logging.getLogger(__name__)

class RateEngine:
    """Main orchestrator for rate evaluation, scans, figures and validation"""

    def __init__(self, settings: Optional[Settings] = None):
        settings = settings or get_settings()
        self.cfg = get_eval_config(settings)
        self.oracle_cfg = get_oracle_config(settings)
        self.limits = get_validity_limits(settings)
        self.threads = max(1, settings.TUNNEL_WKB_THREADS)

    def _spec(self, request: RateRequest) -> PotentialSpec:
        try:
            return request.potential_spec()
        except ValidationError as e:
            raise DomainError(f"invalid potential parameters: {e.errors()[0]['msg']}") from e

    def _log_level(self, spec: PotentialSpec, request: RateRequest) -> float:
        """Quantum number for the logarithmic well, fractional when given through E"""
        if request.mu is not None:
            if request.n is None:
                raise UsageError("a Maslov index needs a quantum number")
            energy = energy_quantize(spec, request.n, request.mu, self.cfg)
        elif request.E is not None:
            energy = request.E
        elif request.n is not None:
            return float(request.n)
        else:
            raise UsageError("a logarithmic rate needs n or E")
        return spec.a * math.exp(energy / spec.V0) / math.sqrt(2.0 * math.pi / spec.V0) + 0.25

    def compute_rate(self, request: RateRequest) -> RateResult:
        """Evaluate one rate from a request"""
        if request.F is None:
            raise UsageError("a rate needs a field strength F")
        spec = self._spec(request)
        field = request.field_spec()
        logger.info(f"Computing {spec.kind.value} rate at F={field.F} ({field.mode.value})")

        if spec.is_power_law:
            if request.E is not None:
                energy = request.E
            elif request.n is not None:
                energy = bound_state(spec, n=request.n, mu=request.mu, cfg=self.cfg).E
            else:
                raise UsageError("a power-law rate needs n or E")
            return rate_power_law(spec.s, energy, field.F, request.method, n=request.n,
                                  order=request.order, field_mode=field.mode,
                                  cfg=self.cfg, oracle_cfg=self.oracle_cfg, limits=self.limits)

        level = self._log_level(spec, request)
        return rate_log(spec.V0, spec.a, level, field.F, request.method or Method.ORACLE,
                        order=request.order, field_mode=field.mode,
                        oracle_cfg=self.oracle_cfg, limits=self.limits)

    def reference_rate(self, kind: ReferenceKind, F: float, kappa: float = 1.0) -> RateResult:
        """Literature rate for comparison with the one-dimensional results"""
        logger.info(f"Computing {kind.value} reference rate at F={F}")
        return reference_rates(kind, F, kappa, threshold=self.limits.weak_field_threshold)

    def _scan_row(self, request: ScanRequest, F: float) -> Dict[str, Any]:
        point = RateRequest(**request.model_dump(include=set(RateRequest.model_fields)) | {"F": F})
        try:
            record = self.compute_rate(point).to_record()
            record["error"] = ""
            return record
        except TunnelingError as e:
            logger.error(f"Scan point F={F} failed: {e}")
            row: Dict[str, Any] = {column: None for column in SCAN_COLUMNS}
            row.update({
                "potential": request.potential.value,
                "s": request.s if request.potential is PotentialKind.POWER_LAW else None,
                "n": request.n,
                "E": request.E,
                "F": F,
                "error": f"{e.category}: {e}",
            })
            return row

    def scan(self, request: ScanRequest) -> ScanResponse:
        """Rates on a log-spaced field grid; failing points keep their row"""
        if request.F_min > request.F_max:
            raise UsageError(f"F_min {request.F_min} exceeds F_max {request.F_max}")
        fields = [float(F) for F in np.geomspace(request.F_min, request.F_max, request.count)]
        logger.info(f"Scanning {len(fields)} field values on {self.threads} thread(s)")
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            rows: List[Dict[str, Any]] = list(pool.map(lambda F: self._scan_row(request, F), fields))
        failed = sum(1 for row in rows if row["error"])
        if failed:
            logger.warning(f"{failed} of {len(rows)} scan points failed")
        return ScanResponse(rows=rows, count=len(rows))

    def figure(self, figure_id: str) -> FigureResponse:
        return build_figure(figure_id, self.cfg, self.oracle_cfg)

    def validate(self, only: Optional[Sequence[str]] = None, tol_scale: float = 1.0) -> ValidationReport:
        return run_validation(only, tol_scale, self.cfg, self.oracle_cfg, self.threads)
