import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

# ============================================================================
# ENUMERATIONS
# ============================================================================

class PotentialKind(Enum):
    POWER_LAW = "powerlaw"
    LOGARITHMIC = "log"

class FieldMode(Enum):
    STATIC = "static"
    LOW_FREQUENCY_AC = "ac"

class Method(Enum):
    """Provenance of an action exponent"""
    ORACLE = "oracle"
    EXACT = "exact"
    ASYMPTOTIC = "asymptotic"

class ScaledCase(Enum):
    COULOMB = "coulomb"
    INV_SQRT = "invsqrt"
    LOG = "log"
    GENERIC = "generic"

class ReferenceKind(Enum):
    HYDROGEN_1S = "hydrogen1s"
    SHORT_RANGE_WELL = "short_range_well"

class Command(Enum):
    RATE = "rate"
    SCAN = "scan"
    FIGURE = "figure"
    VALIDATE = "validate"

class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"

FIGURE_IDS = ("fig1", "fig2", "fig3")
# w below the smallest positive double; log_w still carries the rate
FLAG_W_UNDERFLOW = "w_underflow"

RECORD_COLUMNS = (
    "potential", "s", "n", "E", "F", "epsilon", "prefactor", "exponent",
    "w", "log_w", "ac_factor", "method", "order", "validity_flags",
)
SCAN_COLUMNS = RECORD_COLUMNS + ("error",)

# ============================================================================
# CONFIGURATION MODELS
# ============================================================================

class EvalConfig(BaseModel):
    """Accuracy controls shared by series, quadrature and root searches"""
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default=1e-12, gt=0)
    max_terms: int = Field(default=10_000, ge=1)
    quad_levels: int = Field(default=12, ge=1)

    def scaled(self, factor: float) -> "EvalConfig":
        """Same limits with the tolerance multiplied by factor"""
        return self.model_copy(update={"rel_tol": self.rel_tol * factor})

class ValidityLimits(BaseModel):
    """Thresholds for the heuristic validity checks attached to rates"""
    model_config = ConfigDict(frozen=True)

    weak_field_threshold: float = Field(default=0.1, gt=0)
    applicability_margin: float = Field(default=1.0, gt=0)
    ac_exponent_warning: float = Field(default=10.0, ge=0)

class PotentialSpec(BaseModel):
    """Confining potential: -1/x^s (units V0 = 1) or V0*ln(x/a)"""
    model_config = ConfigDict(frozen=True)

    kind: PotentialKind
    s: Optional[float] = None
    V0: float = 1.0
    a: Optional[float] = None

    @model_validator(mode="after")
    def _check_parameters(self) -> "PotentialSpec":
        if self.kind is PotentialKind.POWER_LAW:
            if self.s is None or not 0.0 < self.s < 2.0:
                # s = 2 is excluded: the particle falls to the origin
                raise ValueError(f"power-law exponent must satisfy 0 < s < 2, got {self.s}")
            if self.V0 != 1.0:
                raise ValueError("power-law potentials use the unit convention V0 = 1")
        else:
            if self.V0 <= 0.0:
                raise ValueError(f"logarithmic depth V0 must be positive, got {self.V0}")
            if self.a is None or self.a <= 0.0:
                raise ValueError(f"logarithmic scale a must be positive, got {self.a}")
        return self

    @classmethod
    def power_law(cls, s: float) -> "PotentialSpec":
        return cls(kind=PotentialKind.POWER_LAW, s=s)

    @classmethod
    def logarithmic(cls, V0: float = 1.0, a: float = 1.0) -> "PotentialSpec":
        return cls(kind=PotentialKind.LOGARITHMIC, V0=V0, a=a)

    @property
    def is_power_law(self) -> bool:
        return self.kind is PotentialKind.POWER_LAW

    @property
    def is_coulomb(self) -> bool:
        return self.is_power_law and math.isclose(self.s, 1.0, rel_tol=1e-12)

    @property
    def is_inverse_sqrt(self) -> bool:
        return self.is_power_law and math.isclose(self.s, 0.5, rel_tol=1e-12)

class FieldSpec(BaseModel):
    """External field; in AC mode F is the peak amplitude"""
    model_config = ConfigDict(frozen=True)

    F: float = Field(ge=0)
    mode: FieldMode = FieldMode.STATIC

# ============================================================================
# DATA MODELS
# ============================================================================

@dataclass(frozen=True)
class BoundState:
    """WKB bound state of the unperturbed potential"""
    E: float
    x_inner: float
    A_sq: float
    n: Optional[int] = None
    mu: Optional[float] = None

@dataclass(frozen=True)
class WeakFieldCheck:
    """Smallness of F against the level depth, F/|E|^(1+1/s)"""
    ratio: float
    valid: bool

@dataclass(frozen=True)
class ScaledField:
    """Dimensionless field strength governing one of the special cases"""
    case: ScaledCase
    epsilon: float

@dataclass(frozen=True)
class RootSet:
    """Turning points: z-space roots plus physical barrier edges"""
    case: ScaledCase
    roots: Tuple[float, ...]
    x_left: Optional[float] = None
    x_right: Optional[float] = None

@dataclass(frozen=True)
class ActionResult:
    """Barrier action exponent -2*int |p| dx and how it was obtained"""
    value: float
    method: Method
    epsilon: Optional[float] = None
    order: Optional[int] = None
    terms: Dict[str, float] = field(default_factory=dict)

@dataclass(frozen=True)
class RateResult:
    """Ionization probability per unit time, w = prefactor*exp(exponent)*ac"""
    potential: str
    F: float
    E: float
    prefactor: float
    exponent: float
    method: Method
    w: float
    log_w: float
    s: Optional[float] = None
    # fractional for logarithmic levels given through their energy
    n: Optional[float] = None
    epsilon: Optional[float] = None
    ac_factor: Optional[float] = None
    order: Optional[int] = None
    validity_flags: List[str] = field(default_factory=list)

    @classmethod
    def assemble(cls, *, prefactor: float, exponent: float,
                 ac_factor: Optional[float] = None, **kwargs: Any) -> "RateResult":
        """Build a result whose w is recomputable from its own fields"""
        w = prefactor * math.exp(exponent) * (ac_factor if ac_factor is not None else 1.0)
        log_w = math.log(prefactor) + exponent
        if ac_factor is not None:
            log_w += math.log(ac_factor)
        if w == 0.0:
            logger.warning(f"rate underflows double precision, log_w = {log_w:.6g}")
            flags = list(kwargs.pop("validity_flags", None) or [])
            kwargs["validity_flags"] = flags + [FLAG_W_UNDERFLOW]
        return cls(prefactor=prefactor, exponent=exponent, ac_factor=ac_factor,
                   w=w, log_w=log_w, **kwargs)

    def to_record(self) -> Dict[str, Any]:
        """Flat record with the stable output keys"""
        return {
            "potential": self.potential,
            "s": self.s,
            "n": self.n,
            "E": self.E,
            "F": self.F,
            "epsilon": self.epsilon,
            "prefactor": self.prefactor,
            "exponent": self.exponent,
            "w": self.w,
            "log_w": self.log_w,
            "ac_factor": self.ac_factor,
            "method": self.method.value,
            "order": self.order,
            "validity_flags": ";".join(self.validity_flags),
        }

@dataclass(frozen=True)
class CriterionResult:
    """Outcome of one acceptance criterion"""
    name: str
    group: str
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

@dataclass
class ValidationReport:
    results: List[CriterionResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

# ============================================================================
# REQUEST/RESPONSE MODELS
# ============================================================================

class RateRequest(BaseModel):
    """Single-point rate request"""
    potential: PotentialKind = PotentialKind.POWER_LAW
    s: Optional[float] = None
    V0: float = 1.0
    a: float = 1.0
    n: Optional[int] = Field(default=None, ge=1)
    mu: Optional[float] = None
    E: Optional[float] = None
    F: Optional[float] = Field(default=None, gt=0)
    method: Optional[Method] = None
    order: Optional[int] = Field(default=None, ge=1, le=3)
    field_mode: FieldMode = FieldMode.STATIC

    def potential_spec(self) -> PotentialSpec:
        if self.potential is PotentialKind.POWER_LAW:
            return PotentialSpec.power_law(self.s if self.s is not None else 1.0)
        return PotentialSpec.logarithmic(self.V0, self.a)

    def field_spec(self) -> FieldSpec:
        if self.F is None:
            raise ValueError("no field strength given")
        return FieldSpec(F=self.F, mode=self.field_mode)

class ScanRequest(RateRequest):
    """Log-spaced sweep over the field strength"""
    F_min: float = Field(gt=0)
    F_max: float = Field(gt=0)
    count: int = Field(default=10, ge=2)

class RunConfig(RateRequest):
    """Everything one CLI invocation needs"""
    command: Command
    F_min: Optional[float] = Field(default=None, gt=0)
    F_max: Optional[float] = Field(default=None, gt=0)
    count: int = 10
    figure: Optional[str] = None
    only: Optional[List[str]] = None
    tol_scale: float = Field(default=1.0, gt=0)
    output_format: OutputFormat = OutputFormat.CSV
    output: Optional[str] = None

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.command is Command.RATE and self.F is None:
            raise ValueError("rate requires a field strength F")
        if self.command is Command.SCAN:
            if self.F_min is None or self.F_max is None:
                raise ValueError("scan requires F_min and F_max")
            if self.count < 2:
                raise ValueError("scan requires at least 2 points")
        if self.command is Command.FIGURE and self.figure not in FIGURE_IDS:
            raise ValueError(f"figure id must be one of {', '.join(FIGURE_IDS)}")
        return self

    def scan_request(self) -> ScanRequest:
        return ScanRequest(**self.model_dump(include=set(ScanRequest.model_fields)))

class ScanResponse(BaseModel):
    rows: List[Dict[str, Any]]
    count: int

class FigureResponse(BaseModel):
    figure: str
    columns: List[str]
    rows: List[Dict[str, Any]]
