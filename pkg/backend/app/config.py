from typing import Optional

from pydantic_settings import BaseSettings

from app.models.schemas import EvalConfig, ValidityLimits

class Settings(BaseSettings):
    """Application configuration"""

    # Parallelism for scans and validation criteria
    TUNNEL_WKB_THREADS: int = 4

    LOG_LEVEL: str = "INFO"

    # Numerical accuracy
    SPECIAL_REL_TOL: float = 1e-12
    ORACLE_REL_TOL: float = 1e-10
    MAX_SERIES_TERMS: int = 10_000
    QUAD_LEVELS: int = 12

    # Validity heuristics
    WEAK_FIELD_THRESHOLD: float = 0.1
    APPLICABILITY_MARGIN: float = 1.0
    AC_EXPONENT_WARNING: float = 10.0

    DEFAULT_OUTPUT_FORMAT: str = "csv"

    model_config = {
        "env_file": ".env",
        "extra": "ignore",
    }

def get_settings() -> Settings:
    """Get application settings"""
    return Settings()

def get_eval_config(settings: Optional[Settings] = None) -> EvalConfig:
    """Accuracy controls for special functions"""
    settings = settings or get_settings()
    return EvalConfig(
        rel_tol=settings.SPECIAL_REL_TOL,
        max_terms=settings.MAX_SERIES_TERMS,
        quad_levels=settings.QUAD_LEVELS
    )

def get_oracle_config(settings: Optional[Settings] = None) -> EvalConfig:
    """Accuracy controls for the quadrature oracle"""
    settings = settings or get_settings()
    return EvalConfig(
        rel_tol=settings.ORACLE_REL_TOL,
        max_terms=settings.MAX_SERIES_TERMS,
        quad_levels=settings.QUAD_LEVELS
    )

def get_validity_limits(settings: Optional[Settings] = None) -> ValidityLimits:
    """Validity heuristics shared by the rate formulas"""
    settings = settings or get_settings()
    return ValidityLimits(
        weak_field_threshold=settings.WEAK_FIELD_THRESHOLD,
        applicability_margin=settings.APPLICABILITY_MARGIN,
        ac_exponent_warning=settings.AC_EXPONENT_WARNING
    )
