from fastapi import APIRouter, HTTPException, Query, status, Depends
from typing import Any, Dict
import logging

from app.models.schemas import FigureResponse, RateRequest, ReferenceKind, ScanRequest, ScanResponse
from app.core.rate_engine import RateEngine
from app.exceptions import TunnelingError

router = APIRouter(prefix="/api", tags=["rates"])
logger = logging.getLogger(__name__)

# This function is replaced during FastAPI initialization via dependency_overrides
def get_rate_engine() -> RateEngine:
    """Dependency to get rate engine instance"""
    logger.error("Default get_rate_engine called - this should be overridden!")
    raise RuntimeError("Rate engine dependency not properly configured")

@router.post("/rates")
def compute_rate(
    request: RateRequest,
    engine: RateEngine = Depends(get_rate_engine)
) -> Dict[str, Any]:
    """Evaluate a single tunneling rate"""
    try:
        return engine.compute_rate(request).to_record()
    except TunnelingError:
        raise
    except Exception as e:
        logger.error(f"Error computing rate: {str(e)}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Error computing rate: {str(e)}"
        )

@router.post("/rates/scan", response_model=ScanResponse)
def scan_rates(
    request: ScanRequest,
    engine: RateEngine = Depends(get_rate_engine)
) -> ScanResponse:
    """Rates over a log-spaced field range"""
    try:
        return engine.scan(request)
    except TunnelingError:
        raise
    except Exception as e:
        logger.error(f"Error scanning rates: {str(e)}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Error scanning rates: {str(e)}"
        )

@router.get("/figures/{figure_id}", response_model=FigureResponse)
def get_figure(
    figure_id: str,
    engine: RateEngine = Depends(get_rate_engine)
) -> FigureResponse:
    """Data series behind one of the figures"""
    try:
        return engine.figure(figure_id)
    except TunnelingError:
        raise
    except Exception as e:
        logger.error(f"Error building figure {figure_id}: {str(e)}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Error building figure: {str(e)}"
        )

@router.get("/reference-rates/{kind}")
def get_reference_rate(
    kind: ReferenceKind,
    F: float = Query(..., gt=0),
    kappa: float = Query(1.0, gt=0),
    engine: RateEngine = Depends(get_rate_engine)
) -> Dict[str, Any]:
    """Hydrogen 1s or short-range-well rate at the same field"""
    try:
        return engine.reference_rate(kind, F, kappa).to_record()
    except TunnelingError:
        raise
    except Exception as e:
        logger.error(f"Error computing {kind.value} reference rate: {str(e)}", exc_info=True)
        raise HTTPException(
            status_code=status.HTTP_500_INTERNAL_SERVER_ERROR,
            detail=f"Error computing reference rate: {str(e)}"
        )
