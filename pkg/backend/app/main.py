from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from typing import Dict, Optional
import logging
import time

from app.config import get_settings
from app.core.rate_engine import RateEngine
from app.exceptions import TunnelingError
from app.api import rate_routes

# Configure logging
logging.basicConfig(
    level=get_settings().LOG_LEVEL.upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)

# Initialize FastAPI app
app = FastAPI(
    title="Tunnel-WKB",
    description="WKB tunnel-ionization rates for power-law and logarithmic wells",
    version="1.0.0"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Populated lazily on first use
services: Dict[str, Optional[RateEngine]] = {
    "rate_engine": None
}

def initialize_services() -> bool:
    """Build the rate engine from the current settings"""
    try:
        logger.info("Initializing rate engine...")
        services["rate_engine"] = RateEngine(get_settings())
        logger.info("Rate engine initialized successfully")
        return True
    except Exception as e:
        logger.error(f"Failed to initialize services: {str(e)}", exc_info=True)
        return False

# Dependency providers
def get_rate_engine() -> RateEngine:
    """Dependency provider for RateEngine"""
    engine = services.get("rate_engine")
    if engine is None and initialize_services():
        engine = services["rate_engine"]
    if engine is None:
        raise RuntimeError("Rate engine not initialized")
    return engine

app.dependency_overrides[rate_routes.get_rate_engine] = get_rate_engine

app.include_router(rate_routes.router)

@app.exception_handler(TunnelingError)
async def tunneling_error_handler(request: Request, exc: TunnelingError) -> JSONResponse:
    logger.warning(f"{exc.category} error on {request.url.path}: {exc}")
    return JSONResponse(
        status_code=422,
        content={"error": exc.category, "message": str(exc)}
    )

@app.middleware("http")
async def add_process_time_header(request: Request, call_next):  # type: ignore[no-untyped-def]
    start_time = time.time()
    response = await call_next(request)
    process_time = time.time() - start_time
    response.headers["X-Process-Time"] = str(process_time)
    logger.info(f"Request to {request.url.path} processed in {process_time:.4f} seconds")
    return response

@app.get("/")
async def root() -> Dict[str, str]:
    """Root endpoint for the API"""
    return {
        "message": "Tunnel-WKB API",
        "version": "1.0.0",
        "documentation": "/docs"
    }

@app.get("/health")
@app.head("/health")
async def health_check() -> Dict[str, object]:
    """Liveness probe - supports both GET and HEAD methods"""
    return {
        "status": "healthy",
        "services": {
            "rate_engine": services["rate_engine"] is not None
        }
    }

if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host="0.0.0.0", port=8000)
