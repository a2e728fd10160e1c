import pytest

from app.models.schemas import EvalConfig


@pytest.fixture
def cfg() -> EvalConfig:
    return EvalConfig()


@pytest.fixture
def oracle_cfg() -> EvalConfig:
    return EvalConfig(rel_tol=1e-10)
