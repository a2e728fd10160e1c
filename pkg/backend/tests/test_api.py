import pytest
from fastapi.testclient import TestClient

from app.core.barrier import action_coulomb_exact
from app.main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["message"] == "Tunnel-WKB API"
    assert "X-Process-Time" in response.headers


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"
    assert client.head("/health").status_code == 200


def test_rate(client):
    response = client.post("/api/rates", json={"s": 1.0, "n": 1, "F": 0.01})
    assert response.status_code == 200
    record = response.json()
    assert record["exponent"] == action_coulomb_exact(0.04, -0.5).value
    assert record["method"] == "exact"
    assert client.get("/health").json()["services"]["rate_engine"] is True


def test_rate_domain_error(client):
    response = client.post("/api/rates", json={"potential": "log", "n": 1, "F": 0.5})
    assert response.status_code == 422
    body = response.json()
    assert body["error"] == "domain"
    assert body["message"]


def test_rate_request_validation(client):
    response = client.post("/api/rates", json={"s": 1.0, "n": 0, "F": 0.01})
    assert response.status_code == 422
    assert "detail" in response.json()


def test_scan(client):
    payload = {"s": 1.0, "n": 1, "F_min": 1e-4, "F_max": 1e-2, "count": 5}
    response = client.post("/api/rates/scan", json=payload)
    assert response.status_code == 200
    body = response.json()
    assert body["count"] == 5
    assert all(row["error"] == "" for row in body["rows"])


def test_figure(client):
    response = client.get("/api/figures/fig1")
    assert response.status_code == 200
    body = response.json()
    assert body["columns"] == ["x", "V", "label"]
    labels = [row["label"] for row in body["rows"] if row["label"]]
    assert labels == ["x_L", "x_R"]


def test_unknown_figure(client):
    response = client.get("/api/figures/fig9")
    assert response.status_code == 422
    assert response.json()["error"] == "usage"


def test_reference_rate(client):
    response = client.get("/api/reference-rates/hydrogen1s", params={"F": 0.01})
    assert response.status_code == 200
    record = response.json()
    assert record["potential"] == "hydrogen1s"
    assert record["prefactor"] == pytest.approx(400.0)
    assert record["exponent"] == pytest.approx(-2.0 / 0.03)
    assert record["validity_flags"] == ""


def test_reference_rate_flags_strong_fields(client):
    response = client.get("/api/reference-rates/short_range_well", params={"F": 0.5, "kappa": 1.0})
    assert response.status_code == 200
    assert "reference_precondition" in response.json()["validity_flags"].split(";")


def test_unknown_reference_kind(client):
    response = client.get("/api/reference-rates/helium", params={"F": 0.01})
    assert response.status_code == 422
