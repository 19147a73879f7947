"""HTTP service endpoints."""
import warnings

import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    from fastapi.testclient import TestClient

from qfracflow.service import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app, raise_server_exceptions=False)


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert "sso-sweep" in body["experiments"]


def test_validate_endpoint_accepts_good_config(client):
    response = client.post(
        "/config/validate", json={"experiment": "sso-sweep", "n": 4}
    )
    assert response.status_code == 200
    assert response.json() == {"valid": True, "diagnostics": []}


def test_validate_endpoint_reports_diagnostics(client):
    response = client.post(
        "/config/validate",
        json={"experiment": "sso-sweep", "trials": 0, "q_grid": [0, 10]},
    )
    body = response.json()
    assert body["valid"] is False
    assert any("trials" in d for d in body["diagnostics"])
    assert any("q_grid" in d for d in body["diagnostics"])


def test_run_endpoint_rejects_invalid_config(client):
    response = client.post("/experiments/run", json={"experiment": "bogus"})
    assert response.status_code == 422


def test_run_endpoint_returns_artifacts(client):
    response = client.post(
        "/experiments/run",
        json={"experiment": "sso-sweep", "n": 4, "q_grid": [10, 100], "trials": 5},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["ok"] is True
    assert "sso_sweep.csv" in body["artifacts"]
    assert body["manifest"]["experiment"] == "sso-sweep"
    assert set(body["checks"]) == {
        "mean_error_strictly_decreasing",
        "min_le_mean_le_max",
    }
