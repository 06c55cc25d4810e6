import math

import pytest
from fastapi.testclient import TestClient

from app.main import app

client = TestClient(app)

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"
    assert r.headers["X-Request-ID"]


def test_request_id_echoed():
    r = client.get("/health", headers={"X-Request-ID": "abc123"})
    assert r.headers["X-Request-ID"] == "abc123"


def test_eval_square_center():
    r = client.post("/eval", json={"vertices": SQUARE, "point": [0.5, 0.5], "grad": True})
    assert r.status_code == 200
    body = r.json()
    assert body["coords"] == pytest.approx([0.25] * 4)
    assert body["grads"][2] == pytest.approx([0.5, 0.5])


def test_eval_cot_form_clockwise_input():
    r = client.post("/eval", json={"vertices": SQUARE[::-1], "point": [0.2, 0.7], "form": "cot"})
    assert r.status_code == 200
    assert sum(r.json()["coords"]) == pytest.approx(1.0)
    assert r.json()["grads"] is None


@pytest.mark.parametrize("payload, kind", [
    ({"vertices": SQUARE, "point": [2, 2]}, "OutsidePolygon"),
    ({"vertices": SQUARE, "point": [1, 0.5], "form": "cot"}, "BoundaryPoint"),
    ({"vertices": [[0, 0], [1, 0]], "point": [0.5, 0]}, "TooFewVertices"),
    ({"vertices": [[0, 0], [2, 0], [1, 0.1], [1, 2], [0, 2]], "point": [0.5, 1]}, "NonConvex"),
])
def test_eval_rejections(payload, kind):
    r = client.post("/eval", json=payload)
    assert r.status_code == 422
    assert r.json()["detail"]["error"] == kind


def test_eval_schema_rejection():
    r = client.post("/eval", json={"vertices": SQUARE, "point": [0.5, 0.5], "form": "harmonic"})
    assert r.status_code == 422


def test_quality_report_only():
    r = client.post("/quality", json={"vertices": SQUARE})
    assert r.status_code == 200
    body = r.json()
    assert body["verdict"] is None
    assert body["report"]["rho"] == pytest.approx(1.0, rel=1e-9)
    assert body["report"]["angles"] == pytest.approx([math.pi / 2] * 4)


def test_quality_verdict():
    th = {"sigma_max": 1.2, "d_m_min": 0.5, "psi_m_min": 1.0, "psi_M_max": 2.0}
    r = client.post("/quality", json={"vertices": SQUARE, "thresholds": th})
    assert r.status_code == 200
    assert r.json()["verdict"]["barp_holds"] is False
    assert r.json()["verdict"]["MAC_holds"] is True


def test_quality_bad_threshold():
    th = {"sigma_max": 2, "d_m_min": 0.5, "psi_m_min": 1.0, "psi_M_max": 3.5}
    r = client.post("/quality", json={"vertices": SQUARE, "thresholds": th})
    assert r.status_code == 422
    assert r.json()["detail"]["error"] == "InvalidThreshold"
