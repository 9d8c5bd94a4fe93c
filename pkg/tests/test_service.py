import json

import pytest
from fastapi.testclient import TestClient

from roentgen.service import ServiceConfig, create_app

from conftest import write_pgm


@pytest.fixture()
def service(zero_model_path, tmp_path):
    metrics = tmp_path / "metrics.jsonl"
    metrics.write_text(
        '{"epoch": 1, "loss": 0.7, "accuracy": 0.5}\n'
        '{"epoch": 2, "loss": 0.6, "accuracy": 0.7}\n'
        '{"epoch": 3, "loss": 0.5, "accuracy": 0.9}\n'
    )
    config = ServiceConfig(
        model_path=str(zero_model_path),
        upload_limit=64 * 1024,
        storage_dir=str(tmp_path / "storage"),
        metrics_path=str(metrics),
    )
    app = create_app(config)
    with TestClient(app) as client:
        yield client, app, config


def pgm_bytes(tmp_path, value=128):
    path = tmp_path / "probe.pgm"
    write_pgm(path, 32, value)
    return path.read_bytes()


def test_health_ok_and_uptime_monotone(service, zero_model_path):
    client, app, _ = service
    first = client.get("/health").json()
    second = client.get("/health").json()
    assert first["status"] == "ok"
    assert first["model_fingerprint"] == app.state.kb.fingerprint()
    assert second["uptime"] >= first["uptime"] >= 0.0


def test_diagnose_zero_model_scores_half_pneumonic(service, tmp_path):
    client, _, _ = service
    response = client.post("/api/diagnose", content=pgm_bytes(tmp_path))
    assert response.status_code == 200
    body = response.json()
    assert body["score"] == 0.5
    assert body["threshold"] == 0.5
    assert body["label"] == "pneumonic"  # 0.5 >= 0.5 reads positive
    assert body["id"]


def test_diagnose_twice_same_score_distinct_ids(service, tmp_path):
    client, _, _ = service
    payload = pgm_bytes(tmp_path, value=99)
    a = client.post("/api/diagnose", content=payload).json()
    b = client.post("/api/diagnose", content=payload).json()
    assert a["score"] == b["score"]
    assert a["id"] != b["id"]


def test_diagnose_rejects_garbage(service):
    client, _, _ = service
    response = client.post("/api/diagnose", content=b"\x00\x01\x02\x03")
    assert response.status_code == 400


def test_diagnose_rejects_oversize(service):
    client, _, config = service
    blob = b"P5\n" + b"\xff" * (config.upload_limit + 16)
    response = client.post("/api/diagnose", content=blob)
    assert response.status_code == 413


def test_diagnose_503_when_model_missing(service, tmp_path):
    client, app, _ = service
    kb = app.state.kb
    app.state.kb = None
    try:
        response = client.post("/api/diagnose", content=pgm_bytes(tmp_path))
        assert response.status_code == 503
    finally:
        app.state.kb = kb


def test_report_roundtrip(service, tmp_path):
    client, _, _ = service
    posted = client.post("/api/diagnose", content=pgm_bytes(tmp_path)).json()
    fetched = client.get(f"/api/report/{posted['id']}")
    assert fetched.status_code == 200
    assert fetched.json() == posted


def test_report_unknown_id_404(service):
    client, _, _ = service
    assert client.get("/api/report/deadbeef").status_code == 404
    assert client.get("/api/report/../../etc/passwd").status_code == 404


def test_report_printable_html(service, tmp_path):
    client, _, _ = service
    posted = client.post("/api/diagnose", content=pgm_bytes(tmp_path)).json()
    page = client.get(f"/api/report/{posted['id']}/html")
    assert page.status_code == 200
    assert posted["id"] in page.text
    assert "medical supervision" in page.text


def test_metrics_passthrough(service):
    client, _, _ = service
    response = client.get("/api/metrics")
    lines = [l for l in response.text.splitlines() if l.strip()]
    assert len(lines) == 3
    assert json.loads(lines[0])["epoch"] == 1


def test_metrics_absent_file_yields_empty_stream(zero_model_path, tmp_path):
    config = ServiceConfig(
        model_path=str(zero_model_path), storage_dir=str(tmp_path / "s"), metrics_path=None
    )
    app = create_app(config)
    with TestClient(app) as client:
        assert client.get("/api/metrics").text == ""


def test_fingerprint_constant_across_requests(service, tmp_path):
    client, _, _ = service
    before = client.get("/health").json()["model_fingerprint"]
    for _ in range(3):
        client.post("/api/diagnose", content=pgm_bytes(tmp_path))
    after = client.get("/health").json()["model_fingerprint"]
    assert before == after


def test_every_diagnose_has_retrievable_report(service, tmp_path):
    client, _, _ = service
    ids = [
        client.post("/api/diagnose", content=pgm_bytes(tmp_path, value=v)).json()["id"]
        for v in (0, 127, 255)
    ]
    for image_id in ids:
        assert client.get(f"/api/report/{image_id}").status_code == 200
