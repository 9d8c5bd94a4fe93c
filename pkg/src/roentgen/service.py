"""HTTP diagnosis service: model loading, image upload, reports, metrics.

The API is deliberately codec-free: POST /api/diagnose takes raw binary PGM
bytes and returns a diagnosis JSON. Uploads and their reports are persisted
under the storage directory; the knowledge base itself is immutable shared
state, so concurrent requests score identically to sequential ones.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from html import escape
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse

from .diagnosis import Diagnosis, decide_label
from .errors import FormatError
from .imaging import decode_pgm, to_input_tensor
from .kb import KnowledgeBase, load_kb
from .network import NetworkSpec, build_vgg16, forward

DEFAULT_UPLOAD_LIMIT = 8 * 1024 * 1024


@dataclass
class ServiceConfig:
    model_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    upload_limit: int = DEFAULT_UPLOAD_LIMIT
    storage_dir: str = "storage"
    metrics_path: str | None = None

    def __post_init__(self):
        if self.upload_limit < 1 or self.port < 1:
            raise ValueError("upload limit and port must be positive")


def network_from_metadata(kb: KnowledgeBase) -> NetworkSpec:
    """Rebuild the architecture recorded in a knowledge base's metadata."""
    try:
        input_shape = tuple(int(v) for v in kb.metadata["input_shape"])
        head_units = int(kb.metadata["head_units"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(
            "model file lacks input_shape/head_units metadata; re-train or add them"
        ) from exc
    return build_vgg16(input_shape, head_units)


def load_model(model_path: str | Path) -> tuple[NetworkSpec, KnowledgeBase]:
    with open(model_path, "rb") as fh:
        kb = load_kb(fh)
    return network_from_metadata(kb), kb


def create_app(config: ServiceConfig) -> FastAPI:
    net, kb = load_model(config.model_path)
    threshold = float(kb.metadata.get("threshold", 0.5))
    fingerprint = kb.fingerprint()

    storage = Path(config.storage_dir)
    uploads = storage / "uploads"
    reports = storage / "reports"
    uploads.mkdir(parents=True, exist_ok=True)
    reports.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="roentgen diagnosis service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.net = net
    app.state.kb = kb
    started = time.monotonic()

    @app.middleware("http")
    async def request_log(request: Request, call_next):
        begin = time.perf_counter()
        response = await call_next(request)
        print(
            json.dumps(
                {
                    "ts": datetime.now(timezone.utc).isoformat(),
                    "method": request.method,
                    "path": request.url.path,
                    "status": response.status_code,
                    "ms": round((time.perf_counter() - begin) * 1000, 3),
                }
            ),
            flush=True,
        )
        return response

    @app.get("/health")
    async def health():
        return {
            "status": "ok",
            "model_fingerprint": fingerprint,
            "uptime": time.monotonic() - started,
        }

    @app.post("/api/diagnose")
    async def diagnose(request: Request):
        if app.state.kb is None:
            return JSONResponse({"error": "model not loaded"}, status_code=503)
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > config.upload_limit:
            return JSONResponse({"error": "upload exceeds size limit"}, status_code=413)
        body = await request.body()
        if len(body) > config.upload_limit:
            return JSONResponse({"error": "upload exceeds size limit"}, status_code=413)
        try:
            image = decode_pgm(body)
        except FormatError as exc:
            return JSONResponse({"error": f"malformed image: {exc}"}, status_code=400)
        h, w, c = app.state.net.input_shape
        tensor = to_input_tensor(image, (h, w), c)
        score = forward(app.state.net, app.state.kb, tensor)
        image_id = uuid.uuid4().hex
        result = Diagnosis(
            label=decide_label(score, threshold),
            score=score,
            threshold=threshold,
            model_fingerprint=fingerprint,
            image_id=image_id,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )
        _atomic_write(uploads / f"{image_id}.pgm", body)
        _atomic_write(
            reports / f"{image_id}.json", json.dumps(result.to_dict(), indent=2).encode()
        )
        return JSONResponse(result.to_dict())

    @app.get("/api/report/{image_id}")
    async def report(image_id: str):
        path = reports / f"{_safe_id(image_id)}.json"
        if not path.is_file():
            return JSONResponse({"error": f"unknown report id {image_id!r}"}, status_code=404)
        try:
            return Response(path.read_bytes(), media_type="application/json")
        except OSError as exc:
            return JSONResponse({"error": f"storage unreadable: {exc}"}, status_code=500)

    @app.get("/api/report/{image_id}/html")
    async def report_html(image_id: str):
        path = reports / f"{_safe_id(image_id)}.json"
        if not path.is_file():
            return PlainTextResponse(f"unknown report id {image_id!r}", status_code=404)
        try:
            record = json.loads(path.read_bytes())
        except OSError as exc:
            return PlainTextResponse(f"storage unreadable: {exc}", status_code=500)
        return HTMLResponse(_printable_report(record))

    @app.get("/api/metrics")
    async def metrics():
        if not config.metrics_path or not Path(config.metrics_path).is_file():
            return PlainTextResponse("", media_type="application/x-ndjson")
        try:
            text = Path(config.metrics_path).read_text()
        except OSError as exc:
            return PlainTextResponse(f"storage unreadable: {exc}", status_code=500)
        return PlainTextResponse(text, media_type="application/x-ndjson")

    return app


def _safe_id(image_id: str) -> str:
    # report ids are uuid hex; anything else cannot name a stored file
    return image_id if image_id.isalnum() else "_"


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _printable_report(record: dict) -> str:
    rows = "".join(
        f"<tr><th>{escape(str(key))}</th><td>{escape(str(value))}</td></tr>"
        for key, value in record.items()
    )
    return (
        "<!doctype html><html><head><meta charset='utf-8'>"
        "<title>Diagnosis report</title>"
        "<style>body{font-family:sans-serif;margin:2rem}table{border-collapse:collapse}"
        "th,td{border:1px solid #999;padding:.4rem .8rem;text-align:left}</style>"
        "</head><body><h1>Preliminary diagnosis report</h1>"
        f"<table>{rows}</table>"
        "<p><em>For assisted diagnosis under medical supervision; "
        "not a standalone medical device.</em></p>"
        "</body></html>"
    )
