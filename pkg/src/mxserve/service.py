"""HTTP front for one wrapped model.

Endpoint set (fixed for every model service):

* ``GET /model/metadata`` -- the metadata card
* ``POST /model/predict`` -- inference; body negotiated against the
  wrapper's io descriptor
* ``GET /health`` -- liveness/readiness (503 until the model is loaded)
* ``GET /swagger.json`` -- the generated OpenAPI document

Every error response carries the standard envelope with the HTTP status
mirrored in ``error.code``. One model per process; handlers share only
the immutable wrapper, so concurrent identical requests produce
byte-identical bodies.
"""

from __future__ import annotations

import email.parser
import email.policy
import json
import logging
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .core import (
    ModelWrapper,
    ParsedRequest,
    PredictionEnvelope,
    json_bytes,
    run_pipeline,
    validate_metadata,
)
from .openapi import build_openapi
from .pgm import PgmDecodeError, decode_pgm

access_log = logging.getLogger("mxserve.access")

DEFAULT_MAX_BODY_BYTES = 4_194_304
LOG_LEVELS = ("debug", "info", "warning", "error")


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 0
    model_dir: Path | None = None
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES
    log_level: str = "info"

    def __post_init__(self):
        if self.max_body_bytes < 1024:
            raise ValueError(f"max_body_bytes must be >= 1024, got {self.max_body_bytes}")
        if self.log_level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {LOG_LEVELS}, got {self.log_level!r}")

    @property
    def bind_address(self) -> str:
        return f"{self.host}:{self.port}"


class RequestRejected(Exception):
    """A request that cannot reach the pipeline; maps to an error envelope."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _media_type(content_type_header: str) -> str:
    return content_type_header.split(";", 1)[0].strip().lower()


def _parse_text_body(body: bytes) -> list[str]:
    try:
        payload = json.loads(body.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise RequestRejected(400, "request body is not valid JSON") from None
    if not isinstance(payload, dict) or "text" not in payload:
        raise RequestRejected(400, 'request body must be a JSON object with a "text" key')
    instances = payload["text"]
    if not isinstance(instances, list) or any(not isinstance(t, str) for t in instances):
        raise RequestRejected(400, '"text" must be an array of strings')
    if not instances:
        raise RequestRejected(422, '"text" must contain at least one instance')
    return instances


def _multipart_image_bytes(body: bytes, content_type_header: str) -> bytes:
    # Synthesize a message so the stdlib email parser handles boundaries,
    # quoting, and part headers.
    raw = b"Content-Type: " + content_type_header.encode("latin-1") + b"\r\n\r\n" + body
    message = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(raw)
    if not message.is_multipart():
        raise RequestRejected(400, "malformed multipart body")
    for part in message.iter_parts():
        if part.get_param("name", header="content-disposition") == "image":
            payload = part.get_payload(decode=True)
            if payload is None:
                raise RequestRejected(400, 'multipart field "image" is empty')
            return payload
    raise RequestRejected(400, 'multipart body is missing the "image" field')


def parse_predict_request(body: bytes, content_type_header: str | None, wrapper: ModelWrapper) -> ParsedRequest:
    """Negotiate a raw predict body into the wrapper's input kind.

    Raises RequestRejected with the appropriate envelope code: 415 for a
    content type the model does not accept, 400 for malformed payloads,
    422 for an empty batch.
    """
    accepted = wrapper.io.accepted_content_types
    if not content_type_header:
        raise RequestRejected(415, f"missing Content-Type; accepted: {', '.join(accepted)}")
    media = _media_type(content_type_header)
    if media not in accepted:
        raise RequestRejected(
            415, f"content type {media!r} not accepted by this model; accepted: {', '.join(accepted)}"
        )
    if wrapper.io.input_kind == "json_text":
        return ParsedRequest(instances=_parse_text_body(body), declared_content_type=media)
    if media == "multipart/form-data":
        image_bytes = _multipart_image_bytes(body, content_type_header)
    else:
        image_bytes = body
    try:
        image = decode_pgm(image_bytes)
    except PgmDecodeError as exc:
        raise RequestRejected(400, f"cannot decode image: {exc}") from None
    return ParsedRequest(instances=image, declared_content_type=media)


class _ServiceServer(ThreadingHTTPServer):
    # block_on_close (default) joins handler threads on server_close, so
    # stop() returns only after in-flight requests finish.
    daemon_threads = True

    def __init__(self, address, service: "ModelService"):
        super().__init__(address, _Handler)
        self.service = service


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    timeout = 30

    # Access logging with latency happens in _route; silence the default.
    def log_message(self, format, *args):
        pass

    def do_GET(self):
        self._route("GET")

    def do_HEAD(self):
        self._route("HEAD")

    def do_POST(self):
        self._route("POST")

    def do_DELETE(self):
        self._route("DELETE")

    def _route(self, method: str):
        started = time.perf_counter()
        status = 500
        try:
            status = self._dispatch(method)
        except RequestRejected as exc:
            status = self._send_error_envelope(exc.code, exc.message)
        except (BrokenPipeError, ConnectionResetError):
            status = 0  # client went away mid-response; nothing to send
        except Exception as exc:  # keep envelope totality even for bugs
            status = self._send_error_envelope(500, f"internal error: {exc}")
        finally:
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            access_log.info(
                "method=%s path=%s status=%d ms=%.2f", method, self.path, status, elapsed_ms
            )

    def _dispatch(self, method: str) -> int:
        service = self.server.service
        lookup = "GET" if method == "HEAD" else method
        if lookup == "GET" and self.path == "/health":
            if not service.ready:
                raise RequestRejected(503, "model is still loading")
            return self._send(200, json_bytes({"status": "ok"}))

        wrapper = service.wrapper
        if lookup == "GET" and self.path == "/model/metadata":
            if wrapper is None:
                raise RequestRejected(503, "model is still loading")
            return self._send(200, service.metadata_bytes)
        if lookup == "GET" and self.path == "/swagger.json":
            if wrapper is None:
                raise RequestRejected(503, "model is still loading")
            return self._send(200, service.openapi_bytes)
        if method == "POST" and self.path == "/model/predict":
            return self._handle_predict(service)
        raise RequestRejected(404, f"no such endpoint: {method} {self.path}")

    def _handle_predict(self, service: "ModelService") -> int:
        wrapper = service.wrapper
        if wrapper is None:
            raise RequestRejected(503, "model is still loading")
        if self.headers.get("Transfer-Encoding"):
            raise RequestRejected(400, "chunked request bodies are not supported")
        length_header = self.headers.get("Content-Length")
        if length_header is None:
            raise RequestRejected(400, "Content-Length header is required")
        try:
            length = int(length_header)
        except ValueError:
            raise RequestRejected(400, "Content-Length header must be an integer") from None
        if length < 0:
            raise RequestRejected(400, "Content-Length header must be non-negative")
        if length > service.config.max_body_bytes:
            # Rejected before the body is read or the pipeline runs.
            raise RequestRejected(
                413,
                f"request body of {length} bytes exceeds the limit of "
                f"{service.config.max_body_bytes} bytes",
            )
        body = self.rfile.read(length)
        parsed = parse_predict_request(body, self.headers.get("Content-Type"), wrapper)
        envelope = run_pipeline(wrapper, parsed)
        status = 200 if envelope.status == "ok" else envelope.error.code
        return self._send(status, json_bytes(envelope.to_dict()))

    def _send(self, status: int, body: bytes, content_type: str = "application/json") -> int:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Connection", "close")
        self.close_connection = True
        self.end_headers()
        if self.command != "HEAD":
            self.wfile.write(body)
        return status

    def _send_error_envelope(self, code: int, message: str) -> int:
        envelope = PredictionEnvelope.failure(code, message)
        return self._send(code, json_bytes(envelope.to_dict()))


class ModelService:
    """One wrapped model served over HTTP.

    Construct with ``wrapper=None`` to start serving before the model has
    loaded; /health answers 503 until attach_wrapper is called.
    """

    def __init__(self, wrapper: ModelWrapper | None, config: ServiceConfig | None = None):
        self.config = config or ServiceConfig()
        self.wrapper: ModelWrapper | None = None
        self.metadata_bytes = b""
        self.openapi_bytes = b""
        self._server: _ServiceServer | None = None
        self._thread: threading.Thread | None = None
        if wrapper is not None:
            self.attach_wrapper(wrapper)
        access_log.setLevel(getattr(logging, self.config.log_level.upper()))

    @property
    def ready(self) -> bool:
        return self.wrapper is not None

    def attach_wrapper(self, wrapper: ModelWrapper):
        violations = validate_metadata(wrapper.metadata)
        if violations:
            raise ValueError("invalid model metadata: " + "; ".join(violations))
        # Precomputed once: every response serves the same bytes.
        self.metadata_bytes = json_bytes(wrapper.metadata.to_dict())
        self.openapi_bytes = json_bytes(build_openapi(wrapper.metadata, wrapper.io))
        self.wrapper = wrapper

    def start(self):
        if self._server is not None:
            raise RuntimeError("service already started")
        self._server = _ServiceServer((self.config.host, self.config.port), self)
        self._thread = threading.Thread(
            target=self._server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
        )
        self._thread.start()

    def stop(self):
        """Stop accepting connections and wait for in-flight requests."""
        if self._server is None:
            return
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()
        self._server = None
        self._thread = None

    @property
    def port(self) -> int:
        if self._server is None:
            raise RuntimeError("service not started")
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        host = self.config.host if self.config.host not in ("0.0.0.0", "") else "127.0.0.1"
        return f"http://{host}:{self.port}"
