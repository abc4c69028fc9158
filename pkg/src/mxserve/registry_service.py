"""REST surface of the registry.

Routes::

    GET     /v1/models                the catalog, sorted by id
    POST    /v1/models                register {"id": ..., "url": ...}
    GET     /v1/models/{id}           one record
    DELETE  /v1/models/{id}           deregister
    POST    /v1/models/{id}/predict   proxy to the service's predict endpoint
    GET     /health                   registry liveness

The proxy forwards the request body and content type verbatim and relays
the upstream status and body unmodified, so clients see exactly what the
model service produced. Unhealthy records are still proxied: health is
advisory. Responses carry permissive CORS headers so a browser frontend
can use the registry as its single origin.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

from .core import json_bytes
from .registry import (
    DuplicateModelError,
    Registry,
    RegistrationInvalid,
    UnknownModelError,
)

access_log = logging.getLogger("mxserve.registry.access")

_CORS_HEADERS = (
    ("Access-Control-Allow-Origin", "*"),
    ("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"),
    ("Access-Control-Allow-Headers", "Content-Type"),
)


def _error_body(code: int, message: str) -> bytes:
    # Same wire shape as the model services' error envelope. Built directly
    # because registry-specific statuses (409) sit outside the envelope's
    # model-service code set.
    return json_bytes({"status": "error", "error": {"code": code, "message": message}})


class _RegistryServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, registry: Registry):
        super().__init__(address, _Handler)
        self.registry = registry


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    timeout = 30

    def log_message(self, format, *args):
        pass

    def do_GET(self):
        self._route("GET")

    def do_POST(self):
        self._route("POST")

    def do_DELETE(self):
        self._route("DELETE")

    def do_OPTIONS(self):
        self._route("OPTIONS")

    def _route(self, method: str):
        started = time.perf_counter()
        status = 500
        try:
            status = self._dispatch(method)
        except (BrokenPipeError, ConnectionResetError):
            status = 0
        except Exception as exc:
            status = self._send(500, _error_body(500, f"internal error: {exc}"))
        finally:
            elapsed_ms = (time.perf_counter() - started) * 1000.0
            access_log.info(
                "method=%s path=%s status=%d ms=%.2f", method, self.path, status, elapsed_ms
            )

    def _dispatch(self, method: str) -> int:
        registry: Registry = self.server.registry
        path = self.path.rstrip("/") or "/"

        if method == "OPTIONS":
            return self._send(204, b"")
        if method == "GET" and path == "/health":
            return self._send(200, json_bytes({"status": "ok"}))
        if path == "/v1/models":
            if method == "GET":
                records = [r.to_dict() for r in registry.list_models()]
                return self._send(200, json_bytes(records))
            if method == "POST":
                return self._handle_register(registry)
        if path.startswith("/v1/models/"):
            rest = path[len("/v1/models/") :]
            if rest.endswith("/predict") and method == "POST":
                return self._handle_proxy(registry, rest[: -len("/predict")])
            if "/" not in rest:
                if method == "GET":
                    return self._handle_get(registry, rest)
                if method == "DELETE":
                    return self._handle_delete(registry, rest)
        return self._send(404, _error_body(404, f"no such endpoint: {method} {self.path}"))

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length > 0 else b""

    def _handle_register(self, registry: Registry) -> int:
        try:
            payload = json.loads(self._read_body().decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return self._send(400, _error_body(400, "request body is not valid JSON"))
        if (
            not isinstance(payload, dict)
            or not isinstance(payload.get("id"), str)
            or not isinstance(payload.get("url"), str)
        ):
            return self._send(
                400, _error_body(400, 'registration body must be {"id": string, "url": string}')
            )
        try:
            record = registry.register(payload["id"], payload["url"])
        except DuplicateModelError as exc:
            return self._send(409, _error_body(409, str(exc)))
        except RegistrationInvalid as exc:
            return self._send(400, _error_body(400, str(exc)))
        return self._send(201, json_bytes(record.to_dict()))

    def _handle_get(self, registry: Registry, model_id: str) -> int:
        try:
            record = registry.get(model_id)
        except UnknownModelError as exc:
            return self._send(404, _error_body(404, str(exc)))
        return self._send(200, json_bytes(record.to_dict()))

    def _handle_delete(self, registry: Registry, model_id: str) -> int:
        try:
            registry.deregister(model_id)
        except UnknownModelError as exc:
            return self._send(404, _error_body(404, str(exc)))
        return self._send(204, b"")

    def _handle_proxy(self, registry: Registry, model_id: str) -> int:
        try:
            record = registry.get(model_id)
        except UnknownModelError as exc:
            return self._send(404, _error_body(404, str(exc)))
        body = self._read_body()
        headers = {}
        content_type = self.headers.get("Content-Type")
        if content_type:
            headers["Content-Type"] = content_type
        upstream = record.url.rstrip("/") + "/model/predict"
        try:
            response = requests.post(
                upstream, data=body, headers=headers, timeout=registry.config.probe_timeout
            )
        except requests.RequestException as exc:
            return self._send(502, _error_body(502, f"upstream {upstream} unreachable: {exc}"))
        return self._send(
            response.status_code,
            response.content,
            content_type=response.headers.get("Content-Type", "application/json"),
        )

    def _send(self, status: int, body: bytes, content_type: str = "application/json") -> int:
        self.send_response(status)
        if status != 204:
            self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        for name, value in _CORS_HEADERS:
            self.send_header(name, value)
        self.send_header("Connection", "close")
        self.close_connection = True
        self.end_headers()
        if body and self.command != "HEAD":
            self.wfile.write(body)
        return status


class RegistryService:
    """The registry's HTTP server plus its background health poller."""

    def __init__(self, registry: Registry, host: str = "127.0.0.1", port: int = 0):
        self.registry = registry
        self._host = host
        self._port = port
        self._server: _RegistryServer | None = None
        self._thread: threading.Thread | None = None

    def start(self, poll: bool = True):
        if self._server is not None:
            raise RuntimeError("registry service already started")
        self._server = _RegistryServer((self._host, self._port), self.registry)
        self._thread = threading.Thread(
            target=self._server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
        )
        self._thread.start()
        if poll:
            self.registry.start_poller()

    def stop(self):
        self.registry.stop_poller()
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
            raise RuntimeError("registry service not started")
        return self._server.server_address[1]

    @property
    def url(self) -> str:
        host = self._host if self._host not in ("0.0.0.0", "") else "127.0.0.1"
        return f"http://{host}:{self.port}"
