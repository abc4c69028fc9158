"""Shared fixtures: wrapper factories, in-process services, CLI spawning."""

from __future__ import annotations

import contextlib
import re
import signal
import subprocess
import sys
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from mxserve.core import ModelMetadata
from mxserve.detector import ObjectDetector
from mxserve.sentiment import SentimentClassifier, SentimentWeights
from mxserve.service import ModelService, ServiceConfig

FIXTURE_VOCAB = {"good": 2.0, "bad": -2.0}


def make_sentiment_wrapper(model_id="text-sentiment", name="Sentiment"):
    metadata = ModelMetadata(
        id=model_id,
        name=name,
        description="Scores text sentiment with a bag-of-words linear model.",
        model_type="text-classification",
        license="Apache-2.0",
        source="local",
    )
    return SentimentClassifier(metadata, SentimentWeights(dict(FIXTURE_VOCAB), bias=0.0))


def make_detector_wrapper(model_id="object-detector", threshold=0.5, min_area=1):
    metadata = ModelMetadata(
        id=model_id,
        name="Object Detector",
        description="Detects bright connected regions in grayscale images.",
        model_type="object-detection",
        license="Apache-2.0",
        source="local",
    )
    return ObjectDetector(metadata, threshold=threshold, min_area=min_area)


@contextlib.contextmanager
def running_service(wrapper, **config_kwargs):
    config_kwargs.setdefault("port", 0)
    service = ModelService(wrapper, ServiceConfig(**config_kwargs))
    service.start()
    try:
        yield service
    finally:
        service.stop()


@pytest.fixture(scope="module")
def sentiment_service():
    with running_service(make_sentiment_wrapper()) as service:
        yield service


@pytest.fixture(scope="module")
def detector_service():
    with running_service(make_detector_wrapper()) as service:
        yield service


class StubService:
    """Tiny configurable HTTP server for nonconforming-target tests.

    ``responses`` maps (method, path) to (status, body_bytes, content_type);
    anything else answers a bare 404.
    """

    def __init__(self, responses):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, *args):
                pass

            def _answer(self, method):
                length = int(self.headers.get("Content-Length") or 0)
                if length:
                    self.rfile.read(length)
                status, body, content_type = stub.responses.get(
                    (method, self.path), (404, b"not found", "text/plain")
                )
                self.send_response(status)
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.send_header("Connection", "close")
                self.close_connection = True
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                self._answer("GET")

            def do_POST(self):
                self._answer("POST")

        self.responses = responses
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def start(self):
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()

    @property
    def url(self):
        return f"http://127.0.0.1:{self._server.server_address[1]}"


_LISTEN_RE = re.compile(r"listening on (http://[\d.]+:\d+)")


class CliProcess:
    """A long-running `mx` subprocess whose stdout is drained continuously."""

    def __init__(self, *args):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "mxserve", *args],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            text=True,
        )
        self.lines: list[str] = []
        self._url = None
        self._url_ready = threading.Event()
        self._reader = threading.Thread(target=self._drain, daemon=True)
        self._reader.start()

    def _drain(self):
        for line in self.proc.stdout:
            self.lines.append(line)
            match = _LISTEN_RE.search(line)
            if match and not self._url_ready.is_set():
                self._url = match.group(1)
                self._url_ready.set()
        self._url_ready.set()

    def wait_url(self, timeout=15.0) -> str:
        if not self._url_ready.wait(timeout) or self._url is None:
            self.terminate()
            raise RuntimeError(f"no listening URL from mx {' '.join(map(str, self.proc.args))}: {''.join(self.lines)}")
        return self._url

    def terminate(self, timeout=10.0):
        if self.proc.poll() is None:
            self.proc.send_signal(signal.SIGTERM)
            try:
                self.proc.wait(timeout)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait(5)
        self._reader.join(timeout=5)
        return self.proc.returncode


@contextlib.contextmanager
def cli_service(*args):
    proc = CliProcess(*args)
    try:
        proc.wait_url()
        yield proc
    finally:
        proc.terminate()


def run_cli(*args, timeout=60):
    """Run a short-lived `mx` command to completion."""
    return subprocess.run(
        [sys.executable, "-m", "mxserve", *map(str, args)],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def wait_for(predicate, timeout=5.0, interval=0.02, message="condition"):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        if predicate():
            return
        time.sleep(interval)
    raise AssertionError(f"timed out waiting for {message}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in report.nodeid and getattr(report, "when", "call") == "call":
                status = "PASS" if report.passed else "FAIL"
                lines.append(f"{status}  {report.nodeid.split('::')[-1]}")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(set(lines)):
            terminalreporter.write_line(line)
