"""Executable conformance checking for live model services.

``validate_service`` probes a running service and checks it against the
standardized contract: health endpoint, metadata schema, generated API
document, ok-envelope shape with batch alignment, and error-envelope
status/code agreement. The normative JSON Schemas live in
``mxserve/schemas/`` and are applied to the wire bytes, independently of
the server-side types.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import requests

from .pgm import GrayImage, encode_pgm

DEFAULT_TIMEOUT = 5.0

_SAMPLE_TEXTS = ["good movie", "bad movie"]


def _load_schema(name: str) -> dict:
    path = resources.files("mxserve").joinpath(f"schemas/{name}")
    return json.loads(path.read_text(encoding="utf-8"))


METADATA_SCHEMA = _load_schema("metadata.schema.json")
ENVELOPE_SCHEMA = _load_schema("envelope.schema.json")


def _sample_pgm() -> bytes:
    data = [0.0] * 64
    for r in range(1, 4):
        for c in range(1, 4):
            data[r * 8 + c] = 1.0
    return encode_pgm(GrayImage(8, 8, tuple(data)))


@dataclass
class CheckResult:
    check_id: str
    description: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "description": self.description,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class ConformanceReport:
    target_url: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def to_dict(self) -> dict:
        return {
            "target_url": self.target_url,
            "passed": self.passed,
            "checks": [check.to_dict() for check in self.checks],
        }

    def to_text(self) -> str:
        lines = [f"conformance report for {self.target_url}"]
        for check in self.checks:
            marker = "PASS" if check.passed else "FAIL"
            line = f"  {marker}  {check.check_id:<14} {check.description}"
            if check.detail and not check.passed:
                line += f" ({check.detail})"
            lines.append(line)
        lines.append(f"result: {'PASSED' if self.passed else 'FAILED'}")
        return "\n".join(lines)


def _schema_errors(instance, schema) -> str:
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(instance), key=lambda e: list(e.path))
    return "; ".join(
        f"{'/'.join(str(p) for p in error.path) or '<root>'}: {error.message}" for error in errors
    )


class _Session:
    """One validation run against one target."""

    def __init__(self, base_url: str, timeout: float):
        self.base = base_url.rstrip("/")
        self.timeout = timeout
        self.predict_content_types: list[str] = []

    def check_health(self) -> CheckResult:
        description = 'GET /health answers 200 {"status":"ok"}'
        try:
            response = requests.get(self.base + "/health", timeout=self.timeout)
        except requests.RequestException as exc:
            return CheckResult("health", description, False, str(exc))
        if response.status_code != 200:
            return CheckResult("health", description, False, f"HTTP {response.status_code}")
        try:
            body = response.json()
        except ValueError:
            return CheckResult("health", description, False, "body is not JSON")
        if body != {"status": "ok"}:
            return CheckResult("health", description, False, f"unexpected body {body!r}")
        return CheckResult("health", description, True)

    def check_metadata(self) -> CheckResult:
        description = "GET /model/metadata answers a valid metadata card"
        try:
            response = requests.get(self.base + "/model/metadata", timeout=self.timeout)
        except requests.RequestException as exc:
            return CheckResult("metadata", description, False, str(exc))
        if response.status_code != 200:
            return CheckResult("metadata", description, False, f"HTTP {response.status_code}")
        try:
            body = response.json()
        except ValueError:
            return CheckResult("metadata", description, False, "body is not JSON")
        errors = _schema_errors(body, METADATA_SCHEMA)
        if errors:
            return CheckResult("metadata", description, False, errors)
        return CheckResult("metadata", description, True)

    def check_openapi(self) -> CheckResult:
        description = "GET /swagger.json serves an API document covering /model/predict"
        try:
            response = requests.get(self.base + "/swagger.json", timeout=self.timeout)
        except requests.RequestException as exc:
            return CheckResult("openapi", description, False, str(exc))
        if response.status_code != 200:
            return CheckResult("openapi", description, False, f"HTTP {response.status_code}")
        try:
            document = response.json()
        except ValueError:
            return CheckResult("openapi", description, False, "body is not JSON")
        if not isinstance(document, dict) or "/model/predict" not in document.get("paths", {}):
            return CheckResult("openapi", description, False, "paths do not include /model/predict")
        content = (
            document["paths"]["/model/predict"]
            .get("post", {})
            .get("requestBody", {})
            .get("content", {})
        )
        self.predict_content_types = list(content)
        return CheckResult("openapi", description, True)

    def _post_sample(self, malformed: bool) -> requests.Response:
        kinds = self.predict_content_types or ["application/json"]
        if "application/json" in kinds:
            body = b'{"text": ' if malformed else json.dumps({"text": _SAMPLE_TEXTS}).encode()
            return requests.post(
                self.base + "/model/predict",
                data=body,
                headers={"Content-Type": "application/json"},
                timeout=self.timeout,
            )
        if "image/x-portable-graymap" in kinds:
            body = b"P9 not an image" if malformed else _sample_pgm()
            return requests.post(
                self.base + "/model/predict",
                data=body,
                headers={"Content-Type": "image/x-portable-graymap"},
                timeout=self.timeout,
            )
        body = b"P9 not an image" if malformed else _sample_pgm()
        return requests.post(
            self.base + "/model/predict",
            files={"image": ("sample.pgm", body, "image/x-portable-graymap")},
            timeout=self.timeout,
        )

    def _expected_instances(self) -> int:
        kinds = self.predict_content_types or ["application/json"]
        return len(_SAMPLE_TEXTS) if "application/json" in kinds else 1

    def check_predict_ok(self) -> CheckResult:
        description = "POST /model/predict on a sample input returns an aligned ok envelope"
        try:
            response = self._post_sample(malformed=False)
        except requests.RequestException as exc:
            return CheckResult("predict-ok", description, False, str(exc))
        if response.status_code != 200:
            return CheckResult(
                "predict-ok", description, False, f"HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            body = response.json()
        except ValueError:
            return CheckResult("predict-ok", description, False, "body is not JSON")
        errors = _schema_errors(body, ENVELOPE_SCHEMA)
        if errors:
            return CheckResult("predict-ok", description, False, errors)
        if body.get("status") != "ok":
            return CheckResult("predict-ok", description, False, f"status is {body.get('status')!r}")
        expected = self._expected_instances()
        if len(body["predictions"]) != expected:
            return CheckResult(
                "predict-ok",
                description,
                False,
                f"{len(body['predictions'])} predictions for {expected} instances",
            )
        return CheckResult("predict-ok", description, True)

    def check_predict_error(self) -> CheckResult:
        description = "POST /model/predict on a malformed body returns a matching error envelope"
        try:
            response = self._post_sample(malformed=True)
        except requests.RequestException as exc:
            return CheckResult("predict-error", description, False, str(exc))
        if not 400 <= response.status_code <= 599:
            return CheckResult(
                "predict-error", description, False, f"HTTP {response.status_code} is not an error"
            )
        try:
            body = response.json()
        except ValueError:
            return CheckResult("predict-error", description, False, "body is not JSON")
        errors = _schema_errors(body, ENVELOPE_SCHEMA)
        if errors:
            return CheckResult("predict-error", description, False, errors)
        if body.get("status") != "error":
            return CheckResult(
                "predict-error", description, False, f"status is {body.get('status')!r}"
            )
        if body["error"]["code"] != response.status_code:
            return CheckResult(
                "predict-error",
                description,
                False,
                f"error.code {body['error']['code']} != HTTP status {response.status_code}",
            )
        return CheckResult("predict-error", description, True)


def validate_service(url: str, timeout: float = DEFAULT_TIMEOUT) -> ConformanceReport:
    """Run the full conformance suite against the service at *url*.

    Never raises for target-side problems: an unreachable service simply
    fails every check.
    """
    session = _Session(url, timeout)
    report = ConformanceReport(target_url=url)
    report.checks.append(session.check_health())
    report.checks.append(session.check_metadata())
    report.checks.append(session.check_openapi())
    report.checks.append(session.check_predict_ok())
    report.checks.append(session.check_predict_error())
    return report
