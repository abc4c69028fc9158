"""Shared model-service contract.

Every model service, whatever it wraps, speaks the same surface: a
metadata card, a three-stage wrapper pipeline (pre-process, predict,
post-process), and a prediction envelope ``{"status": ..., "predictions"
| "error": ...}`` serialized with a fixed key order so responses are
byte-reproducible.
"""

from __future__ import annotations

import json
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Union

if TYPE_CHECKING:
    from .pgm import GrayImage

ID_RE = re.compile(r"[a-z0-9][a-z0-9-]*\Z")
ID_MAX_LEN = 64

INPUT_KINDS = ("json_text", "image")

#: HTTP codes an error envelope is allowed to carry.
ERROR_CODES = frozenset({400, 404, 413, 415, 422, 500, 502, 503})


def json_bytes(payload: Any) -> bytes:
    """Encode *payload* for the wire: UTF-8, compact separators, insertion
    key order, shortest round-trip floats. All golden/byte-identity tests
    rest on this one encoder."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


@dataclass(frozen=True)
class ModelMetadata:
    """Identity card every model service publishes at /model/metadata."""

    id: str
    name: str
    description: str
    model_type: str
    license: str
    source: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "model_type": self.model_type,
            "license": self.license,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, raw: Any) -> "ModelMetadata":
        """Build from a parsed JSON object. Raises ValueError when the six
        required string fields are not all present; extra keys are ignored."""
        if not isinstance(raw, dict):
            raise ValueError("metadata must be a JSON object")
        fields = ("id", "name", "description", "model_type", "license", "source")
        values = {}
        for field in fields:
            value = raw.get(field)
            if not isinstance(value, str):
                raise ValueError(f"metadata field '{field}' must be a string")
            values[field] = value
        return cls(**values)


def validate_metadata(metadata: ModelMetadata) -> list[str]:
    """Check the metadata invariants. Returns a list of violations, each
    naming the offending field; an empty list means the metadata is valid."""
    violations = []
    if not ID_RE.fullmatch(metadata.id) or len(metadata.id) > ID_MAX_LEN:
        violations.append(
            f"id: {metadata.id!r} must match [a-z0-9][a-z0-9-]* and be 1-{ID_MAX_LEN} characters"
        )
    if not metadata.name:
        violations.append("name: must be non-empty")
    if not metadata.description:
        violations.append("description: must be non-empty")
    return violations


@dataclass(frozen=True)
class IoDescriptor:
    """Declares how a wrapper takes input and what each per-instance
    prediction value looks like (named by ``output_schema_id``, e.g.
    ``sentiment.v1``). Drives request negotiation and the generated
    API document."""

    input_kind: str
    output_schema_id: str
    accepted_content_types: tuple[str, ...]

    def __post_init__(self):
        if self.input_kind not in INPUT_KINDS:
            raise ValueError(f"input_kind must be one of {INPUT_KINDS}, got {self.input_kind!r}")
        if not self.accepted_content_types:
            raise ValueError("accepted_content_types must be non-empty")
        if self.input_kind == "json_text" and "application/json" not in self.accepted_content_types:
            raise ValueError("json_text models must accept application/json")


@dataclass(frozen=True)
class ErrorBody:
    """Machine-readable failure: `code` mirrors the HTTP status, `message`
    is human-readable and never carries a stack trace."""

    code: int
    message: str

    def __post_init__(self):
        if self.code not in ERROR_CODES:
            raise ValueError(f"error code {self.code} not in {sorted(ERROR_CODES)}")

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class PredictionEnvelope:
    """The standardized response wrapper. Exactly one of ``predictions``
    and ``error`` is present, matching ``status``."""

    status: str
    predictions: list | None = None
    error: ErrorBody | None = None

    def __post_init__(self):
        if self.status == "ok":
            if self.predictions is None or self.error is not None:
                raise ValueError("ok envelope carries predictions and no error")
        elif self.status == "error":
            if self.error is None or self.predictions is not None:
                raise ValueError("error envelope carries error and no predictions")
        else:
            raise ValueError(f"status must be 'ok' or 'error', got {self.status!r}")

    @classmethod
    def ok(cls, predictions: list) -> "PredictionEnvelope":
        return cls(status="ok", predictions=predictions)

    @classmethod
    def failure(cls, code: int, message: str) -> "PredictionEnvelope":
        return cls(status="error", error=ErrorBody(code, message))

    def to_dict(self) -> dict:
        if self.status == "ok":
            return {"status": "ok", "predictions": self.predictions}
        return {"status": "error", "error": self.error.to_dict()}


@dataclass(frozen=True)
class ParsedRequest:
    """A predict request after content negotiation: either a batch of text
    strings or one decoded grayscale image."""

    instances: Union[list[str], "GrayImage"]
    declared_content_type: str

    @property
    def instance_count(self) -> int:
        if isinstance(self.instances, list):
            return len(self.instances)
        return 1


class ModelWrapper(ABC):
    """The three-stage pipeline every model implements.

    Subclasses set ``metadata`` and ``io`` at construction and must not
    mutate internal state (weights, vocabularies) afterwards: a loaded
    wrapper is immutable and safe for concurrent use.
    """

    metadata: ModelMetadata
    io: IoDescriptor

    @abstractmethod
    def pre_process(self, raw: Any) -> Any:
        """Turn negotiated request input into model input."""

    @abstractmethod
    def predict(self, model_input: Any) -> Any:
        """Run the model on pre-processed input."""

    @abstractmethod
    def post_process(self, raw_output: Any) -> list:
        """Turn raw model output into the envelope's predictions array:
        one JSON-serializable value per input instance, in order."""


def run_pipeline(wrapper: ModelWrapper, request: ParsedRequest) -> PredictionEnvelope:
    """Run one request through the wrapper pipeline.

    A failure in pre_process maps to a 400 error envelope (bad input); a
    failure in predict or post_process maps to 500. The pipeline is pure:
    identical request and wrapper state yield an identical envelope.
    """
    try:
        model_input = wrapper.pre_process(request.instances)
    except Exception as exc:
        return PredictionEnvelope.failure(400, f"input rejected by pre-processing: {exc}")
    try:
        raw_output = wrapper.predict(model_input)
        predictions = wrapper.post_process(raw_output)
    except Exception as exc:
        return PredictionEnvelope.failure(500, f"prediction failed: {exc}")
    if not isinstance(predictions, list) or len(predictions) != request.instance_count:
        return PredictionEnvelope.failure(
            500,
            f"model produced {len(predictions) if isinstance(predictions, list) else 'non-list'} "
            f"predictions for {request.instance_count} instances",
        )
    return PredictionEnvelope.ok(predictions)
