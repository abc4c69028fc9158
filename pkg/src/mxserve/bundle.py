"""Load a runnable model from a model directory.

A model directory is what the scaffolder generates: ``metadata.json``,
``weights.json`` (model parameters), and an optional ``service.json``
with the pipeline kind and serving defaults. When ``service.json`` is
absent the kind is inferred from the shape of the weights file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import detector, sentiment
from .core import ModelMetadata, ModelWrapper, validate_metadata
from .service import DEFAULT_MAX_BODY_BYTES

KINDS = ("text-classifier", "object-detector")


@dataclass
class Bundle:
    wrapper: ModelWrapper
    port: int | None = None
    max_body_bytes: int = DEFAULT_MAX_BODY_BYTES
    log_level: str = "info"


def _read_json(path: Path, what: str) -> dict:
    if not path.exists():
        raise ValueError(f"{path}: missing {what} file")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: {what} must be a JSON object")
    return raw


def _infer_kind(weights_path: Path) -> str:
    raw = _read_json(weights_path, "weights")
    if "vocab" in raw:
        return "text-classifier"
    if "threshold" in raw or "min_area" in raw:
        return "object-detector"
    raise ValueError(
        f"{weights_path}: cannot infer model kind; expected 'vocab' or 'threshold'/'min_area' fields"
    )


def load_bundle(model_dir: str | Path) -> Bundle:
    """Build the wrapper (plus serving defaults) for *model_dir*.

    Raises ValueError with a diagnostic naming the offending file and
    field on any malformed input; the CLI surfaces these as startup
    failures.
    """
    model_dir = Path(model_dir)
    if not model_dir.is_dir():
        raise ValueError(f"{model_dir}: not a directory")

    metadata_raw = _read_json(model_dir / "metadata.json", "metadata")
    try:
        metadata = ModelMetadata.from_dict(metadata_raw)
    except ValueError as exc:
        raise ValueError(f"{model_dir / 'metadata.json'}: {exc}") from exc
    violations = validate_metadata(metadata)
    if violations:
        raise ValueError(f"{model_dir / 'metadata.json'}: " + "; ".join(violations))

    service_path = model_dir / "service.json"
    port = None
    max_body_bytes = DEFAULT_MAX_BODY_BYTES
    log_level = "info"
    kind = None
    if service_path.exists():
        service_raw = _read_json(service_path, "service config")
        kind = service_raw.get("kind")
        if kind is not None and kind not in KINDS:
            raise ValueError(f"{service_path}: field 'kind' must be one of {KINDS}, got {kind!r}")
        if "port" in service_raw:
            if not isinstance(service_raw["port"], int):
                raise ValueError(f"{service_path}: field 'port' must be an integer")
            port = service_raw["port"]
        if "max_body_bytes" in service_raw:
            if not isinstance(service_raw["max_body_bytes"], int):
                raise ValueError(f"{service_path}: field 'max_body_bytes' must be an integer")
            max_body_bytes = service_raw["max_body_bytes"]
        if "log_level" in service_raw:
            log_level = service_raw["log_level"]

    weights_path = model_dir / "weights.json"
    if kind is None:
        kind = _infer_kind(weights_path)

    if kind == "text-classifier":
        weights = sentiment.load_weights(weights_path)
        wrapper: ModelWrapper = sentiment.SentimentClassifier(metadata, weights)
    else:
        threshold, min_area = detector.load_params(weights_path)
        wrapper = detector.ObjectDetector(metadata, threshold=threshold, min_area=min_area)

    return Bundle(wrapper=wrapper, port=port, max_body_bytes=max_body_bytes, log_level=log_level)
