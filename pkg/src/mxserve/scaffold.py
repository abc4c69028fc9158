"""Project scaffolding: generate a runnable model service skeleton.

Two templates are available, one per reference model. A scaffolded
directory contains everything a new service needs (metadata, a weights
fixture, serving config, a container build file, a sample request, and a
test stub) and passes conformance validation with zero edits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .core import ID_MAX_LEN, ID_RE
from .pgm import GrayImage, encode_pgm
from .service import DEFAULT_MAX_BODY_BYTES


class ScaffoldError(Exception):
    """Refused scaffold: bad template, bad id, or an unsafe target."""


@dataclass(frozen=True)
class ScaffoldTemplate:
    name: str
    files: tuple[str, ...]


TEMPLATES = {
    "text-classifier": ScaffoldTemplate(
        name="text-classifier",
        files=(
            "metadata.json",
            "weights.json",
            "service.json",
            "Dockerfile",
            "sample-request.json",
            "test_service.py",
        ),
    ),
    "object-detector": ScaffoldTemplate(
        name="object-detector",
        files=(
            "metadata.json",
            "weights.json",
            "service.json",
            "Dockerfile",
            "sample-request.json",
            "sample-image.pgm",
            "test_service.py",
        ),
    ),
}

_DOCKERFILE = """\
FROM python:3.10-slim

RUN pip install --no-cache-dir mxserve

COPY . /model

ENV MODEL_DIR=/model \\
    PORT=5000

EXPOSE 5000

CMD ["mx", "serve", "--model-dir", "/model", "--host", "0.0.0.0", "--port", "5000"]
"""

_TEST_STUB = '''\
"""Smoke test for this scaffolded model service (requires mxserve)."""

import json
from pathlib import Path

import requests

from mxserve.bundle import load_bundle
from mxserve.service import ModelService, ServiceConfig

MODEL_DIR = Path(__file__).parent


def test_service_answers_sample_request():
    bundle = load_bundle(MODEL_DIR)
    config = ServiceConfig(port=0, max_body_bytes=bundle.max_body_bytes)
    service = ModelService(bundle.wrapper, config)
    service.start()
    try:
        health = requests.get(service.url + "/health", timeout=5)
        assert health.status_code == 200

        sample = json.loads((MODEL_DIR / "sample-request.json").read_text())
        if "body_file" in sample:
            body = (MODEL_DIR / sample["body_file"]).read_bytes()
        else:
            body = json.dumps(sample["body"]).encode("utf-8")
        response = requests.post(
            service.url + "/model/predict",
            data=body,
            headers={"Content-Type": sample["content_type"]},
            timeout=5,
        )
        assert response.status_code == 200
        envelope = response.json()
        assert envelope["status"] == "ok"
        assert len(envelope["predictions"]) >= 1
    finally:
        service.stop()
'''


def _display_name(model_id: str) -> str:
    return " ".join(part.capitalize() for part in model_id.split("-") if part)


def _sample_image_bytes() -> bytes:
    # 8x8, one bright 3x3 block: a single detection at default params.
    data = [0.0] * 64
    for r in range(1, 4):
        for c in range(1, 4):
            data[r * 8 + c] = 1.0
    return encode_pgm(GrayImage(8, 8, tuple(data)))


def _render(template: ScaffoldTemplate, model_id: str) -> dict[str, bytes]:
    def as_json(payload) -> bytes:
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")

    if template.name == "text-classifier":
        metadata = {
            "id": model_id,
            "name": _display_name(model_id),
            "description": "Bag-of-words text sentiment classifier service.",
            "model_type": "text-classification",
            "license": "Apache-2.0",
            "source": "local",
        }
        weights = {"vocab": {"good": 2.0, "bad": -2.0}, "bias": 0.0}
        sample = {"content_type": "application/json", "body": {"text": ["good movie", "bad movie"]}}
    else:
        metadata = {
            "id": model_id,
            "name": _display_name(model_id),
            "description": "Connected-components object detector service.",
            "model_type": "object-detection",
            "license": "Apache-2.0",
            "source": "local",
        }
        weights = {"threshold": 0.5, "min_area": 4}
        sample = {"content_type": "image/x-portable-graymap", "body_file": "sample-image.pgm"}

    files = {
        "metadata.json": as_json(metadata),
        "weights.json": as_json(weights),
        "service.json": as_json(
            {
                "kind": template.name,
                "port": 5000,
                "max_body_bytes": DEFAULT_MAX_BODY_BYTES,
                "log_level": "info",
            }
        ),
        "Dockerfile": _DOCKERFILE.encode("utf-8"),
        "sample-request.json": as_json(sample),
        "test_service.py": _TEST_STUB.encode("utf-8"),
    }
    if template.name == "object-detector":
        files["sample-image.pgm"] = _sample_image_bytes()
    return files


def scaffold(template_name: str, model_id: str, target_dir: str | Path) -> list[Path]:
    """Generate *template_name* for *model_id* into *target_dir*.

    The target must be absent or an empty directory; a refused scaffold
    writes nothing. Returns the created file paths.
    """
    template = TEMPLATES.get(template_name)
    if template is None:
        raise ScaffoldError(f"unknown template {template_name!r}; available: {', '.join(TEMPLATES)}")
    if not ID_RE.fullmatch(model_id) or len(model_id) > ID_MAX_LEN:
        raise ScaffoldError(
            f"invalid id {model_id!r}: must match [a-z0-9][a-z0-9-]* and be 1-{ID_MAX_LEN} characters"
        )
    target_dir = Path(target_dir)
    if target_dir.exists():
        if not target_dir.is_dir():
            raise ScaffoldError(f"{target_dir} exists and is not a directory")
        if any(target_dir.iterdir()):
            raise ScaffoldError(f"refusing to scaffold into non-empty directory {target_dir}")

    # All contents are rendered before anything touches the filesystem.
    files = _render(template, model_id)
    target_dir.mkdir(parents=True, exist_ok=True)
    created = []
    for rel_path, content in files.items():
        path = target_dir / rel_path
        path.write_bytes(content)
        created.append(path)
    return created
