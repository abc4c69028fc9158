"""Threshold / connected-components object detector.

Binarizes a grayscale image at a strict intensity threshold, groups
foreground pixels by 4-connectivity, and reports one detection per
component that reaches the minimum area: a normalized bounding box plus
the component's mean intensity as its probability.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import IoDescriptor, ModelMetadata, ModelWrapper
from .pgm import GrayImage

OUTPUT_SCHEMA_ID = "detection.v1"

DEFAULT_THRESHOLD = 0.5
DEFAULT_MIN_AREA = 4


@dataclass(frozen=True)
class Detection:
    """One detected object: box is [ymin, xmin, ymax, xmax], all
    normalized to [0, 1]."""

    label_id: str
    label: str
    probability: float
    detection_box: tuple[float, float, float, float]

    def __post_init__(self):
        ymin, xmin, ymax, xmax = self.detection_box
        if not (0.0 <= self.probability <= 1.0):
            raise ValueError("probability must lie in [0, 1]")
        if ymin > ymax or xmin > xmax:
            raise ValueError("box min coordinates must not exceed max coordinates")
        if any(c < 0.0 or c > 1.0 for c in self.detection_box):
            raise ValueError("box coordinates must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "label_id": self.label_id,
            "label": self.label,
            "probability": self.probability,
            "detection_box": list(self.detection_box),
        }


def detect_components(
    image: GrayImage,
    threshold: float = DEFAULT_THRESHOLD,
    min_area: int = DEFAULT_MIN_AREA,
) -> list[Detection]:
    """Detect connected bright regions.

    Foreground is intensity strictly greater than *threshold* (a pixel
    exactly at the threshold is background). Components are 4-connected;
    those smaller than *min_area* pixels are dropped. Each survivor
    yields box [r0/h, c0/w, (r1+1)/h, (c1+1)/w] from its pixel bounding
    box and probability = mean original intensity over its pixels
    (math.fsum, so the value is independent of visit order). Results are
    sorted by probability descending, ties by (ymin, xmin) ascending.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
    if min_area < 1:
        raise ValueError(f"min_area must be >= 1, got {min_area}")

    w, h = image.width, image.height
    data = image.data
    visited = bytearray(w * h)
    detections = []
    for start in range(w * h):
        if visited[start] or data[start] <= threshold:
            continue
        # Flood-fill one component with an explicit stack.
        stack = [start]
        visited[start] = 1
        pixels = []
        while stack:
            idx = stack.pop()
            pixels.append(idx)
            r, c = divmod(idx, w)
            for nr, nc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
                if 0 <= nr < h and 0 <= nc < w:
                    nidx = nr * w + nc
                    if not visited[nidx] and data[nidx] > threshold:
                        visited[nidx] = 1
                        stack.append(nidx)
        if len(pixels) < min_area:
            continue
        rows = [idx // w for idx in pixels]
        cols = [idx % w for idx in pixels]
        r0, r1 = min(rows), max(rows)
        c0, c1 = min(cols), max(cols)
        probability = math.fsum(data[idx] for idx in pixels) / len(pixels)
        detections.append(
            Detection(
                label_id="1",
                label="object",
                probability=probability,
                detection_box=(r0 / h, c0 / w, (r1 + 1) / h, (c1 + 1) / w),
            )
        )
    detections.sort(key=lambda d: (-d.probability, d.detection_box[0], d.detection_box[1]))
    return detections


class ObjectDetector(ModelWrapper):
    """Image wrapper around the connected-components detector."""

    def __init__(
        self,
        metadata: ModelMetadata,
        threshold: float = DEFAULT_THRESHOLD,
        min_area: int = DEFAULT_MIN_AREA,
    ):
        if not 0.0 <= threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {threshold}")
        if min_area < 1:
            raise ValueError(f"min_area must be >= 1, got {min_area}")
        self.metadata = metadata
        self.io = IoDescriptor(
            input_kind="image",
            output_schema_id=OUTPUT_SCHEMA_ID,
            accepted_content_types=("image/x-portable-graymap", "multipart/form-data"),
        )
        self._threshold = threshold
        self._min_area = min_area

    def pre_process(self, raw: GrayImage) -> GrayImage:
        if not isinstance(raw, GrayImage):
            raise TypeError("detector input must be a decoded grayscale image")
        return raw

    def predict(self, model_input: GrayImage) -> list[Detection]:
        return detect_components(model_input, self._threshold, self._min_area)

    def post_process(self, raw_output: Sequence[Detection]) -> list:
        # A single image instance: one array holding all its detections.
        return [[d.to_dict() for d in raw_output]]


def load_params(path: str | Path) -> tuple[float, int]:
    """Load ``{"threshold": number, "min_area": integer}`` detector params.

    ValueError messages name the file and field, mirroring the sentiment
    weights loader.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"{path}: cannot read params file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: params file must be a JSON object")
    threshold = raw.get("threshold")
    if isinstance(threshold, bool) or not isinstance(threshold, (int, float)):
        raise ValueError(f"{path}: field 'threshold' must be a number")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"{path}: field 'threshold' must lie in [0, 1]")
    min_area = raw.get("min_area")
    if isinstance(min_area, bool) or not isinstance(min_area, int):
        raise ValueError(f"{path}: field 'min_area' must be an integer")
    if min_area < 1:
        raise ValueError(f"{path}: field 'min_area' must be >= 1")
    return float(threshold), min_area
