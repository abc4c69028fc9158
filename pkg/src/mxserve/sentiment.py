"""Bag-of-words linear sentiment classifier.

A deliberately small, fully deterministic text model that still exercises
the whole wrapper contract: tokenize, score with a sparse vocabulary of
per-token weights, and emit ``{"positive": p, "negative": 1 - p}`` per
instance through a sigmoid.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .core import IoDescriptor, ModelMetadata, ModelWrapper

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")

OUTPUT_SCHEMA_ID = "sentiment.v1"


def tokenize(text: str) -> list[str]:
    """Split *text* into lowercased maximal runs of ASCII alphanumerics.
    Everything else (punctuation, whitespace, non-ASCII) separates tokens."""
    return [run.lower() for run in _TOKEN_RE.findall(text)]


@dataclass(frozen=True)
class SentimentWeights:
    """Sparse linear model: token -> weight, plus a bias term."""

    vocab: Mapping[str, float]
    bias: float = 0.0

    def __post_init__(self):
        for token in self.vocab:
            if not token or token != token.lower() or any(c.isspace() for c in token):
                raise ValueError(
                    f"vocab token {token!r} must be lowercase, non-empty, and whitespace-free"
                )


@dataclass(frozen=True)
class SentimentScore:
    positive: float
    negative: float

    def __post_init__(self):
        if not (0.0 <= self.positive <= 1.0 and 0.0 <= self.negative <= 1.0):
            raise ValueError("scores must lie in [0, 1]")
        if abs(self.positive + self.negative - 1.0) > 1e-9:
            raise ValueError("positive + negative must equal 1")

    def to_dict(self) -> dict:
        return {"positive": self.positive, "negative": self.negative}


def _sigmoid(z: float) -> float:
    # Split on sign so exp never overflows.
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def sentiment_predict(
    weights: SentimentWeights, instances: Sequence[Sequence[str]]
) -> list[SentimentScore]:
    """Score each token list: z = bias + sum of token weights (missing
    tokens contribute 0, repeats count with multiplicity), positive =
    sigmoid(z), negative = 1 - positive."""
    scores = []
    for tokens in instances:
        z = weights.bias + sum(weights.vocab.get(token, 0.0) for token in tokens)
        positive = _sigmoid(z)
        scores.append(SentimentScore(positive=positive, negative=1.0 - positive))
    return scores


class SentimentClassifier(ModelWrapper):
    """json_text wrapper around the linear model."""

    def __init__(self, metadata: ModelMetadata, weights: SentimentWeights):
        self.metadata = metadata
        self.io = IoDescriptor(
            input_kind="json_text",
            output_schema_id=OUTPUT_SCHEMA_ID,
            accepted_content_types=("application/json",),
        )
        self._weights = weights

    def pre_process(self, raw: Sequence[str]) -> list[list[str]]:
        return [tokenize(text) for text in raw]

    def predict(self, model_input: Sequence[Sequence[str]]) -> list[SentimentScore]:
        return sentiment_predict(self._weights, model_input)

    def post_process(self, raw_output: Sequence[SentimentScore]) -> list:
        # One single-element array of score objects per instance.
        return [[score.to_dict()] for score in raw_output]


def load_weights(path: str | Path) -> SentimentWeights:
    """Load a ``{"vocab": {token: weight}, "bias": number}`` JSON file.

    Failures raise ValueError with a message naming the file and field,
    so service startup diagnostics stay actionable.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"{path}: cannot read weights file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: weights file must be a JSON object")
    vocab = raw.get("vocab")
    if not isinstance(vocab, dict):
        raise ValueError(f"{path}: field 'vocab' must be an object mapping tokens to numbers")
    for token, weight in vocab.items():
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise ValueError(f"{path}: field 'vocab': weight for {token!r} must be a number")
    bias = raw.get("bias")
    if isinstance(bias, bool) or not isinstance(bias, (int, float)):
        raise ValueError(f"{path}: field 'bias' must be a number")
    try:
        return SentimentWeights(vocab={t: float(w) for t, w in vocab.items()}, bias=float(bias))
    except ValueError as exc:
        raise ValueError(f"{path}: field 'vocab': {exc}") from exc
