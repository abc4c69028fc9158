"""OpenAPI 3.0 document builder.

Every model service publishes a machine-readable description of its
endpoint set at /swagger.json, generated from the model's metadata and
io descriptor. The document lists the three model-facing paths
(/model/metadata, /model/predict, /health); /swagger.json itself is not
self-listed.
"""

from __future__ import annotations

from .core import IoDescriptor, ModelMetadata, validate_metadata

# Per-instance prediction value schemas, keyed by output_schema_id.
# Unknown ids fall back to a free-form object.
OUTPUT_SCHEMAS = {
    "sentiment.v1": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["positive", "negative"],
            "properties": {
                "positive": {"type": "number", "minimum": 0, "maximum": 1},
                "negative": {"type": "number", "minimum": 0, "maximum": 1},
            },
        },
    },
    "detection.v1": {
        "type": "array",
        "items": {
            "type": "object",
            "required": ["label_id", "label", "probability", "detection_box"],
            "properties": {
                "label_id": {"type": "string"},
                "label": {"type": "string"},
                "probability": {"type": "number", "minimum": 0, "maximum": 1},
                "detection_box": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0, "maximum": 1},
                    "minItems": 4,
                    "maxItems": 4,
                    "description": "[ymin, xmin, ymax, xmax], normalized",
                },
            },
        },
    },
}

_METADATA_SCHEMA = {
    "type": "object",
    "required": ["id", "name", "description", "model_type", "license", "source"],
    "properties": {
        "id": {"type": "string", "pattern": "^[a-z0-9][a-z0-9-]{0,63}$"},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "model_type": {"type": "string"},
        "license": {"type": "string"},
        "source": {"type": "string"},
    },
}

_ERROR_ENVELOPE_SCHEMA = {
    "type": "object",
    "required": ["status", "error"],
    "properties": {
        "status": {"type": "string", "enum": ["error"]},
        "error": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {
                "code": {"type": "integer"},
                "message": {"type": "string"},
            },
        },
    },
}


def _request_schema_for(content_type: str) -> dict:
    if content_type == "application/json":
        return {
            "type": "object",
            "required": ["text"],
            "properties": {
                "text": {
                    "type": "array",
                    "items": {"type": "string"},
                    "minItems": 1,
                    "description": "Batch of text instances",
                }
            },
        }
    if content_type == "multipart/form-data":
        return {
            "type": "object",
            "required": ["image"],
            "properties": {"image": {"type": "string", "format": "binary"}},
        }
    return {"type": "string", "format": "binary"}


def build_openapi(metadata: ModelMetadata, io: IoDescriptor) -> dict:
    """Build the service's OpenAPI 3.0 document as a JSON-ready dict.

    Raises ValueError when the metadata fails validation; documents the
    predict request body under every accepted content type.
    """
    violations = validate_metadata(metadata)
    if violations:
        raise ValueError("cannot build API document for invalid metadata: " + "; ".join(violations))

    output_schema = OUTPUT_SCHEMAS.get(
        io.output_schema_id,
        {"type": "object", "description": f"prediction value ({io.output_schema_id})"},
    )
    ok_envelope_schema = {
        "type": "object",
        "required": ["status", "predictions"],
        "properties": {
            "status": {"type": "string", "enum": ["ok"]},
            "predictions": {
                "type": "array",
                "items": {"$ref": f"#/components/schemas/{io.output_schema_id}"},
                "description": "One per-instance prediction value per input instance, in order",
            },
        },
    }

    return {
        "openapi": "3.0.3",
        "info": {
            "title": metadata.name,
            "description": metadata.description,
            "version": "1.0.0",
            "license": {"name": metadata.license},
            "x-model-id": metadata.id,
            "x-model-type": metadata.model_type,
        },
        "paths": {
            "/model/metadata": {
                "get": {
                    "operationId": "getModelMetadata",
                    "summary": "Model identity card",
                    "responses": {
                        "200": {
                            "description": "Model metadata",
                            "content": {
                                "application/json": {
                                    "schema": {"$ref": "#/components/schemas/ModelMetadata"}
                                }
                            },
                        }
                    },
                }
            },
            "/model/predict": {
                "post": {
                    "operationId": "predict",
                    "summary": "Run inference on a batch of instances",
                    "requestBody": {
                        "required": True,
                        "content": {
                            content_type: {"schema": _request_schema_for(content_type)}
                            for content_type in io.accepted_content_types
                        },
                    },
                    "responses": {
                        "200": {
                            "description": "Prediction envelope",
                            "content": {
                                "application/json": {
                                    "schema": {"$ref": "#/components/schemas/PredictionEnvelope"}
                                }
                            },
                        },
                        "default": {
                            "description": "Error envelope; HTTP status equals error.code",
                            "content": {
                                "application/json": {
                                    "schema": {"$ref": "#/components/schemas/ErrorEnvelope"}
                                }
                            },
                        },
                    },
                }
            },
            "/health": {
                "get": {
                    "operationId": "health",
                    "summary": "Liveness and readiness probe",
                    "responses": {
                        "200": {"description": 'Serving; body {"status":"ok"}'},
                        "503": {"description": "Started but model not yet loaded"},
                    },
                }
            },
        },
        "components": {
            "schemas": {
                "ModelMetadata": _METADATA_SCHEMA,
                "PredictionEnvelope": ok_envelope_schema,
                "ErrorEnvelope": _ERROR_ENVELOPE_SCHEMA,
                io.output_schema_id: output_schema,
            }
        },
    }
