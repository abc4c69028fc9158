"""The exchange: a catalog of running model services.

The registry snapshots each service's metadata at registration, polls the
metadata endpoint to keep a health state per record, and persists the
catalog to a single JSON file (atomically replaced on every write).
Health is advisory: a record marked unhealthy is still proxied.

State machine (driven by metadata-endpoint probes):

* probe success  -> healthy, consecutive_failures reset to 0
* probe failure  -> consecutive_failures += 1; the record flips to
  unhealthy once the count reaches failure_threshold, below that the
  prior health (healthy or unknown) is retained
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import requests

from .core import ID_MAX_LEN, ID_RE, ModelMetadata, validate_metadata

logger = logging.getLogger("mxserve.registry")

STORE_VERSION = 1

HEALTH_STATES = ("unknown", "healthy", "unhealthy")


class RegistryError(Exception):
    """Base class for catalog mutation failures."""


class DuplicateModelError(RegistryError):
    pass


class UnknownModelError(RegistryError):
    pass


class RegistrationInvalid(RegistryError):
    """The id is malformed or does not match the service's metadata."""


class ProbeError(Exception):
    """The service could not be probed or is not serving valid metadata."""


@dataclass(frozen=True)
class RegistryConfig:
    poll_interval: float = 30.0
    failure_threshold: int = 3
    probe_timeout: float = 5.0
    store_path: Path | None = None

    def __post_init__(self):
        if self.poll_interval <= 0:
            raise ValueError(f"poll_interval must be positive, got {self.poll_interval}")
        if self.failure_threshold < 1:
            raise ValueError(f"failure_threshold must be >= 1, got {self.failure_threshold}")
        if self.probe_timeout <= 0:
            raise ValueError(f"probe_timeout must be positive, got {self.probe_timeout}")


@dataclass(frozen=True)
class ModelRecord:
    """One catalog entry: where a model service lives, what it said it
    was at the last successful probe, and how its health probe is doing."""

    id: str
    url: str
    metadata: ModelMetadata | None
    health: str = "unknown"
    consecutive_failures: int = 0
    last_checked: datetime | None = None

    def __post_init__(self):
        if self.health not in HEALTH_STATES:
            raise ValueError(f"health must be one of {HEALTH_STATES}, got {self.health!r}")
        if self.consecutive_failures < 0:
            raise ValueError("consecutive_failures must be >= 0")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "url": self.url,
            "metadata": self.metadata.to_dict() if self.metadata else None,
            "health": self.health,
            "consecutive_failures": self.consecutive_failures,
            "last_checked": self.last_checked.isoformat() if self.last_checked else None,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelRecord":
        metadata = raw.get("metadata")
        last_checked = raw.get("last_checked")
        return cls(
            id=raw["id"],
            url=raw["url"],
            metadata=ModelMetadata.from_dict(metadata) if metadata else None,
            health=raw.get("health", "unknown"),
            consecutive_failures=raw.get("consecutive_failures", 0),
            last_checked=datetime.fromisoformat(last_checked) if last_checked else None,
        )


def fetch_metadata(url: str, timeout: float) -> ModelMetadata:
    """Probe ``{url}/model/metadata`` and return validated metadata.

    Any failure mode (unreachable, timeout, non-200, unparseable body,
    schema violations) raises ProbeError: a service that is alive but not
    conforming counts as a failed probe.
    """
    endpoint = url.rstrip("/") + "/model/metadata"
    try:
        response = requests.get(endpoint, timeout=timeout)
    except requests.RequestException as exc:
        raise ProbeError(f"cannot reach {endpoint}: {exc}") from exc
    if response.status_code != 200:
        raise ProbeError(f"{endpoint} answered HTTP {response.status_code}")
    try:
        metadata = ModelMetadata.from_dict(response.json())
    except ValueError as exc:
        raise ProbeError(f"{endpoint} returned invalid metadata: {exc}") from exc
    violations = validate_metadata(metadata)
    if violations:
        raise ProbeError(f"{endpoint} returned invalid metadata: " + "; ".join(violations))
    return metadata


FetchFn = Callable[[str, float], ModelMetadata]


def poll_health(record: ModelRecord, config: RegistryConfig, fetch: FetchFn = fetch_metadata) -> ModelRecord:
    """Run one health probe against *record* and return the updated record.

    Success refreshes the metadata snapshot and resets the failure count;
    failures accumulate one at a time and flip health to unhealthy only at
    failure_threshold. A probe that returns metadata for a different id
    counts as a failure.
    """
    now = datetime.now(timezone.utc)
    try:
        metadata = fetch(record.url, config.probe_timeout)
        if metadata.id != record.id:
            raise ProbeError(f"metadata id {metadata.id!r} does not match record {record.id!r}")
    except ProbeError:
        failures = record.consecutive_failures + 1
        health = "unhealthy" if failures >= config.failure_threshold else record.health
        return replace(record, health=health, consecutive_failures=failures, last_checked=now)
    return replace(
        record, metadata=metadata, health="healthy", consecutive_failures=0, last_checked=now
    )


class Registry:
    """Thread-safe catalog with a background health poller.

    Mutations are serialized through one lock; probes run outside it so
    the poller never blocks request handling. ``on_poll``, when given, is
    called with each updated record after a poll sweep applies it
    (instrumentation hook; exceptions are logged and swallowed).
    """

    def __init__(
        self,
        config: RegistryConfig | None = None,
        fetch: FetchFn = fetch_metadata,
        on_poll: Callable[[ModelRecord], None] | None = None,
    ):
        self.config = config or RegistryConfig()
        self._fetch = fetch
        self._on_poll = on_poll
        self._records: dict[str, ModelRecord] = {}
        self._lock = threading.Lock()
        self._poller: threading.Thread | None = None
        self._stop = threading.Event()
        if self.config.store_path is not None:
            self._load()

    # -- catalog ----------------------------------------------------------

    def register(self, model_id: str, url: str) -> ModelRecord:
        """Register a service: probe it synchronously, snapshot metadata on
        success (health=healthy), or store health=unknown when the probe
        fails. The record is persisted before this returns."""
        if not ID_RE.fullmatch(model_id) or len(model_id) > ID_MAX_LEN:
            raise RegistrationInvalid(
                f"id {model_id!r} must match [a-z0-9][a-z0-9-]* and be 1-{ID_MAX_LEN} characters"
            )
        with self._lock:
            if model_id in self._records:
                raise DuplicateModelError(f"model {model_id!r} is already registered")
        try:
            metadata = self._fetch(url, self.config.probe_timeout)
        except ProbeError:
            record = ModelRecord(
                id=model_id,
                url=url,
                metadata=None,
                health="unknown",
                last_checked=datetime.now(timezone.utc),
            )
        else:
            if metadata.id != model_id:
                raise RegistrationInvalid(
                    f"service at {url} identifies as {metadata.id!r}, not {model_id!r}"
                )
            record = ModelRecord(
                id=model_id,
                url=url,
                metadata=metadata,
                health="healthy",
                last_checked=datetime.now(timezone.utc),
            )
        with self._lock:
            if model_id in self._records:
                raise DuplicateModelError(f"model {model_id!r} is already registered")
            self._records[model_id] = record
            self._save_locked()
        return record

    def deregister(self, model_id: str) -> ModelRecord:
        with self._lock:
            record = self._records.pop(model_id, None)
            if record is None:
                raise UnknownModelError(f"model {model_id!r} is not registered")
            self._save_locked()
        return record

    def get(self, model_id: str) -> ModelRecord:
        with self._lock:
            record = self._records.get(model_id)
        if record is None:
            raise UnknownModelError(f"model {model_id!r} is not registered")
        return record

    def list_models(self) -> list[ModelRecord]:
        with self._lock:
            return [self._records[k] for k in sorted(self._records)]

    # -- health polling ----------------------------------------------------

    def poll_once(self):
        """One sweep: probe every record and apply the state machine."""
        snapshot = self.list_models()
        updated_any = False
        for record in snapshot:
            updated = poll_health(record, self.config, self._fetch)
            with self._lock:
                if record.id not in self._records:
                    continue  # deregistered while probing
                self._records[record.id] = updated
            updated_any = True
            if self._on_poll is not None:
                try:
                    self._on_poll(updated)
                except Exception:
                    logger.exception("on_poll hook failed for %s", record.id)
        if updated_any:
            with self._lock:
                self._save_locked()

    def start_poller(self):
        if self._poller is not None:
            raise RuntimeError("poller already running")
        self._stop.clear()
        self._poller = threading.Thread(target=self._poll_loop, daemon=True)
        self._poller.start()

    def stop_poller(self):
        if self._poller is None:
            return
        self._stop.set()
        self._poller.join()
        self._poller = None

    def _poll_loop(self):
        while not self._stop.wait(self.config.poll_interval):
            try:
                self.poll_once()
            except Exception:
                logger.exception("health poll sweep failed")

    # -- persistence --------------------------------------------------------

    def _save_locked(self):
        path = self.config.store_path
        if path is None:
            return
        payload = {
            "version": STORE_VERSION,
            "models": [self._records[k].to_dict() for k in sorted(self._records)],
        }
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)

    def _load(self):
        path = self.config.store_path
        if path is None or not path.exists():
            return
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"{path}: cannot load registry store: {exc}") from exc
        if not isinstance(payload, dict) or payload.get("version") != STORE_VERSION:
            raise ValueError(f"{path}: unsupported store version")
        records = {}
        for raw in payload.get("models", []):
            record = ModelRecord.from_dict(raw)
            # Health is not trusted across restarts: probes re-establish it.
            records[record.id] = replace(
                record, health="unknown", consecutive_failures=0, last_checked=None
            )
        with self._lock:
            self._records = records
