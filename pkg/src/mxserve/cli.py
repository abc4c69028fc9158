"""The ``mx`` command line tool.

Workflow: ``mx new`` scaffolds a model service, ``mx serve`` runs it,
``mx registry serve`` runs the exchange, ``mx registry register`` puts a
running service into the catalog, and ``mx validate`` checks any live
service against the standardized contract.
"""

from __future__ import annotations

import json
import logging
import signal
import sys
import threading
from pathlib import Path

import click
import requests

from .bundle import load_bundle
from .conformance import validate_service
from .registry import Registry, RegistryConfig
from .registry_service import RegistryService
from .scaffold import TEMPLATES, ScaffoldError, scaffold
from .service import ModelService, ServiceConfig


def _setup_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def _run_until_interrupted(stop_callback):
    """Block until SIGINT/SIGTERM, then shut down gracefully."""
    stop_event = threading.Event()
    previous = signal.signal(signal.SIGTERM, lambda *_: stop_event.set())
    try:
        while not stop_event.wait(0.2):
            pass
    except KeyboardInterrupt:
        pass
    finally:
        signal.signal(signal.SIGTERM, previous)
        stop_callback()


@click.group()
@click.version_option(package_name="mxserve")
def main():
    """Serve predictive models behind one standardized REST contract."""


@main.command("new")
@click.argument("template", type=click.Choice(sorted(TEMPLATES)))
@click.argument("model_id")
@click.argument("directory", required=False, type=click.Path(path_type=Path))
def new(template: str, model_id: str, directory: Path | None):
    """Scaffold a new model service from TEMPLATE under DIRECTORY
    (default ./MODEL_ID)."""
    target = directory if directory is not None else Path(model_id)
    try:
        created = scaffold(template, model_id, target)
    except ScaffoldError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"scaffolded {template} service '{model_id}' in {target}")
    for path in created:
        click.echo(f"  {path}")
    click.echo(f"run it with: mx serve --model-dir {target}")


@main.command()
@click.option("--model-dir", envvar="MODEL_DIR", required=True, type=click.Path(path_type=Path))
@click.option("--port", envvar="PORT", type=int, default=None, help="Default: service.json port, else 5000.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--max-body-bytes", type=int, default=None, help="Request body cap in bytes.")
@click.option("--log-level", default=None, type=click.Choice(["debug", "info", "warning", "error"]))
def serve(model_dir: Path, port: int | None, host: str, max_body_bytes: int | None, log_level: str | None):
    """Serve the model in MODEL_DIR behind the standard endpoint set."""
    try:
        bundle = load_bundle(model_dir)
        config = ServiceConfig(
            host=host,
            port=port if port is not None else (bundle.port or 5000),
            model_dir=model_dir,
            max_body_bytes=max_body_bytes if max_body_bytes is not None else bundle.max_body_bytes,
            log_level=log_level or bundle.log_level,
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))
    _setup_logging(config.log_level)
    service = ModelService(bundle.wrapper, config)
    try:
        service.start()
    except OSError as exc:
        raise click.ClickException(f"cannot bind {config.bind_address}: {exc}")
    click.echo(f"serving model '{bundle.wrapper.metadata.id}' — listening on {service.url}")
    sys.stdout.flush()
    _run_until_interrupted(service.stop)


@main.group()
def registry():
    """Run or talk to the model exchange."""


@registry.command("serve")
@click.option("--store", "store_path", required=True, type=click.Path(path_type=Path))
@click.option("--port", envvar="PORT", type=int, default=5100, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--poll-interval", type=float, default=30.0, show_default=True)
@click.option("--failure-threshold", type=int, default=3, show_default=True)
@click.option("--probe-timeout", type=float, default=5.0, show_default=True)
@click.option("--log-level", default="info", type=click.Choice(["debug", "info", "warning", "error"]))
def registry_serve(store_path, port, host, poll_interval, failure_threshold, probe_timeout, log_level):
    """Run the exchange: catalog, health poller, and prediction proxy."""
    _setup_logging(log_level)
    try:
        config = RegistryConfig(
            poll_interval=poll_interval,
            failure_threshold=failure_threshold,
            probe_timeout=probe_timeout,
            store_path=store_path,
        )
        reg = Registry(config)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    service = RegistryService(reg, host=host, port=port)
    try:
        service.start()
    except OSError as exc:
        raise click.ClickException(f"cannot bind {host}:{port}: {exc}")
    click.echo(f"registry with {len(reg.list_models())} model(s) — listening on {service.url}")
    sys.stdout.flush()
    _run_until_interrupted(service.stop)


@registry.command("register")
@click.argument("model_id")
@click.argument("url")
@click.option(
    "--registry",
    "registry_url",
    envvar="REGISTRY_URL",
    default="http://127.0.0.1:5100",
    show_default=True,
)
def registry_register(model_id: str, url: str, registry_url: str):
    """Register the model service at URL under MODEL_ID."""
    endpoint = registry_url.rstrip("/") + "/v1/models"
    try:
        response = requests.post(endpoint, json={"id": model_id, "url": url}, timeout=10)
    except requests.RequestException as exc:
        raise click.ClickException(f"cannot reach registry at {registry_url}: {exc}")
    if response.status_code != 201:
        try:
            message = response.json()["error"]["message"]
        except (ValueError, KeyError, TypeError):
            message = response.text[:200]
        raise click.ClickException(f"registration failed (HTTP {response.status_code}): {message}")
    record = response.json()
    click.echo(f"registered '{record['id']}' at {record['url']} (health: {record['health']})")


@main.command()
@click.argument("url")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@click.option("--timeout", type=float, default=5.0, show_default=True)
def validate(url: str, as_json: bool, timeout: float):
    """Check the live service at URL for contract conformance.

    Exits 0 when every check passes, 1 otherwise."""
    report = validate_service(url, timeout=timeout)
    if as_json:
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(report.to_text())
    sys.exit(0 if report.passed else 1)
