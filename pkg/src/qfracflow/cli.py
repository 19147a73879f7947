"""Command-line client for the experiment service.

By default the client runs the HTTP app in-process (no server needed); pass
--server-url to target a remote instance started with `qfracflow serve`.
Config files are flat INI with a single [run] section mirroring the flags.
"""
from __future__ import annotations

import configparser
import json
import os
import pathlib
import sys

import click
import httpx

DEFAULT_OUT_ENV = "QFRACFLOW_OUT_DIR"

_LIST_KEYS = {"q_grid", "multipliers", "sizes"}
_INT_KEYS = {"n", "trials", "shots", "seed", "restarts", "iterations", "layers", "instances"}


def _client(server_url: str | None):
    if server_url:
        return httpx.Client(base_url=server_url, timeout=3600.0)
    import warnings

    with warnings.catch_warnings():
        # some starlette builds warn about their bundled test client shim
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app, raise_server_exceptions=False)


def _parse_list(raw: str, cast):
    return [cast(part) for part in raw.split(",") if part.strip()]


def _load_config_file(path: str) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise click.ClickException(f"config file not found: {path}")
    if "run" not in parser:
        raise click.ClickException("config file must contain a [run] section")
    payload: dict = {}
    for key, raw in parser["run"].items():
        if key in _LIST_KEYS:
            cast = int if key in ("q_grid", "sizes") else float
            payload[key] = _parse_list(raw, cast)
        elif key in _INT_KEYS:
            payload[key] = int(raw)
        else:
            payload[key] = raw
    return payload


def _post(client: httpx.Client, path: str, payload: dict) -> httpx.Response:
    try:
        return client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"request failed: {exc}")


@click.group()
def main() -> None:
    """Experiment runner for quantum linear-solver simulations."""


@main.command()
@click.option("--experiment", required=False, help="Experiment name from the registry.")
@click.option("--config", "config_file", type=click.Path(), help="INI config file with a [run] section.")
@click.option("--n", type=int, default=None, help="Node count (power of two).")
@click.option("--q", "q_grid", default=None, help="Comma-separated q values for sso-sweep.")
@click.option("--trials", type=int, default=None)
@click.option("--shots", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--iterations", type=int, default=None)
@click.option("--layers", type=int, default=None)
@click.option("--cost-mode", default=None)
@click.option("--sizes", default=None, help="Comma-separated node counts for vls-scaling.")
@click.option("--multipliers", default=None, help="Comma-separated right-branch multipliers.")
@click.option("--instances", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None, help="Output directory.")
@click.option("--server-url", default=None, help="Remote service URL (default: in-process).")
def run(experiment, config_file, n, q_grid, trials, shots, seed, restarts,
        iterations, layers, cost_mode, sizes, multipliers, instances,
        out_dir, server_url):
    """Run one experiment and write its result files and manifest."""
    payload: dict = {}
    if config_file:
        payload.update(_load_config_file(config_file))
    if experiment:
        payload["experiment"] = experiment
    if "experiment" not in payload:
        raise click.ClickException("an experiment name is required (flag or config file)")
    overrides = {
        "n": n,
        "trials": trials,
        "shots": shots,
        "seed": seed,
        "restarts": restarts,
        "iterations": iterations,
        "layers": layers,
        "cost_mode": cost_mode,
        "instances": instances,
    }
    payload.update({k: v for k, v in overrides.items() if v is not None})
    if q_grid is not None:
        payload["q_grid"] = _parse_list(q_grid, int)
    if sizes is not None:
        payload["sizes"] = _parse_list(sizes, int)
    if multipliers is not None:
        payload["multipliers"] = _parse_list(multipliers, float)

    out = pathlib.Path(out_dir or os.environ.get(DEFAULT_OUT_ENV, "results"))
    with _client(server_url) as client:
        response = _post(client, "/experiments/run", payload)
    if response.status_code == 422:
        detail = response.json().get("detail", [])
        if isinstance(detail, list):
            lines = [d if isinstance(d, str) else json.dumps(d) for d in detail]
        else:
            lines = [str(detail)]
        click.echo("invalid config:", err=True)
        for line in lines:
            click.echo(f"  - {line}", err=True)
        sys.exit(2)
    if response.status_code != 200:
        raise click.ClickException(f"server error {response.status_code}: {response.text}")

    body = response.json()
    target = out / payload["experiment"]
    target.mkdir(parents=True, exist_ok=True)
    for name, content in sorted(body["artifacts"].items()):
        (target / name).write_text(content)
    (target / "manifest.json").write_text(json.dumps(body["manifest"], indent=2))
    for name, passed in body["checks"].items():
        click.echo(f"[{'PASS' if passed else 'FAIL'}] {name}")
    click.echo(f"wrote {len(body['artifacts']) + 1} files to {target}")
    if not body["ok"]:
        sys.exit(1)


@main.command()
@click.argument("config_file", type=click.Path())
@click.option("--server-url", default=None, help="Remote service URL (default: in-process).")
def validate(config_file, server_url):
    """Schema-check a config file without running anything."""
    payload = _load_config_file(config_file)
    if "experiment" not in payload:
        click.echo("  - experiment: missing required key", err=True)
        sys.exit(2)
    with _client(server_url) as client:
        response = _post(client, "/config/validate", payload)
    if response.status_code == 422:
        # pydantic-level rejection (wrong types); surface its messages
        for item in response.json().get("detail", []):
            loc = ".".join(str(p) for p in item.get("loc", []) if p != "body")
            click.echo(f"  - {loc}: {item.get('msg')}", err=True)
        sys.exit(2)
    body = response.json()
    if body["valid"]:
        click.echo("config is valid")
        return
    for line in body["diagnostics"]:
        click.echo(f"  - {line}", err=True)
    sys.exit(2)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("qfracflow.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
