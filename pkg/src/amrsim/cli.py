"""Command-line client for the amrsim service.

Commands talk to the HTTP API; by default an in-process instance of the
app serves the request, `--server URL` targets a running instance.
Exit codes: 0 success, 1 usage/validation, 2 runtime failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .scenario import ScenarioError, load_scenario


class _ServiceClient:
    """Thin wrapper choosing between a remote server and the in-process app."""

    def __init__(self, server: str | None):
        if server is None:
            from starlette.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)
        else:
            self._client = httpx.Client(base_url=server, timeout=600.0)

    def post(self, path: str, payload: dict) -> httpx.Response:
        return self._client.post(path, json=payload)

    def close(self) -> None:
        self._client.close()


class CliFailure(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_scenario_arg(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        return load_scenario(path).model_dump()
    except FileNotFoundError:
        raise CliFailure(f"scenario file not found: {path}", 1)
    except ScenarioError as exc:
        raise CliFailure(str(exc), 1)


def _call(server: str | None, path: str, payload: dict) -> dict:
    client = _ServiceClient(server)
    try:
        response = client.post(path, payload)
        if response.status_code == 422:
            detail = response.json().get("detail", response.text)
            raise CliFailure(f"invalid request: {detail}", 1)
        if response.status_code != 200:
            raise CliFailure(f"simulation failed: HTTP {response.status_code} {response.text}", 2)
        return response.json()
    except httpx.HTTPError as exc:
        raise CliFailure(f"cannot reach server: {exc}", 2)
    finally:
        client.close()


def _write(path: str | None, content: str) -> None:
    if path is not None:
        Path(path).write_text(content, encoding="utf-8")


@click.group()
def cli() -> None:
    """Multipath-routing network simulator."""


@cli.command("run")
@click.option("--scenario", "scenario_path", type=str, default=None, help="Scenario JSON file.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--out", "out_path", type=str, default=None, help="Write the results CSV here.")
@click.option("--mode", type=click.Choice(["multipath", "single"]), default=None)
@click.option("--server", type=str, default=None, help="Remote service URL (default: in-process).")
def cmd_run(scenario_path, seed, out_path, mode, server) -> None:
    """Run one scenario and print a summary."""
    payload: dict = {"scenario": _load_scenario_arg(scenario_path)}
    if seed is not None:
        payload["seed"] = seed
    if mode is not None:
        payload["mode"] = mode
    body = _call(server, "/run", payload)
    _write(out_path, body["csv"])
    click.echo(body["summary"], nl=False)


def _parse_values(raw: str) -> list[float]:
    try:
        values = [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise CliFailure(f"values must be a comma-separated number list, got {raw!r}", 1)
    if not values:
        raise CliFailure("values list is empty", 1)
    if any(v <= 0 for v in values):
        raise CliFailure("values must be positive", 1)
    return values


@cli.command("sweep")
@click.option("--scenario", "scenario_path", type=str, default=None)
@click.option("--axis", required=True, help="Sweep axis: node_count or speed.")
@click.option("--values", required=True, help="Comma-separated axis values, e.g. 20,40,60.")
@click.option("--repetitions", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=str, default=None)
@click.option("--plot", "plot_path", type=str, default=None, help="Write an SVG chart here.")
@click.option("--mode", type=click.Choice(["multipath", "single"]), default=None)
@click.option("--server", type=str, default=None)
def cmd_sweep(scenario_path, axis, values, repetitions, seed, out_path, plot_path, mode, server) -> None:
    """Sweep node density or mobility and tabulate PDR / energy rate."""
    if axis not in ("node_count", "speed"):
        raise CliFailure(f"unknown axis {axis!r}; expected node_count or speed", 1)
    if repetitions < 1:
        raise CliFailure("repetitions must be >= 1", 1)
    payload: dict = {
        "scenario": _load_scenario_arg(scenario_path),
        "axis": axis,
        "values": _parse_values(values),
        "repetitions": repetitions,
        "include_plot": plot_path is not None,
    }
    if seed is not None:
        payload["seed"] = seed
    if mode is not None:
        payload["mode"] = mode
    body = _call(server, "/sweep", payload)
    _write(out_path, body["csv"])
    if plot_path is not None and body.get("svg"):
        _write(plot_path, body["svg"])
    click.echo(body["csv"], nl=False)


@cli.command("compare")
@click.option("--scenario", "scenario_path", type=str, default=None)
@click.option("--repetitions", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", type=str, default=None)
@click.option("--server", type=str, default=None)
def cmd_compare(scenario_path, repetitions, seed, out_path, server) -> None:
    """Multipath vs single-best-path on identical seeds."""
    if repetitions < 1:
        raise CliFailure("repetitions must be >= 1", 1)
    payload: dict = {"scenario": _load_scenario_arg(scenario_path), "repetitions": repetitions}
    if seed is not None:
        payload["seed"] = seed
    body = _call(server, "/compare", payload)
    _write(out_path, body["csv"])
    click.echo(body["csv"], nl=False)


@cli.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(host, port) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main(argv: list[str] | None = None) -> int:
    """Entry point returning the process exit code."""
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except CliFailure as exc:
        click.echo(f"error: {exc}", err=True)
        return exc.code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
