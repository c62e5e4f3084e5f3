"""HTTP service wrapping the simulator: submit a scenario, get results back.

Scenarios travel inline in the request body, so the server needs no
filesystem access; responses carry the structured report plus the CSV
(and optionally SVG) artifacts ready to write to disk.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .reporting import compare_csv, results_csv, run_csv, run_summary, sweep_svg
from .scenario import Scenario, ScenarioError
from .simulator import SWEEP_AXES, run, sweep


class HealthResponse(BaseModel):
    status: Literal["ok"]
    version: str


class RunRequest(BaseModel):
    scenario: Scenario = Field(default_factory=Scenario)
    seed: int | None = None
    mode: Literal["multipath", "single"] | None = None


class RunResponse(BaseModel):
    report: dict
    csv: str
    summary: str


class SweepRequest(BaseModel):
    scenario: Scenario = Field(default_factory=Scenario)
    axis: Literal["node_count", "speed"]
    values: list[float] = Field(min_length=1)
    repetitions: int = Field(1, ge=1)
    seed: int | None = None
    mode: Literal["multipath", "single"] | None = None
    include_plot: bool = False


class SweepRowDoc(BaseModel):
    axis: str
    value: float
    pdr_mean: float
    pdr_std: float
    energy_rate_mean: float
    energy_rate_std: float
    control_means: dict[str, float]
    seed: int
    repetitions: int


class SweepResponse(BaseModel):
    rows: list[SweepRowDoc]
    csv: str
    svg: str | None = None


class CompareRequest(BaseModel):
    scenario: Scenario = Field(default_factory=Scenario)
    repetitions: int = Field(1, ge=1)
    seed: int | None = None


class CompareResponse(BaseModel):
    rows: list[dict]
    csv: str
    pdr_multipath_mean: float
    pdr_single_mean: float


def _to_config(scenario: Scenario, seed: int | None, mode: str | None = None):
    try:
        cfg = scenario.to_sim_config()
        if seed is not None:
            cfg = replace(cfg, seed=seed)
        if mode is not None:
            cfg = replace(cfg, mode=mode)
        return cfg
    except (ScenarioError, ValueError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def compare_modes(cfg, repetitions: int) -> list[dict]:
    """Run both distribution modes on identical derived seeds."""
    rows = []
    for rep in range(repetitions):
        seed = cfg.seed + rep
        multi = run(replace(cfg, seed=seed, mode="multipath"))
        single = run(replace(cfg, seed=seed, mode="single"))
        rows.append(
            {
                "repetition": rep,
                "seed": seed,
                "pdr_multipath": multi.pdr if multi.pdr is not None else 0.0,
                "pdr_single": single.pdr if single.pdr is not None else 0.0,
                "energy_rate_multipath": multi.avg_energy_consumption_rate,
                "energy_rate_single": single.avg_energy_consumption_rate,
            }
        )
    return rows


def create_app() -> FastAPI:
    app = FastAPI(title="amrsim", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.get("/scenario/default", response_model=Scenario)
    def default_scenario() -> Scenario:
        return Scenario()

    @app.post("/run", response_model=RunResponse)
    def run_endpoint(request: RunRequest) -> RunResponse:
        cfg = _to_config(request.scenario, request.seed, request.mode)
        try:
            report = run(cfg)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return RunResponse(
            report=report.to_dict(), csv=run_csv(report), summary=run_summary(report)
        )

    @app.post("/sweep", response_model=SweepResponse)
    def sweep_endpoint(request: SweepRequest) -> SweepResponse:
        if request.axis not in SWEEP_AXES:
            raise HTTPException(status_code=422, detail=f"unknown axis {request.axis!r}")
        cfg = _to_config(request.scenario, request.seed, request.mode)
        try:
            rows = sweep(cfg, request.axis, request.values, request.repetitions)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return SweepResponse(
            rows=[SweepRowDoc(**row.__dict__) for row in rows],
            csv=results_csv(rows),
            svg=sweep_svg(rows) if request.include_plot else None,
        )

    @app.post("/compare", response_model=CompareResponse)
    def compare_endpoint(request: CompareRequest) -> CompareResponse:
        cfg = _to_config(request.scenario, request.seed)
        try:
            rows = compare_modes(cfg, request.repetitions)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        multi_mean = sum(r["pdr_multipath"] for r in rows) / len(rows)
        single_mean = sum(r["pdr_single"] for r in rows) / len(rows)
        mean_row = {
            "repetition": "mean",
            "seed": cfg.seed,
            "pdr_multipath": multi_mean,
            "pdr_single": single_mean,
            "energy_rate_multipath": sum(r["energy_rate_multipath"] for r in rows) / len(rows),
            "energy_rate_single": sum(r["energy_rate_single"] for r in rows) / len(rows),
        }
        return CompareResponse(
            rows=rows + [mean_row],
            csv=compare_csv(rows + [mean_row]),
            pdr_multipath_mean=multi_mean,
            pdr_single_mean=single_mean,
        )

    return app


app = create_app()
