"""HTTP service exposing the experiment registry.

The CLI talks to this app (in-process by default); remote deployments can
serve it with uvicorn.  Artifact contents travel in the response body so a
thin client can persist them without sharing a filesystem with the server.
"""
from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__, experiments, vls


class ExperimentRequest(BaseModel):
    experiment: str
    n: int | None = None
    q_grid: list[int] = Field(default=[10, 100, 1000, 10000])
    trials: int = 75
    shots: int | None = None
    seed: int = 7
    restarts: int | None = None
    iterations: int | None = None
    layers: int | None = None
    cost_mode: str | None = None
    gradient_mode: str = vls.GRAD_ADJOINT
    optimizer: str = vls.OPT_NCG
    multipliers: list[float] = Field(default=[10.0, 100.0, 1000.0, 10000.0])
    sizes: list[int] = Field(default=[128, 512])
    instances: int = 20

    def to_config(self) -> experiments.ExperimentConfig:
        return experiments.ExperimentConfig(
            experiment=self.experiment,
            n=self.n,
            q_grid=tuple(self.q_grid),
            trials=self.trials,
            shots=self.shots,
            seed=self.seed,
            restarts=self.restarts,
            iterations=self.iterations,
            layers=self.layers,
            cost_mode=self.cost_mode,
            gradient_mode=self.gradient_mode,
            optimizer=self.optimizer,
            multipliers=tuple(self.multipliers),
            sizes=tuple(self.sizes),
            instances=self.instances,
        )


class ValidationResponse(BaseModel):
    valid: bool
    diagnostics: list[str]


class ExperimentResponse(BaseModel):
    manifest: dict
    checks: dict[str, bool]
    ok: bool
    artifacts: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str
    experiments: list[str]


def create_app() -> FastAPI:
    app = FastAPI(title="qfracflow", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(
            status="ok", version=__version__, experiments=list(experiments.EXPERIMENTS)
        )

    @app.post("/config/validate", response_model=ValidationResponse)
    def validate(request: ExperimentRequest) -> ValidationResponse:
        diagnostics = experiments.validate(request.to_config())
        return ValidationResponse(valid=not diagnostics, diagnostics=diagnostics)

    @app.post("/experiments/run", response_model=ExperimentResponse)
    def run(request: ExperimentRequest) -> ExperimentResponse:
        config = request.to_config()
        diagnostics = experiments.validate(config)
        if diagnostics:
            raise HTTPException(status_code=422, detail=diagnostics)
        result = experiments.run(config)
        return ExperimentResponse(
            manifest=result.manifest,
            checks=result.checks,
            ok=result.ok,
            artifacts=result.artifacts,
        )

    return app


app = create_app()
