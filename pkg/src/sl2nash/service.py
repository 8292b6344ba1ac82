"""FastAPI wrapper around the verification suites.

The service is the single execution surface: the CLI builds the same request
model and either POSTs it to a running instance or calls the handler directly
in-process.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .suites import SCHEMA_VERSION, SUITE_NAMES, SuiteConfig, run_suite

app = FastAPI(title="sl2nash verification service", version=__version__)


class SuiteRequest(BaseModel):
    suite: str = "all"
    seed: int = 0
    tol_scale: float = Field(default=1.0, gt=0)
    grid: int = Field(default=129, ge=17)
    samples: int = Field(default=200, ge=1)
    parallel: bool = True


class CheckResult(BaseModel):
    suite: str
    name: str
    tag: str
    measured: float
    tolerance: float
    passed: bool
    note: str | None = None


class SuiteReport(BaseModel):
    schema_version: int = Field(alias="schema")
    config: dict
    checks: list[CheckResult]
    counts: dict
    passed: bool
    probe_reports: list[dict] | None = None
    iteration_report: dict | None = None

    model_config = {"populate_by_name": True}


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__, "schema": SCHEMA_VERSION}


@app.get("/suites")
def list_suites() -> dict:
    return {"suites": list(SUITE_NAMES) + ["all"],
            "defaults": SuiteRequest().model_dump()}


@app.post("/run", response_model=SuiteReport, response_model_exclude_none=True,
          response_model_by_alias=True)
def run(request: SuiteRequest) -> dict:
    try:
        cfg = SuiteConfig(suite=request.suite, seed=request.seed,
                          tol_scale=request.tol_scale, grid=request.grid,
                          samples=request.samples, parallel=request.parallel)
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    return run_suite(cfg)


def run_in_process(request: SuiteRequest) -> dict:
    """The CLI's default execution path: same validation, no HTTP."""
    cfg = SuiteConfig(suite=request.suite, seed=request.seed,
                      tol_scale=request.tol_scale, grid=request.grid,
                      samples=request.samples, parallel=request.parallel)
    return run_suite(cfg)
