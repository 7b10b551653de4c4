"""HTTP service exposing the analysis handlers.

Run with `uvicorn monolab.service:app` or `monolab serve`. Every endpoint
accepts and returns the same payloads the CLI produces, so the CLI can act
as a remote client via its --server flag.
"""

from __future__ import annotations

import json
import pathlib

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__, api
from .errors import (
    BranchError,
    ConfigError,
    DomainError,
    InvalidParameter,
    MonolabError,
    NonPositiveValue,
    ParseError,
    PoleError,
)

app = FastAPI(
    title="monolab",
    version=__version__,
    description="Derivative-sign laboratory for monotonicity classes "
                "of power-exponential functions",
)

_BAD_REQUEST = (ParseError, ConfigError, InvalidParameter)
_UNPROCESSABLE = (DomainError, PoleError, BranchError, NonPositiveValue)


@app.exception_handler(MonolabError)
async def monolab_error_handler(_: Request, exc: MonolabError):
    status = 400 if isinstance(exc, _BAD_REQUEST) else 422 if isinstance(exc, _UNPROCESSABLE) else 500
    return JSONResponse(status_code=status,
                        content={"error": type(exc).__name__, "detail": str(exc)})


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


_SCHEMA_PATH = pathlib.Path(__file__).resolve().parents[2] / "schemas" / "report.json"


@app.get("/schema")
def schema() -> JSONResponse:
    """The JSON schema every report endpoint's payload validates against."""
    if not _SCHEMA_PATH.is_file():  # non-repo install without the schemas tree
        return JSONResponse(status_code=404,
                            content={"error": "SchemaUnavailable",
                                     "detail": "schemas/report.json not found"})
    return JSONResponse(json.loads(_SCHEMA_PATH.read_text(encoding="utf-8")))


@app.post("/check", response_model=api.CheckResponse)
def check(request: api.CheckRequest):
    return api.run_check(request)


@app.post("/classify", response_model=api.RegionReportModel)
def classify(request: api.ClassifyRequest):
    return api.run_classify(request)


@app.post("/region-map", response_class=PlainTextResponse)
def region_map(request: api.RegionMapRequest) -> PlainTextResponse:
    return PlainTextResponse(api.run_region_map(request), media_type="text/csv")


@app.post("/bruno", response_model=api.BrunoResponse)
def bruno(request: api.BrunoRequest):
    return api.run_bruno(request)


@app.post("/verify-integrals", response_model=api.IntegralReportModel)
def verify_integrals(request: api.VerifyIntegralsRequest):
    return api.run_verify_integrals(request)


@app.post("/verify-theorems", response_model=api.TheoremReportModel)
def verify_theorems(request: api.VerifyTheoremsRequest):
    return api.run_verify_theorems(request)


@app.post("/shifted-cm")
def shifted_cm(request: api.ShiftedCmRequest):
    return api.run_shifted_cm(request)
