"""Request/response models and handlers shared by the HTTP service and CLI.

The CLI is a thin client over these handlers: it either calls them
in-process or posts the same request payloads to a running service, so both
paths produce byte-identical reports. All report floats are shortest
round-trip decimals of their double-precision values.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from . import suites
from .bruno import format_term_table, term_table
from .core import DEFAULT_PRECISION, Interval, as_fraction, fraction_str
from .errors import ConfigError
from .expr import Binding, parse
from .laplace import log_deriv2_integral, power_identity_check
from .mono import GridSpec, MonotoneClass, check_class
from .powerexp import ParamPoint, classify, shifted_cm_check

ParamValue = Union[int, float, str]


def _exact(value: ParamValue, label: str) -> Fraction:
    try:
        return as_fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ConfigError(f"cannot read {label} value {value!r}") from exc


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

class CheckRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    expr: str
    monotone_class: Literal["cm", "am", "lcm", "lam"] = Field(alias="class")
    interval: str
    max_order: int = Field(default=8, ge=0, le=16)
    precision: int = Field(default=DEFAULT_PRECISION, ge=64, le=4096)
    params: dict[str, ParamValue] = Field(default_factory=dict)
    grid_exponents: Optional[list[int]] = None  # sample offsets 10^j; None = default grid


class WitnessModel(BaseModel):
    order: int
    point: float
    value: float
    margin: float


class CheckResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: Literal["class_verdict"] = "class_verdict"
    monotone_class: str = Field(alias="class")
    interval: str
    max_order: int
    sample_count: int
    verdict: str
    witness: Optional[WitnessModel] = None
    failure_point: Optional[float] = None
    failure_reason: Optional[str] = None
    precision: int


def run_check(request: CheckRequest) -> dict:
    expression = parse(request.expr)
    interval = Interval.parse(request.interval)
    binding = Binding(dict(request.params), request.precision)
    grid = GridSpec(tuple(request.grid_exponents)) if request.grid_exponents else None
    verdict = check_class(expression, interval, MonotoneClass(request.monotone_class),
                          max_order=request.max_order, precision=request.precision,
                          binding=binding, grid=grid)
    payload = verdict.to_dict()
    payload["precision"] = request.precision
    return payload


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

class ClassifyRequest(BaseModel):
    alpha: ParamValue
    beta: ParamValue

    @field_validator("alpha")
    @classmethod
    def alpha_nonzero(cls, v):
        if _exact(v, "alpha") == 0:
            raise ValueError("alpha must be nonzero")
        return v


class RegionEntryModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    item: int
    subject: str
    monotone_class: str = Field(alias="class")
    interval: Optional[str] = None
    condition: str
    applicable: bool
    holds: Optional[bool] = None
    boundary: Optional[bool] = None


class RegionReportModel(BaseModel):
    kind: Literal["region_report"] = "region_report"
    alpha: float
    beta: float
    alpha_exact: str
    beta_exact: str
    entries: list[RegionEntryModel]


def run_classify(request: ClassifyRequest) -> dict:
    point = ParamPoint(_exact(request.alpha, "alpha"), _exact(request.beta, "beta"))
    return classify(point).to_dict()


# ---------------------------------------------------------------------------
# region-map (CSV)
# ---------------------------------------------------------------------------

class RegionMapRequest(BaseModel):
    alpha: ParamValue
    beta_range: str  # "lo:hi:step"


_SUBJECT_COLUMNS = [(item, subject) for item in (1, 2, 3, 4) for subject in ("f", "reciprocal")]

REGION_MAP_COLUMNS = ["alpha", "beta"] + [
    f"item{item}_{subject}_{field}"
    for item, subject in _SUBJECT_COLUMNS
    for field in ("holds", "boundary")
] + ["boundary"]


def _beta_range(text: str) -> list[Fraction]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"beta range must be 'lo:hi:step', got {text!r}")
    lo, hi, step = (_exact(p, "beta range") for p in parts)
    if step <= 0:
        raise ConfigError("beta range step must be positive")
    if hi < lo:
        raise ConfigError("beta range upper bound below lower bound")
    out = []
    b = lo
    while b <= hi:
        out.append(b)
        b += step
    return out


def _tri(value: bool | None) -> str:
    return "na" if value is None else ("true" if value else "false")


def run_region_map(request: RegionMapRequest) -> str:
    alpha = _exact(request.alpha, "alpha")
    if alpha == 0:
        raise ConfigError("alpha must be nonzero")
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC-4180: CRLF line ends, minimal quoting
    writer.writerow(REGION_MAP_COLUMNS)
    for beta in _beta_range(request.beta_range):
        report = classify(ParamPoint(alpha, beta))
        row = [fraction_str(alpha), fraction_str(beta)]
        any_boundary = False
        for item, subject in _SUBJECT_COLUMNS:
            entry = report.entry(item, subject)
            row.append(_tri(entry.holds))
            row.append(_tri(entry.boundary))
            any_boundary = any_boundary or bool(entry.boundary)
        row.append("true" if any_boundary else "false")
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# bruno term table
# ---------------------------------------------------------------------------

class BrunoRequest(BaseModel):
    n: int = Field(ge=1, le=40)


class BrunoTermModel(BaseModel):
    exponents: list[int]
    blocks: int
    coefficient: int
    text: str


class BrunoResponse(BaseModel):
    kind: Literal["bruno_table"] = "bruno_table"
    n: int
    count: int
    terms: list[BrunoTermModel]
    text: str


def run_bruno(request: BrunoRequest) -> dict:
    from .bruno import term_text

    terms = term_table(request.n)
    return {
        "kind": "bruno_table",
        "n": request.n,
        "count": len(terms),
        "terms": [
            {
                "exponents": list(t.partition.exponents),
                "blocks": t.partition.blocks,
                "coefficient": t.coefficient,
                "text": term_text(t),
            }
            for t in terms
        ],
        "text": format_term_table(request.n),
    }


# ---------------------------------------------------------------------------
# verify-integrals
# ---------------------------------------------------------------------------

class VerifyIntegralsRequest(BaseModel):
    alpha: ParamValue
    beta: ParamValue
    x: ParamValue
    power_r: list[ParamValue] = Field(default_factory=list)
    precision: int = Field(default=DEFAULT_PRECISION, ge=64, le=4096)
    rel_target: float = 1e-8


class IntegralRowModel(BaseModel):
    label: str
    lhs: float
    rhs: float
    rel_err: float
    ok: bool


class IntegralReportModel(BaseModel):
    kind: Literal["integral_report"] = "integral_report"
    rows: list[IntegralRowModel]
    ok: bool


def run_verify_integrals(request: VerifyIntegralsRequest) -> dict:
    alpha = _exact(request.alpha, "alpha")
    beta = _exact(request.beta, "beta")
    x = _exact(request.x, "x")
    point = ParamPoint(alpha, beta)
    rows = []
    check = log_deriv2_integral(point, x, precision=request.precision)
    rows.append({
        "label": (f"[ln F]'' integral ({check.branch} branch) at alpha={fraction_str(alpha)}, "
                  f"beta={fraction_str(beta)}, x={fraction_str(x)}"),
        "lhs": check.closed_form,
        "rhs": check.integral,
        "rel_err": check.rel_err,
        "ok": check.rel_err <= request.rel_target,
    })
    for r in request.power_r:
        rf = _exact(r, "power_r")
        xq = abs(x)
        identity = power_identity_check(xq, rf, precision=request.precision)
        rows.append({
            "label": identity.label,
            "lhs": identity.lhs,
            "rhs": identity.rhs,
            "rel_err": identity.rel_err,
            "ok": identity.rel_err <= request.rel_target,
        })
    return {"kind": "integral_report", "rows": rows, "ok": all(r["ok"] for r in rows)}


# ---------------------------------------------------------------------------
# verify-theorems
# ---------------------------------------------------------------------------

class VerifyTheoremsRequest(BaseModel):
    seed: int = 0
    precision: int = Field(default=DEFAULT_PRECISION, ge=64, le=4096)
    max_order: int = Field(default=8, ge=1, le=16)
    include_concordance: bool = True


class AssertionModel(BaseModel):
    name: str
    passed: bool
    detail: str


class TheoremReportModel(BaseModel):
    kind: Literal["theorem_report"] = "theorem_report"
    seed: int
    precision: int
    assertions: list[AssertionModel]
    failed: int
    passed: bool


def run_verify_theorems(request: VerifyTheoremsRequest) -> dict:
    return suites.run_theorem_suites(seed=request.seed, precision=request.precision,
                                     max_order=request.max_order,
                                     include_concordance=request.include_concordance)


# ---------------------------------------------------------------------------
# classify-shifted (exposed for completeness of the service surface)
# ---------------------------------------------------------------------------

class ShiftedCmRequest(BaseModel):
    alpha: ParamValue
    beta: ParamValue
    max_order: int = Field(default=8, ge=1, le=16)
    precision: int = Field(default=DEFAULT_PRECISION, ge=64, le=4096)


def run_shifted_cm(request: ShiftedCmRequest) -> dict:
    point = ParamPoint(_exact(request.alpha, "alpha"), _exact(request.beta, "beta"))
    return shifted_cm_check(point, max_order=request.max_order,
                            precision=request.precision).to_dict()
