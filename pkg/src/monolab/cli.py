"""Command-line front end; a thin client over the shared handlers.

By default each command runs in-process. With --server URL (or the
MONOLAB_SERVER environment variable) the same request is posted to a
running service instead, producing the same report. The default working
precision is 256 bits, overridable with MONOLAB_PRECISION.

Exit codes: 0 success, 1 theorem-suite discrepancy, 2 bad configuration,
3 domain failure during the run (the report is still emitted, with
inapplicable entries where evaluation failed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Optional

from pydantic import ValidationError

from . import api
from .core import DEFAULT_PRECISION
from .errors import (
    BranchError,
    ConfigError,
    DomainError,
    InvalidParameter,
    MonolabError,
    NearSingular,
    NonPositiveValue,
    ParseError,
    PoleError,
)

EXIT_OK = 0
EXIT_DISCREPANCY = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3

_CONFIG_ERRORS = (ParseError, ConfigError, InvalidParameter, ValidationError)
_DOMAIN_ERRORS = (DomainError, PoleError, BranchError, NonPositiveValue, NearSingular)


@dataclass
class RunConfig:
    """One resolved command invocation."""

    command: str
    request: Any
    output_format: str = "json"
    output_path: Optional[str] = None
    server: Optional[str] = None
    extra: dict = field(default_factory=dict)


def _default_precision() -> int:
    raw = os.environ.get("MONOLAB_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"MONOLAB_PRECISION must be an integer, got {raw!r}") from exc


def _parse_params(pairs: list[str]) -> dict[str, str]:
    out: dict[str, str] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise ConfigError(f"--param needs NAME=VALUE, got {pair!r}")
        out[name] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monolab",
        description="Monotonicity-class checks, parameter classification and "
                    "integral-identity verification for power-exponential functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, formats=("json", "text")):
        p.add_argument("--precision", type=int, default=None,
                       help=f"working precision in bits (default {DEFAULT_PRECISION}; "
                            "env MONOLAB_PRECISION overrides the default)")
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--output", default=None, help="write the report to this path")
        p.add_argument("--server", default=None,
                       help="POST the request to a running service at this base URL "
                            "(env MONOLAB_SERVER)")

    p = sub.add_parser("check", help="sweep a monotonicity-class sign rule over a grid")
    p.add_argument("--expr", required=False, help="expression text (see docs/grammar.ebnf)")
    p.add_argument("--expr-file", default=None, help="read the expression from a file")
    p.add_argument("--class", dest="monotone_class", required=True,
                   choices=["cm", "am", "lcm", "lam"])
    p.add_argument("--interval", required=True, help="open interval, e.g. \"(0,inf)\"")
    p.add_argument("--max-order", type=int, default=8)
    p.add_argument("--param", action="append", default=[],
                   help="bind an expression parameter, NAME=VALUE (repeatable)")
    p.add_argument("--grid", default=None,
                   help="comma-separated exponents j; sample points sit at "
                        "endpoint +- 10^j (default -6,-4,-2,-1,0,1,2,4,6)")
    common(p)

    p = sub.add_parser("classify", help="evaluate the eight closed-form membership conditions")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    common(p)

    p = sub.add_parser("region-map", help="CSV sweep of classify over a beta range")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta-range", required=True, help="lo:hi:step (inclusive)")
    common(p, formats=("csv",))

    p = sub.add_parser("bruno", help="print the symbolic partition-term table for order n")
    p.add_argument("--n", type=int, required=True)
    common(p, formats=("text", "json"))

    p = sub.add_parser("verify-integrals",
                       help="check the integral representation of [ln F]'' "
                            "and optional power-law identities")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--power-r", action="append", default=[],
                   help="also check 1/x^r at |x| for this r (repeatable)")
    common(p)

    p = sub.add_parser("verify-theorems",
                       help="run the inclusion, concordance, shift and spot-check suites")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the randomized spot checks (printed in the report)")
    p.add_argument("--max-order", type=int, default=8)
    p.add_argument("--skip-concordance", action="store_true",
                   help="skip the slow classification-concordance grid")
    common(p, formats=("text", "json"))

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _read_expr(args) -> str:
    if args.expr_file is not None:
        with open(args.expr_file, "r", encoding="utf-8") as fh:
            return fh.read().strip()
    if args.expr is None:
        raise ConfigError("one of --expr or --expr-file is required")
    return args.expr


def config_from_args(args: argparse.Namespace) -> RunConfig:
    server = getattr(args, "server", None) or os.environ.get("MONOLAB_SERVER")
    precision = getattr(args, "precision", None)
    if precision is None:
        precision = _default_precision()
    fmt = getattr(args, "format", "json")
    output = getattr(args, "output", None)
    cmd = args.command

    if cmd == "check":
        grid = None
        if args.grid:
            try:
                grid = [int(tok) for tok in args.grid.split(",")]
            except ValueError as exc:
                raise ConfigError(f"--grid needs comma-separated integers, got {args.grid!r}") from exc
        request = api.CheckRequest(
            expr=_read_expr(args), monotone_class=args.monotone_class,
            interval=args.interval, max_order=args.max_order,
            precision=precision, params=_parse_params(args.param),
            grid_exponents=grid)
    elif cmd == "classify":
        request = api.ClassifyRequest(alpha=args.alpha, beta=args.beta)
    elif cmd == "region-map":
        request = api.RegionMapRequest(alpha=args.alpha, beta_range=args.beta_range)
    elif cmd == "bruno":
        request = api.BrunoRequest(n=args.n)
    elif cmd == "verify-integrals":
        request = api.VerifyIntegralsRequest(
            alpha=args.alpha, beta=args.beta, x=args.x,
            power_r=list(args.power_r), precision=precision)
    elif cmd == "verify-theorems":
        request = api.VerifyTheoremsRequest(
            seed=args.seed, precision=precision, max_order=args.max_order,
            include_concordance=not args.skip_concordance)
    elif cmd == "serve":
        return RunConfig("serve", None, extra={"host": args.host, "port": args.port})
    else:  # pragma: no cover - argparse enforces the choices
        raise ConfigError(f"unknown command {cmd!r}")
    return RunConfig(cmd, request, output_format=fmt, output_path=output, server=server)


_ENDPOINTS = {
    "check": "/check",
    "classify": "/classify",
    "region-map": "/region-map",
    "bruno": "/bruno",
    "verify-integrals": "/verify-integrals",
    "verify-theorems": "/verify-theorems",
}


def _dispatch_remote(config: RunConfig):
    import httpx

    url = config.server.rstrip("/") + _ENDPOINTS[config.command]
    response = httpx.post(url, json=config.request.model_dump(by_alias=True, mode="json"),
                          timeout=600.0)
    if response.status_code >= 400:
        raise ConfigError(f"server returned {response.status_code}: {response.text}")
    if config.command == "region-map":
        return response.text
    return response.json()


def _dispatch_local(config: RunConfig):
    handlers = {
        "check": api.run_check,
        "classify": api.run_classify,
        "region-map": api.run_region_map,
        "bruno": api.run_bruno,
        "verify-integrals": api.run_verify_integrals,
        "verify-theorems": api.run_verify_theorems,
    }
    return handlers[config.command](config.request)


def _render(config: RunConfig, report) -> str:
    if config.command == "region-map":
        return report  # already CSV text
    if config.output_format == "json":
        return json.dumps(report, indent=2) + "\n"
    if config.command == "bruno":
        return report["text"]
    if config.command == "verify-theorems":
        lines = [f"seed: {report['seed']}", f"precision: {report['precision']}"]
        for a in report["assertions"]:
            lines.append(f"{'PASS' if a['passed'] else 'FAIL'}  {a['name']}  -- {a['detail']}")
        lines.append("all assertions passed" if report["passed"]
                     else f"{report['failed']} assertion(s) failed")
        return "\n".join(lines) + "\n"
    if config.command == "verify-integrals":
        lines = []
        for row in report["rows"]:
            lines.append(f"{'PASS' if row['ok'] else 'FAIL'}  {row['label']}")
            lines.append(f"      lhs={row['lhs']!r} rhs={row['rhs']!r} rel_err={row['rel_err']:.3e}")
        return "\n".join(lines) + "\n"
    return json.dumps(report, indent=2) + "\n"


def _write(config: RunConfig, text: str):
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _exit_code(config: RunConfig, report) -> int:
    if config.command == "check" and report.get("verdict") == "inapplicable":
        return EXIT_DOMAIN
    if config.command == "verify-theorems" and not report.get("passed", True):
        return EXIT_DISCREPANCY
    if config.command == "verify-integrals" and not report.get("ok", True):
        return EXIT_DISCREPANCY
    return EXIT_OK


# Flags whose values may start with '-' (negative numbers, ranges, exprs);
# argparse only special-cases plain negative numbers, so fold these into
# --flag=value form before parsing.
_DASH_VALUE_FLAGS = ("--alpha", "--beta", "--x", "--beta-range", "--power-r", "--expr",
                     "--grid")


def _normalize_argv(argv: list[str]) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _DASH_VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_normalize_argv(sys.argv[1:] if argv is None else list(argv)))
    try:
        config = config_from_args(args)
        if config.command == "serve":
            import uvicorn

            from .service import app

            uvicorn.run(app, host=config.extra["host"], port=config.extra["port"])
            return EXIT_OK
        report = _dispatch_remote(config) if config.server else _dispatch_local(config)
        _write(config, _render(config, report))
        return _exit_code(config, report) if not isinstance(report, str) else EXIT_OK
    except _CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except MonolabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
