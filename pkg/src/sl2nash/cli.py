"""Thin command-line client for the verification service.

``run`` executes a suite (in-process by default, or against a remote service
with --server) and writes the report; ``serve`` starts the service.  Exit
codes: 0 all checks passed, 1 at least one check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from .service import SuiteRequest, run_in_process
from .suites import SUITE_NAMES, report_to_csv, report_to_json


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sl2nash")
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a verification suite")
    runp.add_argument("--suite", default="all", choices=list(SUITE_NAMES) + ["all"])
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--tol-scale", type=float, default=1.0)
    runp.add_argument("--grid", type=int, default=129)
    runp.add_argument("--samples", type=int, default=200)
    runp.add_argument("--out", default=None, help="write the report to this path")
    runp.add_argument("--format", choices=("json", "csv"), default="json")
    runp.add_argument("--server", default=None,
                      help="POST to a running service at this base URL instead of "
                           "executing in-process")
    runp.add_argument("--serial", action="store_true", help="disable parallel checks")

    servep = sub.add_parser("serve", help="start the verification service")
    servep.add_argument("--host", default="127.0.0.1")
    servep.add_argument("--port", type=int, default=8710)
    return parser


def _execute(args: argparse.Namespace) -> dict:
    request = SuiteRequest(suite=args.suite, seed=args.seed, tol_scale=args.tol_scale,
                           grid=args.grid, samples=args.samples,
                           parallel=not args.serial)
    if args.server:
        import httpx

        response = httpx.post(args.server.rstrip("/") + "/run",
                              json=request.model_dump(), timeout=3600.0)
        response.raise_for_status()
        return response.json()
    return run_in_process(request)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    try:
        report = _execute(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report_to_json(report) if args.format == "json" else report_to_csv(report)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    counts = report["counts"]
    print(f"{counts['passed']}/{counts['total']} checks passed", file=sys.stderr)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
