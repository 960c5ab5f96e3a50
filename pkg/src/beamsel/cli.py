"""Thin command-line client for the sweep service.

All requests go through the HTTP API: against a remote server when
--server is given, otherwise against the service app mounted in-process.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import asyncio
import sys

import httpx

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamsel",
        description="Run a beam-selection Monte Carlo sweep and write the CSV table.",
    )
    parser.add_argument("--config", metavar="PATH", help="key=value config file")
    parser.add_argument("--preset", choices=("fig1", "fig2", "fig3", "fig4"))
    parser.add_argument("--sweep", choices=("snr", "users", "antennas", "rf"))
    parser.add_argument("--values", metavar="CSV-LIST", help="sweep points, comma separated")
    parser.add_argument("--trials", type=int, metavar="N")
    parser.add_argument("--seed", type=int, metavar="U64")
    parser.add_argument("--metric", choices=("parallel", "zf"))
    parser.add_argument("--mode", choices=("fast", "naive"))
    parser.add_argument("--algorithms", metavar="LIST", help="comma separated algorithm names")
    parser.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")
    parser.add_argument("--server", metavar="URL", help="remote service URL (default in-process)")
    return parser


def _payload(args: argparse.Namespace) -> dict:
    payload: dict = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as handle:
                payload["config_text"] = handle.read()
        except OSError as exc:
            print(f"error: cannot read config file: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_CONFIG)
    if args.preset:
        payload["preset"] = args.preset
    if args.sweep:
        payload["sweep"] = args.sweep
    if args.values:
        try:
            payload["values"] = [float(v) for v in args.values.split(",")]
        except ValueError:
            print(f"error: cannot parse --values {args.values!r}", file=sys.stderr)
            raise SystemExit(EXIT_CONFIG)
    if args.trials is not None:
        payload["trials"] = args.trials
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.metric:
        payload["metric"] = args.metric
    if args.mode:
        payload["mode"] = args.mode
    if args.algorithms:
        payload["algorithms"] = [a.strip() for a in args.algorithms.split(",")]
    return payload


async def _post_sweep(payload: dict, server: str | None) -> httpx.Response:
    if server:
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            return await client.post("/sweep", json=payload)
    from .service import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://beamsel.local", timeout=None
    ) as client:
        return await client.post("/sweep", json=payload)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    payload = _payload(args)
    try:
        response = asyncio.run(_post_sweep(payload, args.server))
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if response.status_code in (400, 422):
        print(f"configuration error: {_detail(response)}", file=sys.stderr)
        return EXIT_CONFIG
    if response.status_code != 200:
        print(f"error ({response.status_code}): {_detail(response)}", file=sys.stderr)
        return EXIT_NUMERICAL
    csv = response.json()["csv"]
    if args.out:
        try:
            with open(args.out, "wb") as handle:
                handle.write(csv.encode("utf-8"))
        except OSError as exc:
            print(f"error: cannot write {args.out!r}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def _detail(response: httpx.Response) -> str:
    try:
        return str(response.json().get("detail"))
    except Exception:
        return response.text


if __name__ == "__main__":
    sys.exit(main())
