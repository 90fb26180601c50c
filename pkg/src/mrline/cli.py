"""Thin command-line client for the reconstruction service.

Every subcommand is a single HTTP request. By default the request runs
against an in-process instance of the service (no socket, no separate
process); ``--server URL`` points the same client at a running instance
(``mrline serve``). File formats on disk are exactly the wire formats:
binary complex tensors, mask JSON, metrics JSON.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure
(solver divergence).
"""

from __future__ import annotations

import argparse
import asyncio
import base64
import json
import sys
from pathlib import Path

import httpx

from .metrics import MetricsReport

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _request(path: str, payload: dict, server: str | None) -> dict:
    """POST ``payload`` to the service and return the parsed JSON body."""
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=payload)
    else:
        from .service.app import create_app

        async def _call() -> httpx.Response:
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://mrline.internal", timeout=600.0
            ) as client:
                return await client.post(path, json=payload)

        resp = asyncio.run(_call())

    if resp.status_code == 200:
        return resp.json()
    try:
        detail = resp.json().get("detail")
    except json.JSONDecodeError:
        detail = resp.text
    if isinstance(detail, dict):
        message = detail.get("message", str(detail))
        if detail.get("error") == "divergence":
            raise CliError(f"numerical failure: {message}", EXIT_NUMERICAL)
    else:
        message = str(detail)
    raise CliError(f"request failed ({resp.status_code}): {message}", EXIT_USAGE)


def _read_file(path: str, mode: str = "rb"):
    p = Path(path)
    try:
        return p.read_bytes() if mode == "rb" else p.read_text()
    except OSError as err:
        raise CliError(f"cannot read {path}: {err}") from err


def _write_file(path: str, data) -> None:
    p = Path(path)
    try:
        if isinstance(data, bytes):
            p.write_bytes(data)
        else:
            p.write_text(data)
    except OSError as err:
        raise CliError(f"cannot write {path}: {err}") from err


def _cmd_phantom(args) -> int:
    payload = {
        "m": args.m,
        "n": args.n,
        "coils": args.coils,
        "support": args.support,
        "shapes": args.shapes,
        "seed": args.seed,
    }
    body = _request("/phantom", payload, args.server)
    _write_file(f"{args.out}.truth.cplx", base64.b64decode(body["truth"]))
    _write_file(f"{args.out}.kspace.cplx", base64.b64decode(body["kspace"]))
    return EXIT_OK


def _cmd_mask(args) -> int:
    payload = {
        "n": args.n,
        "pattern": args.pattern,
        "af": args.af,
        "fraction": args.fraction,
        "center_fraction": args.center_fraction,
        "acs": args.acs,
        "seed": args.seed,
    }
    body = _request("/mask", payload, args.server)
    _write_file(args.out, json.dumps(body) + "\n")
    return EXIT_OK


def _parse_gamma(text: str) -> float | str:
    if text == "auto":
        return "auto"
    try:
        value = float(text)
    except ValueError:
        raise CliError(f"--gamma must be 'auto' or a positive number, got {text!r}")
    if value <= 0:
        raise CliError(f"--gamma must be > 0, got {value}")
    return value


def _cmd_recon(args) -> int:
    kspace = _read_file(args.kspace)
    try:
        mask_obj = json.loads(_read_file(args.mask, mode="rt"))
    except json.JSONDecodeError as err:
        raise CliError(f"bad mask file {args.mask}: {err}") from err
    payload = {
        "kspace": base64.b64encode(kspace).decode("ascii"),
        "mask": mask_obj,
        "lambda1": args.lambda1,
        "lambda2": args.lambda2,
        "gamma": _parse_gamma(args.gamma),
        "iters": args.iters,
        "tol": args.tol,
        "mode": args.mode,
        "filter_len": args.filter_len,
        "levels": args.levels,
        "threads": args.threads,
        "normalize": not args.no_normalize,
        "hard_replace": args.hard_replace,
    }
    body = _request("/recon", payload, args.server)
    _write_file(args.out, base64.b64decode(body["image"]))
    return EXIT_OK


def _cmd_eval(args) -> int:
    payload = {
        "ref": base64.b64encode(_read_file(args.ref)).decode("ascii"),
        "test": base64.b64encode(_read_file(args.test)).decode("ascii"),
    }
    body = _request("/eval", payload, args.server)
    text = MetricsReport(rlne=body["rlne"], psnr_db=body["psnr_db"], ssim=body["ssim"]).to_json()
    print(text)
    if args.out_json:
        _write_file(args.out_json, text + "\n")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mrline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p):
        p.add_argument("--server", default=None, help="remote service URL (default: in-process)")

    p = sub.add_parser("phantom", help="generate synthetic multi-coil data")
    p.add_argument("--m", type=int, default=64)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--coils", type=int, default=4)
    p.add_argument("--support", type=int, default=5)
    p.add_argument("--shapes", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix (.truth.cplx / .kspace.cplx)")
    add_server(p)
    p.set_defaults(func=_cmd_phantom)

    p = sub.add_parser("mask", help="generate an undersampling mask")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pattern", choices=["cartesian", "uniform", "pf"], default="cartesian")
    p.add_argument("--af", type=float, default=4.0)
    p.add_argument("--fraction", type=float, default=0.75)
    p.add_argument("--center-fraction", type=float, default=0.08)
    p.add_argument("--acs", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output mask JSON path")
    add_server(p)
    p.set_defaults(func=_cmd_mask)

    p = sub.add_parser("recon", help="reconstruct undersampled k-space")
    p.add_argument("--kspace", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--out", required=True, help="output spatial tensor path")
    p.add_argument("--lambda1", type=float, default=1e-3)
    p.add_argument("--lambda2", type=float, default=1e-3)
    p.add_argument("--gamma", default="auto", help="'auto' or a positive step size")
    p.add_argument("--iters", type=int, default=50)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--mode", choices=["full", "lr", "sp"], default="full")
    p.add_argument("--filter-len", type=int, default=16)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-normalize", action="store_true", help="skip peak-magnitude scaling")
    p.add_argument("--hard-replace", action="store_true", help="overwrite sampled lines after solving")
    add_server(p)
    p.set_defaults(func=_cmd_recon)

    p = sub.add_parser("eval", help="image-quality metrics between two tensors")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out-json", default=None)
    add_server(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("serve", help="run the reconstruction service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else EXIT_USAGE
    except httpx.HTTPError as err:
        print(f"error: cannot reach service: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
