"""Command-line client for the pathfield service.

All subcommands talk to the HTTP API: with ``--server URL`` they hit a
running instance, otherwise they spin up the service in-process and speak
to it over an in-memory transport, so the CLI works standalone.  Mesh files
are uploaded as text; results are written to local files atomically.

Exit codes: 0 success / path reached, 2 usage error, 3 solver or server
error, 4 path stuck at a local minimum, 5 step cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .config import DEFAULTS, Settings, load_config
from .errors import ConfigError
from .fileio import atomic_write, points_from_path_file, values_from_field_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_STUCK = 4
EXIT_STEP_CAP = 5

_STATUS_EXIT = {"reached": EXIT_OK, "stuck": EXIT_STUCK,
                "max-steps-exceeded": EXIT_STEP_CAP}


class ServiceClient:
    """Thin wrapper over httpx against a remote or embedded service."""

    def __init__(self, server: str | None, settings: Settings):
        self.settings = settings
        if server:
            self._client = httpx.Client(base_url=server.rstrip("/"), timeout=300.0)
        else:
            import warnings
            with warnings.catch_warnings():
                # Quiet the testclient deprecation notice; in-process HTTP is
                # deliberate here, not a test fixture.
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient

                from .service import create_app
                self._client = TestClient(create_app(settings),
                                          raise_server_exceptions=False)
        self._domain_id = None

    def close(self):
        if self._domain_id:
            try:
                self._client.delete(f"/domains/{self._domain_id}")
            except httpx.HTTPError:
                pass
        self._client.close()

    def _check(self, resp):
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            raise CliError(f"server error {resp.status_code}: {detail}")
        return resp

    def create_domain(self, source: dict, name: str | None = None) -> dict:
        resp = self._check(self._client.post(
            "/domains", json={"name": name, "source": source}))
        info = resp.json()
        self._domain_id = info["domain_id"]
        return info

    def post(self, endpoint: str, payload: dict):
        resp = self._check(self._client.post(
            f"/domains/{self._domain_id}/{endpoint}", json=payload))
        return resp


class CliError(Exception):
    pass


def mesh_source_from_file(path: str) -> dict:
    """Build the upload payload for a mesh file or disk:N shorthand."""
    if path.startswith(("disk:", "rect:", "blob:", "holes:")):
        kind, _, arg = path.partition(":")
        parts = arg.split(",")
        if kind == "disk":
            return {"kind": "disk", "rings": int(parts[0])}
        if kind == "rect":
            return {"kind": "rectangle", "length": float(parts[0]),
                    "width": float(parts[1]), "spacing": float(parts[2])}
        if kind == "blob":
            return {"kind": "blob", "spacing": float(parts[0])}
        return {"kind": "holes", "spacing": float(parts[0])}
    p = Path(path)
    if p.suffix.lower() == ".off":
        return {"kind": "off", "off_text": p.read_text()}
    stem = p.with_suffix("")
    node, ele = stem.with_suffix(".node"), stem.with_suffix(".ele")
    if not node.exists() or not ele.exists():
        raise CliError(f"missing Triangle pair {node} / {ele}")
    return {"kind": "triangle", "node_text": node.read_text(),
            "ele_text": ele.read_text()}


def _method_payload(args) -> dict:
    payload = {}
    for key in ("t", "alpha", "power"):
        val = getattr(args, key, None)
        if val is not None:
            payload[key] = val
    if getattr(args, "swap_order", False):
        payload["swap_order"] = True
    return payload


def _validate_method_params(parser, args):
    single = getattr(args, "method", None)
    multi = getattr(args, "methods", None)
    methods = [single] if single else (multi.split(",") if multi else [])
    for method in methods:
        method = method.strip().lower()
        if method in ("heat-dirichlet", "heat-neumann", "hd", "hn") \
                and getattr(args, "t", None) is None:
            parser.error(f"method {method} requires --t")
        if method == "alpha" and getattr(args, "alpha", None) is None:
            parser.error("method alpha requires --alpha")
        if method in ("power", "power-p") and getattr(args, "power", None) is None:
            parser.error("method power-p requires --power")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathfield",
        description="Distance fields and gradient-descent paths on planar "
                    "triangulations.")
    parser.add_argument("--server", help="base URL of a running service "
                                         "(default: embedded in-process)")
    parser.add_argument("--config", help="key=value settings file")
    parser.add_argument("--dense-budget", type=int, dest="dense_budget",
                        help="max mesh size for dense pseudo-inverse fields")
    parser.add_argument("--step-cap-factor", type=int, dest="step_cap_factor",
                        help="path step cap as a multiple of vertex count")
    parser.add_argument("--residual-warn", type=float, dest="residual_warn",
                        help="residual level that flags a field")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, target=True, method=True):
        p.add_argument("mesh", help="mesh file (.off or Triangle pair) or "
                                    "generator shorthand like disk:40")
        if method:
            p.add_argument("--method", required=True)
            p.add_argument("--t", type=float, help="heat-kernel time")
            p.add_argument("--alpha", type=float, help="alpha-divergence order")
            p.add_argument("--power", type=int, help="|1-x|^p exponent")
            p.add_argument("--swap-order", action="store_true",
                           dest="swap_order",
                           help="weight divergences by the target row")
        if target:
            p.add_argument("--target", type=int, required=True)

    p_field = sub.add_parser("field", help="compute a distance field")
    add_common(p_field)
    p_field.add_argument("--out", required=True,
                         help=".csv for values, .json for values + metadata")

    p_path = sub.add_parser("path", help="trace a descent path")
    add_common(p_path)
    p_path.add_argument("--source", type=int, required=True)
    p_path.add_argument("--mode", choices=("edge", "triangle"),
                        default="triangle")
    p_path.add_argument("--out", required=True, help=".csv or .json polyline")

    p_cmp = sub.add_parser("compare", help="trace several methods, compare paths")
    p_cmp.add_argument("mesh")
    p_cmp.add_argument("--methods", required=True,
                       help="comma-separated method list")
    p_cmp.add_argument("--source", type=int, required=True)
    p_cmp.add_argument("--target", type=int, required=True)
    p_cmp.add_argument("--mode", choices=("edge", "triangle"), default="triangle")
    p_cmp.add_argument("--t", type=float)
    p_cmp.add_argument("--alpha", type=float)
    p_cmp.add_argument("--power", type=int)
    p_cmp.add_argument("--out", help="write the comparison JSON here")

    p_bench = sub.add_parser("bench", help="preproc/online benchmark report")
    p_bench.add_argument("mesh")
    p_bench.add_argument("--methods", required=True)
    p_bench.add_argument("--trials", type=int)
    p_bench.add_argument("--threshold", type=float)
    p_bench.add_argument("--source", type=int)
    p_bench.add_argument("--target", type=int)
    p_bench.add_argument("--out", help="write the report JSON here")

    p_audit = sub.add_parser("audit", help="spurious-local-minima audit")
    p_audit.add_argument("mesh")
    p_audit.add_argument("--methods", required=True)
    p_audit.add_argument("--target", type=int)
    p_audit.add_argument("--t", type=float)
    p_audit.add_argument("--alpha", type=float)
    p_audit.add_argument("--power", type=int)
    p_audit.add_argument("--out")

    p_render = sub.add_parser("render", help="render mesh/field/paths as SVG")
    p_render.add_argument("mesh")
    p_render.add_argument("--field", help="field CSV/JSON file to color by")
    p_render.add_argument("--path", action="append", default=[],
                          help="path CSV/JSON overlay (repeatable)")
    p_render.add_argument("--levels", type=int)
    p_render.add_argument("--source", type=int)
    p_render.add_argument("--target", type=int)
    p_render.add_argument("--out", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    return parser


def _settings(args) -> Settings:
    settings = DEFAULTS
    if args.config:
        settings = load_config(args.config)
    return settings.replace(
        threshold=getattr(args, "threshold", None),
        trials=getattr(args, "trials", None),
        contour_levels=getattr(args, "levels", None),
        dense_budget=args.dense_budget,
        step_cap_factor=args.step_cap_factor,
        residual_warn=args.residual_warn,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        settings = _settings(args)
    except ConfigError as exc:
        parser.error(str(exc))

    if args.command == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(settings), host=args.host, port=args.port)
        return EXIT_OK

    _validate_method_params(parser, args)
    if getattr(args, "source", None) is not None and \
            getattr(args, "target", None) is not None and \
            args.source == args.target and args.command in ("path", "compare"):
        parser.error("source and target must differ")

    try:
        source_payload = mesh_source_from_file(args.mesh)
    except (CliError, OSError) as exc:
        parser.error(str(exc))

    client = ServiceClient(args.server, settings)
    try:
        client.create_domain(source_payload, name=Path(args.mesh).stem)
        return _dispatch(args, client)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    finally:
        client.close()


def _write_output(out: str | None, text: str):
    if out:
        atomic_write(out, text)
        print(f"wrote {out}")
    else:
        print(text)


def _dispatch(args, client: ServiceClient) -> int:
    if args.command == "field":
        payload = {"method": args.method, "target": args.target,
                   **_method_payload(args)}
        if args.out.endswith(".json"):
            body = client.post("field", payload).json()
            _write_output(args.out, json.dumps(body, indent=2) + "\n")
        else:
            text = client.post("field.csv", payload).text
            _write_output(args.out, text)
        return EXIT_OK

    if args.command == "path":
        payload = {"method": args.method, "source": args.source,
                   "target": args.target, "mode": args.mode,
                   **_method_payload(args)}
        body = client.post("path", payload).json()
        if args.out.endswith(".json"):
            _write_output(args.out, json.dumps(body, indent=2) + "\n")
        else:
            lines = ["x,y"] + [f"{x:.17g},{y:.17g}" for x, y in body["points"]]
            _write_output(args.out, "\n".join(lines) + "\n")
        print(f"status: {body['status']} length: {body['length']:.6g}")
        return _STATUS_EXIT.get(body["status"], EXIT_SOLVER)

    if args.command == "compare":
        payload = {"methods": args.methods.split(","), "source": args.source,
                   "target": args.target, "mode": args.mode,
                   **_method_payload(args)}
        body = client.post("compare", payload).json()
        body.pop("paths", None)
        _write_output(args.out, json.dumps(body, indent=2) + "\n")
        return EXIT_OK

    if args.command == "bench":
        payload = {"methods": args.methods.split(","), "trials": args.trials,
                   "source": args.source, "target": args.target,
                   "threshold": args.threshold}
        body = client.post("bench", payload).json()
        _write_output(args.out, json.dumps(body, indent=2) + "\n")
        return EXIT_OK

    if args.command == "audit":
        payload = {"methods": args.methods.split(","), "target": args.target,
                   **_method_payload(args)}
        body = client.post("audit", payload).json()
        _write_output(args.out, json.dumps(body, indent=2) + "\n")
        return EXIT_OK

    if args.command == "render":
        payload = {
            "field_values": (list(map(float, values_from_field_file(args.field)))
                             if args.field else None),
            "paths": [[[float(x), float(y)] for x, y in points_from_path_file(p)]
                      for p in args.path],
            "contour_levels": client.settings.contour_levels,
            "source": args.source,
            "target": args.target,
        }
        svg = client.post("render", payload).text
        atomic_write(args.out, svg)
        print(f"wrote {args.out}")
        return EXIT_OK

    raise AssertionError(f"unhandled command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
