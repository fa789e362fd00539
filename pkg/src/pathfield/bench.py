"""Benchmark harness: preproc/online split with operation-count instrumentation.

Timing methodology: monotonic clock, 3 warm-up runs, median of the requested
trials for online work; preprocessing (factorization, kernel construction)
is timed as median of 3.  Absolute numbers are descriptive and machine
specific; the structural quantities (operation counts, sparsity, path vertex
counts) are what tests assert on.

The online-path-only figures time the distance evaluations at exactly the
vertices a traced path touched: divergence distances support this on-demand
evaluation, while the factorization-based fields always solve for the full
vertex set.
"""

from __future__ import annotations

import platform
import statistics
import time

import numpy as np
from jsonschema import validate as _validate_schema

from .config import DEFAULTS, Settings
from .divergence import dv_at, dv_field, dv_pair_sparse_stats
from .domain import DomainContext, default_endpoints, divergence_for
from .laplacian import assemble_cotan, factor_interior
from .solvers import LAPLACE_METHODS, canonical_method, poisson_kernel

REPORT_SCHEMA = {
    "type": "object",
    "required": ["domain", "n", "k", "machine", "preproc", "methods",
                 "sparsity_percent", "trials"],
    "properties": {
        "domain": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "k": {"type": "integer", "minimum": 1},
        "trials": {"type": "integer", "minimum": 1},
        "machine": {"type": "string"},
        "sparsity_percent": {"type": "number", "minimum": 0, "maximum": 100},
        "preproc": {
            "type": "object",
            "required": ["factorization_ms", "poisson_kernel_ms"],
            "properties": {
                "factorization_ms": {"type": "number", "minimum": 0},
                "poisson_kernel_ms": {"type": "number", "minimum": 0},
            },
        },
        "methods": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["method", "online_full_ms", "online_path_ms",
                             "path_vertex_count", "status"],
                "properties": {
                    "method": {"type": "string"},
                    "online_full_ms": {"type": "number", "minimum": 0},
                    "online_path_ms": {"type": "number", "minimum": 0},
                    "path_vertex_count": {"type": "integer", "minimum": 0},
                    "status": {"type": "string"},
                    "dense_ops_per_pair": {"type": "integer"},
                    "sparse_ops_per_pair": {"type": "number"},
                },
            },
        },
    },
}


def validate_report(report: dict) -> None:
    _validate_schema(report, REPORT_SCHEMA)


def _median_ms(fn, trials: int, warmup: int = 3) -> float:
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(trials):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1e3)
    return float(statistics.median(samples))


def _path_vertices(ctx: DomainContext, path) -> list[int]:
    seen = set()
    for loc in path.locations:
        if loc[0] == "vertex":
            seen.add(int(loc[1]))
        else:
            seen.add(int(loc[1]))
            seen.add(int(loc[2]))
    return sorted(seen)


def run_benchmark(ctx: DomainContext, methods, source: int | None = None,
                  target: int | None = None, trials: int | None = None,
                  threshold: float | None = None,
                  settings: Settings = DEFAULTS) -> dict:
    mesh = ctx.mesh
    trials = trials or settings.trials
    if source is None or target is None:
        s0, t0 = default_endpoints(mesh)
        source = s0 if source is None else source
        target = t0 if target is None else target

    pre_factor = _median_ms(
        lambda: factor_interior(assemble_cotan(mesh)), trials=3, warmup=0)
    ls = ctx.laplacian
    pre_kernel = _median_ms(lambda: poisson_kernel(ls), trials=3, warmup=0)
    spk = ctx.sparse_kernel(threshold)

    rows = []
    for name in methods:
        method = canonical_method(name)
        fld = ctx.field(method, target)
        path = ctx.trace(method, source, target)
        pverts = _path_vertices(ctx, path)
        entry = {
            "method": method,
            "path_vertex_count": len(pverts),
            "status": path.status,
        }
        if method in LAPLACE_METHODS:
            params = {"t": fld.params.get("t")} if "heat" in method else {}
            full = _median_ms(lambda: ctx.field(method, target, params), trials)
            entry["online_full_ms"] = full
            entry["online_path_ms"] = full  # always solves the full vertex set
        else:
            fd = divergence_for(method, fld.params)
            pk = ctx.kernel
            pv = np.array(pverts, dtype=np.int64)
            entry["online_full_ms"] = _median_ms(
                lambda: dv_field(pk, fd, target), trials)
            entry["online_path_ms"] = _median_ms(
                lambda: dv_at(pk, fd, target, pv), trials)
            entry["dense_ops_per_pair"] = int(pk.k)
            ops = [dv_pair_sparse_stats(spk, fd, target, q)[1] for q in pverts]
            entry["sparse_ops_per_pair"] = float(np.mean(ops)) if ops else 0.0
        rows.append(entry)

    report = {
        "domain": ctx.name,
        "n": mesh.n,
        "k": mesh.k,
        "trials": trials,
        "machine": f"{platform.platform()} / Python {platform.python_version()}",
        "preproc": {
            "factorization_ms": pre_factor,
            "poisson_kernel_ms": pre_kernel,
        },
        "sparsity_percent": float(spk.sparsity_percent),
        "methods": rows,
    }
    validate_report(report)
    return report
