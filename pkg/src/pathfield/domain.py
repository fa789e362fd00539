"""High-level workspace tying a mesh to its solvers and kernels.

A ``DomainContext`` owns the preprocessing state (Laplacian assembly,
interior factorization, Poisson kernel) and answers per-target queries;
this is the unit the service keeps resident between requests so that online
work is back-substitution or divergence sums only.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS, Settings
from .divergence import FDivergence, builtin_f, dv_field, sparsify
from .errors import InvalidTargetError
from .laplacian import LaplacianSet, assemble_cotan
from .mesh import TriMesh, check_delaunay
from .paths import (TracedPath, edge_descent, find_local_minima,
                    path_hausdorff, triangle_descent)
from .solvers import (LAPLACE_METHODS, PoissonKernel, ScalarField,
                      canonical_method, poisson_kernel)

DIVERGENCE_METHODS = ("tv", "kl", "chi2", "hellinger", "alpha", "power-p")
ALL_METHODS = tuple(LAPLACE_METHODS) + DIVERGENCE_METHODS


def divergence_for(method: str, params: dict) -> FDivergence:
    if method == "alpha":
        return builtin_f("alpha", alpha=params.get("alpha"))
    if method == "power-p":
        return builtin_f("power-p", power=params.get("power"))
    return builtin_f(method)


@dataclass
class DomainContext:
    mesh: TriMesh
    settings: Settings = DEFAULTS
    name: str = "domain"
    _ls: LaplacianSet | None = None
    _pk: PoissonKernel | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def laplacian(self) -> LaplacianSet:
        with self._lock:
            if self._ls is None:
                self._ls = assemble_cotan(self.mesh)
            return self._ls

    @property
    def kernel(self) -> PoissonKernel:
        with self._lock:
            if self._pk is None:
                if self._ls is None:
                    self._ls = assemble_cotan(self.mesh)
                self._pk = poisson_kernel(self._ls, self.settings)
            return self._pk

    def sparse_kernel(self, threshold: float | None = None) -> PoissonKernel:
        pk = self.kernel
        want = threshold if threshold is not None else self.settings.threshold
        with self._lock:
            if (self._pk.sparse is None
                    or (want is not None and self._pk.threshold != want)):
                self._pk = sparsify(pk, want)
            return self._pk

    def field(self, method: str, target: int, params: dict | None = None) -> ScalarField:
        method = canonical_method(method)
        params = params or {}
        if not 0 <= target < self.mesh.n:
            raise InvalidTargetError(f"target {target} out of range")
        if method in LAPLACE_METHODS:
            return LAPLACE_METHODS[method](self.laplacian, target, params,
                                           self.settings)
        if method in DIVERGENCE_METHODS:
            fd = divergence_for(method, params)
            return dv_field(self.kernel, fd, target,
                            swap_order=bool(params.get("swap_order", False)))
        raise InvalidTargetError(f"unknown method {method!r}")

    def trace(self, method: str, source: int, target: int,
              mode: str = "triangle", params: dict | None = None) -> TracedPath:
        if source == target:
            raise InvalidTargetError("source equals target")
        if not 0 <= source < self.mesh.n:
            raise InvalidTargetError(f"source {source} out of range")
        fld = self.field(method, target, params)
        tracer = triangle_descent if mode == "triangle" else edge_descent
        if mode not in ("triangle", "edge"):
            raise InvalidTargetError(f"mode must be edge or triangle, got {mode!r}")
        return tracer(self.mesh, fld, source, self.settings)

    def compare(self, methods, source: int, target: int,
                mode: str = "triangle", params: dict | None = None) -> dict:
        """Trace each method; report the pairwise Hausdorff matrix."""
        methods = [canonical_method(m) for m in methods]
        traces, minima, statuses = [], [], []
        for m in methods:
            fld = self.field(m, target, params)
            tracer = triangle_descent if mode == "triangle" else edge_descent
            tp = tracer(self.mesh, fld, source, self.settings)
            traces.append(tp)
            statuses.append(tp.status)
            minima.append(len(find_local_minima(self.mesh, fld)))
        step = self.mesh.min_edge_length() / 4.0
        size = len(methods)
        matrix = [[0.0] * size for _ in range(size)]
        for i in range(size):
            for j in range(i + 1, size):
                h = path_hausdorff(traces[i], traces[j], step=step)
                matrix[i][j] = matrix[j][i] = h
        return {
            "methods": methods,
            "source": source,
            "target": target,
            "statuses": statuses,
            "minima_counts": minima,
            "hausdorff": matrix,
            "mean_edge_length": self.mesh.mean_edge_length(),
            "paths": [
                [[float(x), float(y)] for x, y in tp.points] for tp in traces
            ],
        }

    def audit(self, methods, target: int, params: dict | None = None) -> dict:
        """Spurious-minima report per method at this resolution."""
        report = {}
        for m in methods:
            m = canonical_method(m)
            fld = self.field(m, target, params)
            vertices = find_local_minima(self.mesh, fld)
            report[m] = {"count": len(vertices), "vertices": vertices}
        return {"target": target, "n": self.mesh.n, "methods": report}

    def info(self) -> dict:
        mesh = self.mesh
        lo, hi = mesh.bbox
        return {
            "name": self.name,
            "n": mesh.n,
            "k": mesh.k,
            "m": mesh.m,
            "total_area": mesh.total_area,
            "bbox": [[float(lo[0]), float(lo[1])], [float(hi[0]), float(hi[1])]],
            "delaunay_violations": len(check_delaunay(mesh)),
            "mean_edge_length": mesh.mean_edge_length(),
        }


def default_endpoints(mesh: TriMesh, seed: int = 0) -> tuple[int, int]:
    """Deterministic interior source/target pair: a far-apart vertex pair."""
    interior = mesh.interior_vertices
    if interior.size < 2:
        raise InvalidTargetError("mesh has fewer than two interior vertices")
    center = mesh.vertices.mean(axis=0)
    d = np.hypot(*(mesh.vertices[interior] - center).T)
    target = int(interior[np.argmin(d)])
    dt = np.hypot(*(mesh.vertices[interior] - mesh.vertices[target]).T)
    source = int(interior[np.argmax(dt)])
    return source, target
