"""FastAPI service wrapping the core package.

``POST /domains`` uploads or generates a mesh and keeps its preprocessing
state (factorization, Poisson kernel) resident; the other endpoints answer
per-target queries against that state.  Domain errors surface as HTTP 422
with a machine-readable code.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Response

from .. import mesh as meshmod
from ..bench import run_benchmark
from ..config import DEFAULTS, Settings
from ..domain import DomainContext
from ..errors import PathfieldError
from ..fileio import field_to_csv
from ..render import render_svg
from . import models
from .state import DomainRegistry


def _error(exc: PathfieldError) -> HTTPException:
    return HTTPException(
        status_code=422,
        detail={"code": type(exc).__name__, "message": str(exc)},
    )


def _build_mesh(source: models.MeshSource) -> meshmod.TriMesh:
    if source.kind == "triangle":
        return meshmod.parse_node_ele(source.node_text, source.ele_text)
    if source.kind == "off":
        return meshmod.parse_off(source.off_text)
    if source.kind == "disk":
        return meshmod.generate_disk_mesh(source.rings)
    if source.kind == "rectangle":
        return meshmod.generate_rectangle_mesh(source.length, source.width,
                                               source.spacing)
    if source.kind == "blob":
        return meshmod.generate_blob_mesh(source.spacing, source.radius,
                                          source.amp, source.lobes)
    if source.kind == "holes":
        return meshmod.generate_holes_mesh(source.spacing)
    raise PathfieldError(f"unknown mesh source {source.kind!r}")


def create_app(settings: Settings = DEFAULTS) -> FastAPI:
    app = FastAPI(title="pathfield", version="0.1.0",
                  description="Distance fields and descent paths on planar "
                              "triangulations")
    registry = DomainRegistry(settings)
    app.state.registry = registry

    def ctx_or_404(domain_id: str) -> DomainContext:
        ctx = registry.get(domain_id)
        if ctx is None:
            raise HTTPException(404, detail={"code": "NotFound",
                                             "message": f"no domain {domain_id}"})
        return ctx

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/domains", response_model=models.DomainInfo)
    def create_domain(req: models.DomainCreateRequest):
        try:
            mesh = _build_mesh(req.source)
        except PathfieldError as exc:
            raise _error(exc)
        domain_id, ctx = registry.add(mesh, req.name)
        return models.DomainInfo(domain_id=domain_id, **ctx.info())

    @app.get("/domains")
    def list_domains():
        return [
            models.DomainInfo(domain_id=did, **ctx.info())
            for did, ctx in registry.items()
        ]

    @app.get("/domains/{domain_id}", response_model=models.DomainInfo)
    def get_domain(domain_id: str):
        ctx = ctx_or_404(domain_id)
        return models.DomainInfo(domain_id=domain_id, **ctx.info())

    @app.delete("/domains/{domain_id}")
    def delete_domain(domain_id: str):
        if not registry.remove(domain_id):
            raise HTTPException(404, detail={"code": "NotFound",
                                             "message": f"no domain {domain_id}"})
        return {"deleted": domain_id}

    @app.post("/domains/{domain_id}/field", response_model=models.FieldResponse)
    def compute_field(domain_id: str, req: models.FieldRequest):
        ctx = ctx_or_404(domain_id)
        try:
            fld = ctx.field(req.method, req.target, req.as_dict())
        except PathfieldError as exc:
            raise _error(exc)
        return models.FieldResponse(
            kind=fld.kind, target=fld.target, params=fld.params, sign=fld.sign,
            residual=fld.residual, precision_flags=list(fld.precision_flags),
            values=[float(v) for v in fld.values])

    @app.post("/domains/{domain_id}/field.csv")
    def compute_field_csv(domain_id: str, req: models.FieldRequest):
        ctx = ctx_or_404(domain_id)
        try:
            fld = ctx.field(req.method, req.target, req.as_dict())
        except PathfieldError as exc:
            raise _error(exc)
        return Response(field_to_csv(fld), media_type="text/csv")

    @app.post("/domains/{domain_id}/path", response_model=models.PathResponse)
    def compute_path(domain_id: str, req: models.PathRequest):
        ctx = ctx_or_404(domain_id)
        try:
            tp = ctx.trace(req.method, req.source, req.target, req.mode,
                           req.as_dict())
        except PathfieldError as exc:
            raise _error(exc)
        return models.PathResponse(
            status=tp.status, source=tp.source, target=tp.target,
            stuck_vertex=tp.stuck_vertex, length=tp.length,
            points=[[float(x), float(y)] for x, y in tp.points],
            locations=[list(loc) for loc in tp.locations])

    @app.post("/domains/{domain_id}/compare", response_model=models.CompareResponse)
    def compare(domain_id: str, req: models.CompareRequest):
        ctx = ctx_or_404(domain_id)
        try:
            result = ctx.compare(req.methods, req.source, req.target, req.mode,
                                 req.as_dict())
        except PathfieldError as exc:
            raise _error(exc)
        return models.CompareResponse(**result)

    @app.post("/domains/{domain_id}/audit", response_model=models.AuditResponse)
    def audit(domain_id: str, req: models.AuditRequest):
        ctx = ctx_or_404(domain_id)
        target = req.target
        if target is None:
            from ..domain import default_endpoints
            _, target = default_endpoints(ctx.mesh)
        try:
            result = ctx.audit(req.methods, target, req.as_dict())
        except PathfieldError as exc:
            raise _error(exc)
        return models.AuditResponse(**result)

    @app.post("/domains/{domain_id}/bench")
    def bench(domain_id: str, req: models.BenchRequest):
        ctx = ctx_or_404(domain_id)
        try:
            return run_benchmark(ctx, req.methods, req.source, req.target,
                                 req.trials, req.threshold, ctx.settings)
        except PathfieldError as exc:
            raise _error(exc)

    @app.post("/domains/{domain_id}/sparsity")
    def sparsity(domain_id: str, req: models.SparsifyRequest):
        ctx = ctx_or_404(domain_id)
        try:
            pk = ctx.sparse_kernel(req.threshold)
        except PathfieldError as exc:
            raise _error(exc)
        return pk.sparsity_report()

    @app.post("/domains/{domain_id}/render")
    def render(domain_id: str, req: models.RenderRequest):
        ctx = ctx_or_404(domain_id)
        svg = render_svg(ctx.mesh, req.field_values, req.paths,
                         req.contour_levels, req.source, req.target, req.width)
        return Response(svg, media_type="image/svg+xml")

    return app


app = create_app()
