"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field


class TriangleSource(BaseModel):
    kind: Literal["triangle"] = "triangle"
    node_text: str
    ele_text: str


class OffSource(BaseModel):
    kind: Literal["off"] = "off"
    off_text: str


class DiskSource(BaseModel):
    kind: Literal["disk"] = "disk"
    rings: int = Field(ge=2)


class RectangleSource(BaseModel):
    kind: Literal["rectangle"] = "rectangle"
    length: float = Field(gt=0)
    width: float = Field(gt=0)
    spacing: float = Field(gt=0)


class BlobSource(BaseModel):
    kind: Literal["blob"] = "blob"
    spacing: float = Field(gt=0)
    radius: float = 1.0
    amp: float = 0.35
    lobes: int = 3


class HolesSource(BaseModel):
    kind: Literal["holes"] = "holes"
    spacing: float = Field(gt=0)


MeshSource = Annotated[
    Union[TriangleSource, OffSource, DiskSource, RectangleSource,
          BlobSource, HolesSource],
    Field(discriminator="kind"),
]


class DomainCreateRequest(BaseModel):
    name: str | None = None
    source: MeshSource


class DomainInfo(BaseModel):
    domain_id: str
    name: str
    n: int
    k: int
    m: int
    total_area: float
    bbox: list[list[float]]
    delaunay_violations: int
    mean_edge_length: float


class MethodParams(BaseModel):
    t: float | None = None
    alpha: float | None = None
    power: int | None = None
    swap_order: bool = False
    excluded: int | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.model_dump().items() if v not in (None, False)}


class FieldRequest(MethodParams):
    method: str
    target: int


class FieldResponse(BaseModel):
    kind: str
    target: int
    params: dict
    sign: int
    residual: float | None
    precision_flags: list[str]
    values: list[float]


class PathRequest(MethodParams):
    method: str
    source: int
    target: int
    mode: Literal["edge", "triangle"] = "triangle"


class PathResponse(BaseModel):
    status: str
    source: int
    target: int
    stuck_vertex: int | None
    length: float
    points: list[list[float]]
    locations: list[list]


class CompareRequest(MethodParams):
    methods: list[str] = Field(min_length=1)
    source: int
    target: int
    mode: Literal["edge", "triangle"] = "triangle"


class CompareResponse(BaseModel):
    methods: list[str]
    source: int
    target: int
    statuses: list[str]
    minima_counts: list[int]
    hausdorff: list[list[float]]
    mean_edge_length: float
    paths: list[list[list[float]]]


class AuditRequest(MethodParams):
    methods: list[str] = Field(min_length=1)
    target: int | None = None


class AuditMethodReport(BaseModel):
    count: int
    vertices: list[int]


class AuditResponse(BaseModel):
    target: int
    n: int
    methods: dict[str, AuditMethodReport]


class BenchRequest(BaseModel):
    methods: list[str] = Field(min_length=1)
    trials: int | None = None
    source: int | None = None
    target: int | None = None
    threshold: float | None = None


class SparsifyRequest(BaseModel):
    threshold: float | None = None


class RenderRequest(BaseModel):
    field_values: list[float] | None = None
    paths: list[list[list[float]]] = []
    contour_levels: int = 10
    source: int | None = None
    target: int | None = None
    width: int = 800


class ErrorBody(BaseModel):
    code: str
    message: str
