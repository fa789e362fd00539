"""Planar triangulations: loading, validation, indexing, and generators.

A ``TriMesh`` owns the geometry every other module consumes: CCW-oriented
triangles, boundary/interior classification, lumped vertex areas (one third
of the incident triangle areas), edge-to-triangle adjacency and boundary
edge lengths.  Instances are immutable after construction; the underlying
arrays are marked read-only.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

from .errors import DegenerateGeometryError, MeshFormatError, MeshTopologyError

_AREA_EPS = 1e-14  # relative to squared bbox scale


class TriMesh:
    """An edge-connected planar triangle mesh.

    Parameters
    ----------
    vertices : (n, 2) float array
        2D vertex positions in domain units.
    triangles : (nt, 3) int array
        Vertex index triples.  Orientation is normalized to counter-clockwise
        on construction; a zero-area triangle raises
        :class:`DegenerateGeometryError`.

    Notes
    -----
    Boundary vertices are those touching an edge with exactly one incident
    triangle.  ``boundary_vertices`` is sorted ascending by vertex index;
    this is the stable order used for Poisson-kernel columns.
    """

    def __init__(self, vertices, triangles):
        v = np.ascontiguousarray(np.asarray(vertices, dtype=float))
        t = np.ascontiguousarray(np.asarray(triangles, dtype=np.int64))
        if v.ndim != 2 or v.shape[1] != 2:
            raise MeshFormatError(f"vertices must be (n, 2), got {v.shape}")
        if t.ndim != 2 or t.shape[1] != 3:
            raise MeshFormatError(f"triangles must be (nt, 3), got {t.shape}")
        if t.shape[0] < 1:
            raise MeshFormatError("mesh needs at least one triangle")
        if t.min() < 0 or t.max() >= len(v):
            raise MeshFormatError("triangle index out of range")

        self.vertices = v
        scale2 = max(np.ptp(v, axis=0).max() ** 2, 1e-30)

        # Normalize to CCW; reject degenerate triangles.
        signed = _signed_areas(v, t)
        flip = signed < 0
        t[flip] = t[flip][:, ::-1]
        signed = np.abs(signed)
        if np.any(signed <= _AREA_EPS * scale2):
            bad = int(np.argmin(signed))
            raise DegenerateGeometryError(
                f"triangle {bad} has (near) zero area {signed[bad]:.3e}"
            )
        self.triangles = t
        self.triangle_areas = signed

        self.vertex_areas = _lumped_vertex_areas(v, t, signed)
        if np.any(self.vertex_areas <= 0):
            raise MeshTopologyError("mesh has an unused vertex (zero area)")

        self._build_edges()
        self._classify_boundary()
        self._build_neighbors()
        self._check_connected()

        for arr in (self.vertices, self.triangles, self.triangle_areas,
                    self.vertex_areas, self.boundary_vertices,
                    self.interior_vertices):
            arr.setflags(write=False)

    # -- sizes ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def k(self) -> int:
        return len(self.boundary_vertices)

    @property
    def m(self) -> int:
        return len(self.interior_vertices)

    @property
    def total_area(self) -> float:
        return float(self.triangle_areas.sum())

    @property
    def bbox(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @property
    def bbox_diagonal(self) -> float:
        lo, hi = self.bbox
        return float(np.hypot(*(hi - lo)))

    # -- construction helpers ---------------------------------------------

    def _build_edges(self):
        t = self.triangles
        edges = {}
        for ti in range(len(t)):
            a, b, c = t[ti]
            for i, j in ((a, b), (b, c), (c, a)):
                key = (int(min(i, j)), int(max(i, j)))
                edges.setdefault(key, []).append(ti)
        for (i, j), tris in edges.items():
            if len(tris) > 2:
                raise MeshTopologyError(
                    f"non-manifold edge ({i}, {j}) with {len(tris)} triangles"
                )
        self.edge_adjacency = {e: tuple(ts) for e, ts in edges.items()}

    def _classify_boundary(self):
        v = self.vertices
        on_boundary = np.zeros(self.n, dtype=bool)
        boundary_edges = []
        lengths = {}
        for (i, j), tris in self.edge_adjacency.items():
            if len(tris) == 1:
                on_boundary[i] = on_boundary[j] = True
                boundary_edges.append((i, j))
                lengths[(i, j)] = float(np.hypot(*(v[i] - v[j])))
        if not boundary_edges:
            raise MeshTopologyError("mesh has no boundary (closed surface?)")
        self.is_boundary = on_boundary
        self.boundary_edges = sorted(boundary_edges)
        self.boundary_edge_lengths = lengths
        self.boundary_vertices = np.flatnonzero(on_boundary)
        self.interior_vertices = np.flatnonzero(~on_boundary)

    def _build_neighbors(self):
        nbr = [[] for _ in range(self.n)]
        for (i, j) in self.edge_adjacency:
            nbr[i].append(j)
            nbr[j].append(i)
        self.neighbors = [np.array(sorted(ns), dtype=np.int64) for ns in nbr]
        vt = [[] for _ in range(self.n)]
        for ti, (a, b, c) in enumerate(self.triangles):
            vt[a].append(ti)
            vt[b].append(ti)
            vt[c].append(ti)
        self.vertex_triangles = [np.array(sorted(ts), dtype=np.int64) for ts in vt]

    def _check_connected(self):
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for w in self.neighbors[u]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(int(w))
        if not seen.all():
            raise MeshTopologyError(
                f"mesh is not edge-connected ({int(seen.sum())}/{self.n} reachable)"
            )

    # -- queries -----------------------------------------------------------

    def boundary_vertex_weights(self) -> np.ndarray:
        """Lumped boundary measure: half the incident boundary-edge lengths.

        Returned in ``boundary_vertices`` order.  Dividing a Poisson-kernel
        row by these weights converts harmonic-measure masses into a density
        per unit boundary length, comparable to continuous kernels.
        """
        acc = np.zeros(self.n)
        for (i, j), ln in self.boundary_edge_lengths.items():
            acc[i] += 0.5 * ln
            acc[j] += 0.5 * ln
        return acc[self.boundary_vertices]

    def boundary_loops(self) -> list[list[int]]:
        """Boundary vertices grouped into closed loops, in traversal order."""
        succ = {}
        for (i, j) in self.boundary_edges:
            succ.setdefault(i, []).append(j)
            succ.setdefault(j, []).append(i)
        unused = {tuple(sorted(e)) for e in self.boundary_edges}
        loops = []
        while unused:
            start, nxt = min(unused)
            loop = [start]
            cur = nxt
            unused.discard((start, nxt))
            while cur != start:
                loop.append(cur)
                for cand in succ[cur]:
                    key = (min(cur, cand), max(cur, cand))
                    if key in unused:
                        unused.discard(key)
                        cur = cand
                        break
                else:
                    raise MeshTopologyError("open boundary chain")
            loops.append(loop)
        return loops

    def edge_lengths(self) -> np.ndarray:
        idx = np.array(list(self.edge_adjacency), dtype=np.int64)
        d = self.vertices[idx[:, 0]] - self.vertices[idx[:, 1]]
        return np.hypot(d[:, 0], d[:, 1])

    def mean_edge_length(self) -> float:
        return float(self.edge_lengths().mean())

    def min_edge_length(self) -> float:
        return float(self.edge_lengths().min())

    def distance_to_boundary(self, points) -> np.ndarray:
        """Distance from each query point to the nearest boundary segment."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        segs = np.array(self.boundary_edges, dtype=np.int64)
        a = self.vertices[segs[:, 0]]
        b = self.vertices[segs[:, 1]]
        ab = b - a
        denom = np.maximum((ab * ab).sum(axis=1), 1e-300)
        out = np.empty(len(pts))
        for i, p in enumerate(pts):
            ap = p - a
            t = np.clip((ap * ab).sum(axis=1) / denom, 0.0, 1.0)
            proj = a + t[:, None] * ab
            d = proj - p
            out[i] = np.sqrt((d * d).sum(axis=1).min())
        return out


def _signed_areas(v, t):
    p0, p1, p2 = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    u, w = p1 - p0, p2 - p0
    return 0.5 * (u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0])


def _lumped_vertex_areas(v, t, areas):
    out = np.zeros(len(v))
    third = areas / 3.0
    for col in range(3):
        np.add.at(out, t[:, col], third)
    return out


def vertex_areas(mesh: TriMesh) -> np.ndarray:
    """Per-vertex lumped area: one third of incident triangle areas."""
    return mesh.vertex_areas


def check_delaunay(mesh: TriMesh, tol: float = 1e-9) -> list[tuple[int, int]]:
    """Interior edges whose opposite-angle cotangents sum below ``-tol``.

    An empty list means every interior cotangent weight is nonnegative
    (the local Delaunay condition); cocircular configurations sit at zero
    and are not reported.
    """
    bad = []
    for (i, j), tris in sorted(mesh.edge_adjacency.items()):
        if len(tris) != 2:
            continue
        s = 0.0
        for ti in tris:
            s += _cotan_opposite(mesh, ti, i, j)
        if s < -tol:
            bad.append((i, j))
    return bad


def _cotan_opposite(mesh: TriMesh, ti: int, i: int, j: int) -> float:
    tri = mesh.triangles[ti]
    (k,) = [int(x) for x in tri if x != i and x != j]
    vk = mesh.vertices[k]
    u = mesh.vertices[i] - vk
    w = mesh.vertices[j] - vk
    cross = u[0] * w[1] - u[1] * w[0]
    if cross == 0.0:
        raise DegenerateGeometryError(f"triangle {ti} has a 0/pi angle")
    return float(np.dot(u, w) / abs(cross))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def load_mesh(path: str | Path, fmt: str | None = None) -> TriMesh:
    """Load a mesh from an OFF file or a Triangle .node/.ele pair.

    ``fmt`` is ``"off"`` or ``"triangle"``; by default it is inferred from
    the extension (.off, otherwise Triangle).  For the Triangle format,
    ``path`` may point at either file of the pair; the sibling extension is
    substituted.
    """
    path = Path(path)
    if fmt is None:
        fmt = "off" if path.suffix.lower() == ".off" else "triangle"
    if fmt == "triangle-node-ele":
        fmt = "triangle"
    if fmt == "off":
        return parse_off(path.read_text())
    if fmt == "triangle":
        stem = path.with_suffix("")
        node, ele = stem.with_suffix(".node"), stem.with_suffix(".ele")
        if not node.exists() or not ele.exists():
            raise MeshFormatError(f"missing {node} / {ele}")
        return parse_node_ele(node.read_text(), ele.read_text())
    raise MeshFormatError(f"unknown mesh format {fmt!r}")


def _tokens(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line.split()


def parse_node_ele(node_text: str, ele_text: str) -> TriMesh:
    """Parse Triangle's .node/.ele pair (0- or 1-based, auto-detected)."""
    rows = list(_tokens(node_text))
    if not rows:
        raise MeshFormatError("empty .node file")
    try:
        n_pts, dim = int(rows[0][0]), int(rows[0][1])
    except (ValueError, IndexError) as exc:
        raise MeshFormatError(f"bad .node header: {rows[0]}") from exc
    if dim != 2:
        raise MeshFormatError(f".node dimension must be 2, got {dim}")
    if len(rows) - 1 < n_pts:
        raise MeshFormatError(f".node promises {n_pts} points, has {len(rows) - 1}")
    try:
        base = int(rows[1][0])
    except (ValueError, IndexError) as exc:
        raise MeshFormatError("bad first .node record") from exc
    if base not in (0, 1):
        raise MeshFormatError(f"first node index must be 0 or 1, got {base}")
    verts = np.empty((n_pts, 2))
    for row in rows[1:1 + n_pts]:
        try:
            idx = int(row[0]) - base
            verts[idx] = (float(row[1]), float(row[2]))
        except (ValueError, IndexError) as exc:
            raise MeshFormatError(f"bad .node record: {row}") from exc
        if not 0 <= idx < n_pts:
            raise MeshFormatError(f"node index {idx + base} out of range")

    rows = list(_tokens(ele_text))
    if not rows:
        raise MeshFormatError("empty .ele file")
    try:
        n_tri, per = int(rows[0][0]), int(rows[0][1])
    except (ValueError, IndexError) as exc:
        raise MeshFormatError(f"bad .ele header: {rows[0]}") from exc
    if per != 3:
        raise MeshFormatError(f"only 3-node triangles supported, got {per}")
    if len(rows) - 1 < n_tri:
        raise MeshFormatError(f".ele promises {n_tri} triangles, has {len(rows) - 1}")
    tris = np.empty((n_tri, 3), dtype=np.int64)
    for row in rows[1:1 + n_tri]:
        try:
            idx = int(row[0]) - base
            tris[idx] = [int(row[1]) - base, int(row[2]) - base, int(row[3]) - base]
        except (ValueError, IndexError) as exc:
            raise MeshFormatError(f"bad .ele record: {row}") from exc
    if tris.min() < 0 or tris.max() >= n_pts:
        raise MeshFormatError("triangle vertex index out of range")
    return TriMesh(verts, tris)


def parse_off(text: str) -> TriMesh:
    """Parse an OFF file; vertices may carry 2 or 3 coordinates (z must be 0)."""
    rows = list(_tokens(text))
    if not rows or rows[0][0].upper() != "OFF":
        raise MeshFormatError("missing OFF header")
    rows = rows[1:]
    if not rows:
        raise MeshFormatError("truncated OFF file")
    try:
        n_pts, n_faces = int(rows[0][0]), int(rows[0][1])
    except (ValueError, IndexError) as exc:
        raise MeshFormatError(f"bad OFF count line: {rows[0]}") from exc
    body = rows[1:]
    if len(body) < n_pts + n_faces:
        raise MeshFormatError("truncated OFF file")
    verts = np.empty((n_pts, 2))
    for i in range(n_pts):
        row = body[i]
        try:
            coords = [float(x) for x in row]
        except ValueError as exc:
            raise MeshFormatError(f"bad OFF vertex: {row}") from exc
        if len(coords) not in (2, 3):
            raise MeshFormatError(f"OFF vertex needs 2 or 3 coords: {row}")
        if len(coords) == 3 and abs(coords[2]) > 1e-9:
            raise MeshFormatError("OFF mesh is not planar (z != 0)")
        verts[i] = coords[:2]
    tris = np.empty((n_faces, 3), dtype=np.int64)
    for i in range(n_faces):
        row = body[n_pts + i]
        try:
            cnt = int(row[0])
            if cnt != 3:
                raise MeshFormatError(f"only triangles supported, face has {cnt}")
            tris[i] = [int(row[1]), int(row[2]), int(row[3])]
        except (ValueError, IndexError) as exc:
            raise MeshFormatError(f"bad OFF face: {row}") from exc
    return TriMesh(verts, tris)


def write_off(mesh: TriMesh) -> str:
    lines = [f"OFF\n{mesh.n} {len(mesh.triangles)} 0"]
    for x, y in mesh.vertices:
        lines.append(f"{x:.17g} {y:.17g} 0")
    for a, b, c in mesh.triangles:
        lines.append(f"3 {a} {b} {c}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Structured generators (test corpus domains)
# ---------------------------------------------------------------------------

def generate_disk_mesh(rings: int) -> TriMesh:
    """Structured unit-disk mesh: concentric rings of 6*j vertices.

    Ring ``j`` sits at radius ``j/rings``; the outermost ring (6*rings
    vertices, exactly on the unit circle) forms the boundary.  Triangles come
    from a Delaunay triangulation of the ring points, so the result passes
    :func:`check_delaunay`.
    """
    if rings < 2:
        raise ValueError("rings must be >= 2")
    pts = [(0.0, 0.0)]
    for j in range(1, rings + 1):
        r = j / rings
        cnt = 6 * j
        ang = 2.0 * np.pi * np.arange(cnt) / cnt
        pts.extend(zip(r * np.cos(ang), r * np.sin(ang)))
    points = np.array(pts)
    return _delaunay_mesh(points)


def generate_rectangle_mesh(length: float, width: float, spacing: float,
                            seed: int = 0, jitter: float = 0.08) -> TriMesh:
    """Rectangle [0,length]x[0,width] filled with a staggered lattice.

    A high ``length/width`` ratio yields the corridor domains used to study
    kernel sparsity.
    """
    boundary = _polygon_points([(0, 0), (length, 0), (length, width), (0, width)],
                               spacing)
    interior = _staggered_interior(0, length, 0, width, spacing, seed, jitter)
    keep = (interior[:, 0] > 0.45 * spacing) & (interior[:, 0] < length - 0.45 * spacing) \
        & (interior[:, 1] > 0.45 * spacing) & (interior[:, 1] < width - 0.45 * spacing)
    points = np.vstack([boundary, interior[keep]])
    return _delaunay_mesh(points)


def generate_blob_mesh(spacing: float, radius: float = 1.0, amp: float = 0.35,
                       lobes: int = 3, seed: int = 0,
                       jitter: float = 0.08) -> TriMesh:
    """Concave (but simply connected) blob: r(t) = radius*(1 + amp*cos(lobes*t))."""
    t = np.linspace(0.0, 2 * np.pi, 4096, endpoint=False)
    r = radius * (1.0 + amp * np.cos(lobes * t))
    poly = np.column_stack([r * np.cos(t), r * np.sin(t)])
    boundary = _resample_closed(poly, spacing)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    interior = _staggered_interior(lo[0], hi[0], lo[1], hi[1], spacing, seed, jitter)
    inside = _points_in_polygon(interior, boundary)
    clear = _clearance(interior, boundary) > 0.45 * spacing
    points = np.vstack([boundary, interior[inside & clear]])
    return _delaunay_mesh(points, keep_polygon=boundary)


def generate_holes_mesh(spacing: float, size: tuple[float, float] = (2.0, 1.25),
                        holes: tuple = ((0.55, 0.42, 0.21), (1.42, 0.78, 0.23),
                                        (1.05, 0.3, 0.13)),
                        seed: int = 0, jitter: float = 0.08) -> TriMesh:
    """Rectangle with convex circular holes (multiply connected domain).

    ``holes`` are (cx, cy, radius) triples.  The coarse variant of this
    domain is where spurious minima of the non-harmonic distances show up.
    """
    w, h = size
    boundary = _polygon_points([(0, 0), (w, 0), (w, h), (0, h)], spacing)
    rings = []
    for cx, cy, r in holes:
        cnt = max(8, int(round(2 * np.pi * r / (0.9 * spacing))))
        ang = 2 * np.pi * np.arange(cnt) / cnt
        rings.append(np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)]))
    interior = _staggered_interior(0, w, 0, h, spacing, seed, jitter)
    keep = (interior[:, 0] > 0.45 * spacing) & (interior[:, 0] < w - 0.45 * spacing) \
        & (interior[:, 1] > 0.45 * spacing) & (interior[:, 1] < h - 0.45 * spacing)
    for cx, cy, r in holes:
        d = np.hypot(interior[:, 0] - cx, interior[:, 1] - cy)
        keep &= d > r + 0.45 * spacing
    points = np.vstack([boundary] + rings + [interior[keep]])
    mesh_pts, tris = _delaunay_raw(points)

    cen = mesh_pts[tris].mean(axis=1)
    drop = np.zeros(len(tris), dtype=bool)
    for cx, cy, r in holes:
        drop |= np.hypot(cen[:, 0] - cx, cen[:, 1] - cy) < r
    return _prune(mesh_pts, tris[~drop])


def _polygon_points(corners, spacing):
    corners = [np.asarray(c, dtype=float) for c in corners]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        seg = b - a
        cnt = max(1, int(round(np.hypot(*seg) / spacing)))
        for i in range(cnt):
            pts.append(a + seg * (i / cnt))
    return np.array(pts)


def _resample_closed(poly, spacing):
    d = np.diff(np.vstack([poly, poly[:1]]), axis=0)
    seglen = np.hypot(d[:, 0], d[:, 1])
    arclen = np.concatenate([[0.0], np.cumsum(seglen)])
    total = arclen[-1]
    cnt = max(8, int(round(total / spacing)))
    s = np.linspace(0.0, total, cnt, endpoint=False)
    closed = np.vstack([poly, poly[:1]])
    x = np.interp(s, arclen, closed[:, 0])
    y = np.interp(s, arclen, closed[:, 1])
    return np.column_stack([x, y])


def _staggered_interior(x0, x1, y0, y1, spacing, seed, jitter=0.08):
    rng = np.random.default_rng(seed)
    dy = spacing * math.sqrt(3.0) / 2.0
    rows = []
    j = 0
    y = y0 + dy
    while y < y1:
        off = 0.5 * spacing if j % 2 else 0.0
        xs = np.arange(x0 + spacing + off, x1 - 0.25 * spacing, spacing)
        if len(xs):
            pts = np.column_stack([xs, np.full(len(xs), y)])
            pts += (rng.random(pts.shape) - 0.5) * (jitter * spacing)
            rows.append(pts)
        y += dy
        j += 1
    if not rows:
        return np.empty((0, 2))
    return np.vstack(rows)


def _points_in_polygon(pts, poly):
    """Even-odd crossing test, vectorized over query points."""
    if len(pts) == 0:
        return np.zeros(0, dtype=bool)
    x, y = pts[:, 0], pts[:, 1]
    px, py = poly[:, 0], poly[:, 1]
    qx, qy = np.roll(px, -1), np.roll(py, -1)
    inside = np.zeros(len(pts), dtype=bool)
    for i in range(len(poly)):
        cond = (py[i] > y) != (qy[i] > y)
        if not cond.any():
            continue
        xin = (qx[i] - px[i]) * (y - py[i]) / (qy[i] - py[i]) + px[i]
        inside ^= cond & (x < xin)
    return inside


def _clearance(pts, poly):
    if len(pts) == 0:
        return np.empty(0)
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    denom = np.maximum((ab * ab).sum(axis=1), 1e-300)
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        ap = p - a
        t = np.clip((ap * ab).sum(axis=1) / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        d = proj - p
        out[i] = np.sqrt((d * d).sum(axis=1).min())
    return out


def _delaunay_raw(points):
    tri = Delaunay(points)
    tris = tri.simplices.astype(np.int64)
    areas = np.abs(_signed_areas(points, tris))
    scale2 = np.ptp(points, axis=0).max() ** 2
    return points, tris[areas > 1e-12 * scale2]


def _delaunay_mesh(points, keep_polygon=None):
    pts, tris = _delaunay_raw(points)
    if keep_polygon is not None:
        cen = pts[tris].mean(axis=1)
        keep = _points_in_polygon(cen, keep_polygon)
        tris = tris[keep]
    return _prune(pts, tris)


def _prune(points, tris):
    """Drop vertices not referenced by any kept triangle and reindex."""
    used = np.zeros(len(points), dtype=bool)
    used[tris.ravel()] = True
    remap = np.cumsum(used) - 1
    return TriMesh(points[used], remap[tris])
