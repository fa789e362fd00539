"""Gradient-descent path tracing over per-vertex scalar fields.

Two tracers: ``edge_descent`` walks vertex to vertex along the steepest
value drop; ``triangle_descent`` follows the piecewise-constant negative
gradient of the linear interpolant through triangle interiors, falling back
to the steepest incident edge at vertices where no triangle admits the
descent direction, and terminating on any edge incident to the target.

Field values along edges and inside triangles are linear interpolants of
the vertex values; the tracers never re-query a solver.  All tie-breaking
is by lowest index (neighbor vertex, then edge, then triangle), so traces
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .config import DEFAULTS, Settings
from .errors import DegenerateGeometryError, InvalidTargetError
from .mesh import TriMesh
from .solvers import ScalarField

STATUS_REACHED = "reached"
STATUS_STUCK = "stuck"
STATUS_MAX_STEPS = "max-steps-exceeded"


@dataclass(frozen=True)
class TracedPath:
    """A polyline of mesh-located points from source toward target."""

    points: np.ndarray          # (N, 2)
    locations: list            # ('vertex', i) | ('edge', i, j, t)
    source: int
    target: int
    status: str
    stuck_vertex: int | None = None

    def __post_init__(self):
        self.points.setflags(write=False)

    @property
    def length(self) -> float:
        if len(self.points) < 2:
            return 0.0
        d = np.diff(self.points, axis=0)
        return float(np.hypot(d[:, 0], d[:, 1]).sum())

    @property
    def reached(self) -> bool:
        return self.status == STATUS_REACHED


def location_values(field: ScalarField, path: TracedPath) -> np.ndarray:
    """Interpolated field values at each sampled path location."""
    vals = field.values
    out = np.empty(len(path.locations))
    for i, loc in enumerate(path.locations):
        if loc[0] == "vertex":
            out[i] = vals[loc[1]]
        else:
            _, a, b, t = loc
            out[i] = (1.0 - t) * vals[a] + t * vals[b]
    return out


def edge_descent(mesh: TriMesh, field: ScalarField, source: int,
                 settings: Settings = DEFAULTS) -> TracedPath:
    """Vertex walk choosing the neighbor with the largest value drop."""
    target = field.target
    if source == target:
        raise InvalidTargetError("source equals target")
    vals = field.values
    cap = settings.step_cap_factor * mesh.n
    cur = source
    pts = [mesh.vertices[cur]]
    locs = [("vertex", cur)]
    for _ in range(cap):
        if cur == target:
            return TracedPath(np.array(pts), locs, source, target, STATUS_REACHED)
        nbrs = mesh.neighbors[cur]
        drops = vals[cur] - vals[nbrs]
        best = int(np.argmax(drops))  # neighbors sorted, so ties pick lowest
        if drops[best] <= 0.0:
            return TracedPath(np.array(pts), locs, source, target,
                              STATUS_STUCK, stuck_vertex=cur)
        cur = int(nbrs[best])
        pts.append(mesh.vertices[cur])
        locs.append(("vertex", cur))
    return TracedPath(np.array(pts), locs, source, target, STATUS_MAX_STEPS)


# ---------------------------------------------------------------------------
# Triangle-based tracing
# ---------------------------------------------------------------------------

def _perp(v):
    return np.array([-v[1], v[0]])


def _bary_gradients(mesh: TriMesh, ti: int):
    """Gradients of the three barycentric coordinate functions (CCW)."""
    a, b, c = mesh.triangles[ti]
    pa, pb, pc = mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]
    area2 = 2.0 * mesh.triangle_areas[ti]
    return np.array([_perp(pc - pb), _perp(pa - pc), _perp(pb - pa)]) / area2


def triangle_gradient(mesh: TriMesh, field_values, ti: int) -> np.ndarray:
    """Gradient of the linear interpolant on triangle ti (exact for affine)."""
    if mesh.triangle_areas[ti] <= 0:
        raise DegenerateGeometryError(f"triangle {ti} is degenerate")
    vals = np.asarray(field_values if not isinstance(field_values, ScalarField)
                      else field_values.values)
    grads = _bary_gradients(mesh, ti)
    f = vals[mesh.triangles[ti]]
    return f @ grads


def _cross2(u, w):
    return u[0] * w[1] - u[1] * w[0]


def _barycentric(mesh, ti, x):
    a, b, c = mesh.triangles[ti]
    pa, pb, pc = mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]
    area2 = 2.0 * mesh.triangle_areas[ti]
    la = _cross2(pc - pb, x - pb) / area2
    lb = _cross2(pa - pc, x - pc) / area2
    return np.array([la, lb, 1.0 - la - lb])


class _Tracer:
    def __init__(self, mesh, field, source, settings):
        self.mesh = mesh
        self.vals = field.values
        self.target = field.target
        self.cap = settings.step_cap_factor * mesh.n
        self.eps_prog = 1e-14 * mesh.bbox_diagonal
        self.pts = [mesh.vertices[source].copy()]
        self.locs = [("vertex", source)]
        self.source = source

    def emit(self, status, stuck=None):
        return TracedPath(np.array(self.pts), self.locs, self.source,
                          self.target, status, stuck_vertex=stuck)

    def append_vertex(self, v):
        self.pts.append(self.mesh.vertices[v].copy())
        self.locs.append(("vertex", v))

    def append_edge_point(self, x, i, j, t):
        self.pts.append(np.asarray(x, dtype=float))
        self.locs.append(("edge", int(i), int(j), float(t)))

    # -- vertex rule -------------------------------------------------------

    def step_from_vertex(self, v):
        """Returns the next state tuple or a finished TracedPath."""
        mesh, vals = self.mesh, self.vals
        if v == self.target:
            return self.emit(STATUS_REACHED)
        best = None
        for ti in mesh.vertex_triangles[v]:
            g = triangle_gradient(mesh, vals, ti)
            norm = float(np.hypot(*g))
            if norm <= 0.0:
                continue
            d = -g / norm
            tri = mesh.triangles[ti]
            slot = int(np.flatnonzero(tri == v)[0])
            grads = _bary_gradients(mesh, ti)
            dlam = grads @ d
            others = [s for s in range(3) if s != slot]
            scale = np.abs(dlam).max() + 1e-300
            if dlam[others[0]] > 1e-12 * scale and dlam[others[1]] > 1e-12 * scale:
                if best is None or norm > best[0]:
                    best = (norm, int(ti), d)
        if best is not None:
            _, ti, d = best
            return ("tri", ti, self.mesh.vertices[v].copy(), vals[v])
        # Fallback: steepest incident edge.
        nbrs = mesh.neighbors[v]
        diffs = vals[v] - vals[nbrs]
        lens = np.hypot(*(mesh.vertices[nbrs] - mesh.vertices[v]).T)
        slopes = diffs / lens
        best_i = int(np.argmax(slopes))
        if slopes[best_i] <= 0.0:
            return self.emit(STATUS_STUCK, stuck=v)
        u = int(nbrs[best_i])
        self.append_vertex(u)
        return ("vertex", u)

    # -- triangle rule -------------------------------------------------------

    def step_through_triangle(self, ti, x, cur_val):
        mesh, vals = self.mesh, self.vals
        tri = mesh.triangles[ti]
        g = triangle_gradient(mesh, vals, ti)
        norm = float(np.hypot(*g))
        if norm <= 0.0:
            return self._slide_to_best_vertex(tri, cur_val)
        d = -g / norm
        lam = np.clip(_barycentric(mesh, ti, x), 0.0, None)
        lam /= lam.sum()
        grads = _bary_gradients(mesh, ti)
        dlam = grads @ d
        scale = np.abs(dlam).max() + 1e-300
        s_exit, slot_exit = np.inf, -1
        for s in range(3):
            if dlam[s] < -1e-14 * scale and lam[s] > 0.0:
                cand = lam[s] / -dlam[s]
                if cand < s_exit:
                    s_exit, slot_exit = cand, s
        if not np.isfinite(s_exit):
            return self._slide_to_best_vertex(tri, cur_val)
        lam_exit = lam + s_exit * dlam
        lam_exit[slot_exit] = 0.0
        lam_exit = np.clip(lam_exit, 0.0, None)
        lam_exit /= lam_exit.sum()
        # Exit exactly through a vertex: restart with the vertex rule.
        hi = int(np.argmax(lam_exit))
        if lam_exit[hi] > 1.0 - 1e-12:
            w = int(tri[hi])
            if not self._progress_ok(mesh.vertices[w]):
                return self.emit(STATUS_STUCK, stuck=self._nearest_vertex(x))
            self.append_vertex(w)
            return ("vertex", w)
        others = [s for s in range(3) if s != slot_exit]
        i, j = int(tri[others[0]]), int(tri[others[1]])
        if i > j:
            i, j = j, i
            others = others[::-1]
        t_param = float(lam_exit[others[1]])
        xe = lam_exit @ mesh.vertices[tri]
        if not self._progress_ok(xe):
            return self.emit(STATUS_STUCK, stuck=self._nearest_vertex(x))
        self.append_edge_point(xe, i, j, t_param)
        val_exit = float(lam_exit @ vals[tri])
        if self.target in (i, j):
            self.append_vertex(self.target)
            return self.emit(STATUS_REACHED)
        adj = self.mesh.edge_adjacency[(i, j)]
        nxt = [tt for tt in adj if tt != ti]
        if not nxt:
            return self._slide_along_edge(i, j, val_exit, x)
        nt = int(nxt[0])
        if self._enters(nt, (i, j)):
            return ("tri", nt, xe, val_exit)
        return self._slide_along_edge(i, j, val_exit, xe)

    def _enters(self, ti, edge):
        g = triangle_gradient(self.mesh, self.vals, ti)
        norm = float(np.hypot(*g))
        if norm <= 0.0:
            return False
        d = -g / norm
        tri = self.mesh.triangles[ti]
        (slot_opp,) = [s for s in range(3) if tri[s] not in edge]
        dlam = _bary_gradients(self.mesh, ti) @ d
        scale = np.abs(dlam).max() + 1e-300
        return dlam[slot_opp] > 1e-12 * scale

    def _slide_along_edge(self, i, j, cur_val, x):
        vals = self.vals
        w = min((i, j), key=lambda u: (vals[u], u))
        if vals[w] >= cur_val:
            return self.emit(STATUS_STUCK, stuck=self._nearest_vertex(x))
        self.append_vertex(w)
        return ("vertex", w)

    def _slide_to_best_vertex(self, tri, cur_val):
        vals = self.vals
        w = min((int(u) for u in tri), key=lambda u: (vals[u], u))
        if vals[w] >= cur_val:
            return self.emit(STATUS_STUCK, stuck=w)
        self.append_vertex(w)
        return ("vertex", w)

    def _progress_ok(self, xnew):
        return float(np.hypot(*(xnew - self.pts[-1]))) >= self.eps_prog

    def _nearest_vertex(self, x):
        d = self.mesh.vertices - x
        return int(np.argmin(np.hypot(d[:, 0], d[:, 1])))


def triangle_descent(mesh: TriMesh, field: ScalarField, source: int,
                     settings: Settings = DEFAULTS) -> TracedPath:
    """Trace the negative interpolant gradient through triangle interiors."""
    if source == field.target:
        raise InvalidTargetError("source equals target")
    tr = _Tracer(mesh, field, source, settings)
    state = ("vertex", source)
    for _ in range(tr.cap):
        if state[0] == "vertex":
            state = tr.step_from_vertex(state[1])
        else:
            _, ti, x, cur_val = state
            state = tr.step_through_triangle(ti, x, cur_val)
        if isinstance(state, TracedPath):
            return state
    return tr.emit(STATUS_MAX_STEPS)


# ---------------------------------------------------------------------------
# Audits and path metrics
# ---------------------------------------------------------------------------

def find_local_minima(mesh: TriMesh, field: ScalarField) -> list[int]:
    """Vertices (excluding the target) strictly below every edge neighbor."""
    vals = field.values
    out = []
    for v in range(mesh.n):
        if v == field.target:
            continue
        nbrs = mesh.neighbors[v]
        if len(nbrs) and np.all(vals[v] < vals[nbrs]):
            out.append(v)
    return out


def resample_polyline(points: np.ndarray, step: float) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return pts.reshape(-1, 2)
    d = np.diff(pts, axis=0)
    seg = np.hypot(d[:, 0], d[:, 1])
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1]
    if total <= 0:
        return pts[:1]
    cnt = max(2, int(np.ceil(total / step)) + 1)
    s = np.linspace(0.0, total, cnt)
    return np.column_stack([np.interp(s, arc, pts[:, 0]),
                            np.interp(s, arc, pts[:, 1])])


def path_hausdorff(a: TracedPath | np.ndarray, b: TracedPath | np.ndarray,
                   step: float | None = None) -> float:
    """Symmetric Hausdorff distance between two densely resampled polylines.

    ``step`` defaults to a quarter of the shortest segment present in either
    polyline; pass ``mesh.min_edge_length() / 4`` to resolve at mesh scale.
    """
    pa = a.points if isinstance(a, TracedPath) else np.asarray(a, dtype=float)
    pb = b.points if isinstance(b, TracedPath) else np.asarray(b, dtype=float)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("paths must be nonempty")
    if step is None:
        segs = []
        for p in (pa, pb):
            if len(p) > 1:
                d = np.diff(p, axis=0)
                s = np.hypot(d[:, 0], d[:, 1])
                s = s[s > 0]
                if len(s):
                    segs.append(s.min())
        step = min(segs) / 4.0 if segs else 1.0
    ra = resample_polyline(pa, step)
    rb = resample_polyline(pb, step)
    da = cKDTree(rb).query(ra)[0].max()
    db = cKDTree(ra).query(rb)[0].max()
    return float(max(da, db))
