"""SVG rendering: per-triangle field fill, iso-contours, path overlays.

Contours are extracted by marching over triangles: a level crossing a
triangle's linear interpolant enters and exits through two edges, giving one
segment per (triangle, level).  The output is standalone SVG 1.1 with no
external resources.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

import numpy as np

from .mesh import TriMesh

# Dark-blue -> teal -> yellow ramp (perceptually ordered, hand-picked stops).
_STOPS = np.array([
    (0.267, 0.005, 0.329),
    (0.283, 0.141, 0.458),
    (0.254, 0.265, 0.530),
    (0.207, 0.372, 0.553),
    (0.164, 0.471, 0.558),
    (0.128, 0.567, 0.551),
    (0.135, 0.659, 0.518),
    (0.267, 0.749, 0.441),
    (0.478, 0.821, 0.318),
    (0.741, 0.873, 0.150),
    (0.993, 0.906, 0.144),
])


def _colormap(t: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0) * (len(_STOPS) - 1)
    lo = np.floor(t).astype(int)
    hi = np.minimum(lo + 1, len(_STOPS) - 1)
    frac = (t - lo)[:, None]
    return _STOPS[lo] * (1 - frac) + _STOPS[hi] * frac


def _hex(rgb_row) -> str:
    r, g, b = (int(round(255 * c)) for c in rgb_row)
    return f"#{r:02x}{g:02x}{b:02x}"


def extract_contours(mesh: TriMesh, values, levels) -> list[tuple[float, np.ndarray]]:
    """Iso-contour segments per level: [(level, (s, 2, 2) array), ...].

    ``levels`` is an integer count (equally spaced strictly inside the value
    range) or an explicit sequence of levels.
    """
    vals = np.asarray(values, dtype=float)
    if isinstance(levels, int):
        lo, hi = float(vals.min()), float(vals.max())
        if hi <= lo:
            return []
        levels = lo + (hi - lo) * (np.arange(1, levels + 1) / (levels + 1))
    tri = mesh.triangles
    f = vals[tri]                      # (nt, 3)
    pts = mesh.vertices[tri]           # (nt, 3, 2)
    out = []
    pairs = ((0, 1), (1, 2), (2, 0))
    for level in levels:
        segs = []
        side = f > level
        crossing = (side.sum(axis=1) % 3) != 0  # not all same side
        for ti in np.flatnonzero(crossing):
            cut = []
            for a, b in pairs:
                fa, fb = f[ti, a], f[ti, b]
                if (fa > level) != (fb > level):
                    t = (level - fa) / (fb - fa)
                    cut.append(pts[ti, a] * (1 - t) + pts[ti, b] * t)
            if len(cut) == 2:
                segs.append(cut)
        if segs:
            out.append((float(level), np.asarray(segs)))
    return out


_PATH_COLORS = ("#ff4d4d", "#2e7d32", "#1565c0", "#ff9800", "#8e24aa", "#00838f")


def render_svg(mesh: TriMesh, values=None, paths=(), contour_levels: int = 10,
               source: int | None = None, target: int | None = None,
               width: int = 800) -> str:
    """Compose the SVG document; returns the XML text."""
    lo, hi = mesh.bbox
    span = np.maximum(hi - lo, 1e-12)
    height = int(round(width * span[1] / span[0]))
    pad = 0.02 * max(span)

    def sx(x):
        return (x - lo[0] + pad) * width / (span[0] + 2 * pad)

    def sy(y):
        return height - (y - lo[1] + pad) * height / (span[1] + 2 * pad)

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                     width=str(width), height=str(height), version="1.1")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(width),
                  height=str(height), fill="#ffffff")

    if values is not None:
        vals = np.asarray(values, dtype=float)
        tri_vals = vals[mesh.triangles].mean(axis=1)
        vmin, vmax = float(vals.min()), float(vals.max())
        rng = vmax - vmin if vmax > vmin else 1.0
        colors = _colormap((tri_vals - vmin) / rng)
        grp = ET.SubElement(svg, "g", attrib={"stroke": "none"})
        for ti, tri in enumerate(mesh.triangles):
            pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in mesh.vertices[tri])
            ET.SubElement(grp, "polygon", points=pts, fill=_hex(colors[ti]))
        if contour_levels:
            cgrp = ET.SubElement(svg, "g", attrib={
                "stroke": "#ffffff", "stroke-width": "1", "fill": "none"})
            for _, segs in extract_contours(mesh, vals, contour_levels):
                d = " ".join(
                    f"M {sx(s[0][0]):.2f} {sy(s[0][1]):.2f} "
                    f"L {sx(s[1][0]):.2f} {sy(s[1][1]):.2f}"
                    for s in segs
                )
                ET.SubElement(cgrp, "path", d=d)
    else:
        grp = ET.SubElement(svg, "g", attrib={
            "stroke": "#cccccc", "stroke-width": "0.5", "fill": "none"})
        for tri in mesh.triangles:
            pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in mesh.vertices[tri])
            ET.SubElement(grp, "polygon", points=pts)

    for i, poly in enumerate(paths):
        poly = np.asarray(poly, dtype=float)
        if len(poly) == 0:
            continue
        d = "M " + " L ".join(f"{sx(x):.2f} {sy(y):.2f}" for x, y in poly)
        ET.SubElement(svg, "path", d=d, fill="none",
                      stroke=_PATH_COLORS[i % len(_PATH_COLORS)],
                      attrib={"stroke-width": "2.5"})

    for vert, color in ((source, "#00c853"), (target, "#d50000")):
        if vert is None:
            continue
        x, y = mesh.vertices[vert]
        ET.SubElement(svg, "circle", cx=f"{sx(x):.2f}", cy=f"{sy(y):.2f}",
                      r="5", fill=color, stroke="#ffffff",
                      attrib={"stroke-width": "1.5"})

    return ET.tostring(svg, encoding="unicode", xml_declaration=True) + "\n"
