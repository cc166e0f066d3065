"""Hand-rolled SVG emission for meshes and norm bodies.

No plotting dependency: figures are assembled as plain SVG strings with
fixed canvas sizes and deterministic number formatting, so identical
inputs yield byte-identical files.
"""
from __future__ import annotations

import numpy as np

from . import convex
from .norms import StructureError, quasiconformality
from .plateau import triangle_norms

__all__ = [
    "mesh_figure",
    "image_figure",
    "plateau_figure",
    "norm_figure",
    "write_svg",
]


def _fmt(x):
    s = f"{float(x):.5g}"
    return "0" if s == "-0" else s


class _Frame:
    """Affine world -> canvas map (y flipped) for one drawing panel."""

    def __init__(self, points, size=420.0, margin=24.0, x0=0.0):
        pts = np.asarray(points, dtype=float)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-12))
        self.scale = (size - 2.0 * margin) / span
        self.cx = 0.5 * (lo[0] + hi[0])
        self.cy = 0.5 * (lo[1] + hi[1])
        self.size = size
        self.x0 = x0

    def map(self, pts):
        pts = np.asarray(pts, dtype=float)
        out = np.empty_like(pts)
        out[..., 0] = self.x0 + 0.5 * self.size + self.scale * (pts[..., 0] - self.cx)
        out[..., 1] = 0.5 * self.size - self.scale * (pts[..., 1] - self.cy)
        return out

    def path(self, pts, closed=True):
        q = self.map(pts)
        coords = " L".join(f"{_fmt(p[0])},{_fmt(p[1])}" for p in q)
        return f"M{coords}" + ("Z" if closed else "")


def _document(body, width, height):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )
    return head + f'<rect width="100%" height="100%" fill="white"/>' + body + "</svg>"


# three-stop ramp, low = blue, mid = pale yellow, high = red
_STOPS = np.array([[69.0, 117.0, 180.0], [255.0, 255.0, 191.0], [215.0, 48.0, 39.0]])


def _ramp(t):
    t = min(max(float(t), 0.0), 1.0)
    if t <= 0.5:
        c = _STOPS[0] + 2.0 * t * (_STOPS[1] - _STOPS[0])
    else:
        c = _STOPS[1] + (2.0 * t - 1.0) * (_STOPS[2] - _STOPS[1])
    return f"rgb({int(round(c[0]))},{int(round(c[1]))},{int(round(c[2]))})"


def _legend(x, y, height, lo, hi, steps=48):
    parts = []
    bar = height - 18.0
    for i in range(steps):
        t = (i + 0.5) / steps
        yy = y + bar * (1.0 - (i + 1.0) / steps)
        parts.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(yy)}" width="14" '
            f'height="{_fmt(bar / steps + 0.5)}" fill="{_ramp(t)}"/>'
        )
    for t, v in ((0.0, lo), (1.0, hi)):
        yy = y + bar * (1.0 - t) + 4.0
        parts.append(
            f'<text x="{_fmt(x + 18)}" y="{_fmt(yy)}" font-family="sans-serif" '
            f'font-size="11">{_fmt(v)}</text>'
        )
    return "".join(parts)


def mesh_figure(u, values=None, vmin=None, vmax=None, title="", size=420.0):
    """Planar disc mesh with per-triangle fills.

    ``values`` is one number per triangle (NaN = degenerate, drawn gray);
    omitted values draw a plain wireframe.  Returns the SVG text.
    """
    frame = _Frame(u.mesh.vertices, size=size)
    body = []
    tris = u.mesh.triangles
    if values is not None:
        values = np.asarray(values, dtype=float)
        finite = values[np.isfinite(values)]
        lo = float(finite.min()) if vmin is None and finite.size else (vmin or 0.0)
        hi = float(finite.max()) if vmax is None and finite.size else (vmax or 1.0)
        if hi - lo < 1e-12:
            hi = lo + 1e-12
    for t in range(tris.shape[0]):
        tri = u.mesh.vertices[tris[t]]
        if values is None:
            fill = "none"
        elif not np.isfinite(values[t]):
            fill = "rgb(160,160,160)"
        else:
            fill = _ramp((values[t] - lo) / (hi - lo))
        body.append(
            f'<path d="{frame.path(tri)}" fill="{fill}" '
            f'stroke="rgb(70,70,70)" stroke-width="0.4"/>'
        )
    if title:
        body.append(
            f'<text x="{_fmt(frame.x0 + 10)}" y="16" font-family="sans-serif" '
            f'font-size="13">{title}</text>'
        )
    width = size
    if values is not None:
        body.append(_legend(size - 60.0, 34.0, size - 60.0, lo, hi))
    return _document("".join(body), width, size)


def image_figure(u, size=420.0, title=""):
    """Image of the disc mesh in a 2-dimensional target plane."""
    if u.images.shape[1] != 2:
        raise StructureError("image figure requires a 2-dimensional target")
    frame = _Frame(u.images, size=size)
    body = []
    for t in range(u.mesh.triangles.shape[0]):
        tri = u.images[u.mesh.triangles[t]]
        body.append(
            f'<path d="{frame.path(tri)}" fill="rgb(222,235,247)" '
            f'fill-opacity="0.6" stroke="rgb(70,70,130)" stroke-width="0.4"/>'
        )
    trace = u.images[u.mesh.boundary]
    body.append(
        f'<path d="{frame.path(trace)}" fill="none" '
        f'stroke="rgb(180,30,30)" stroke-width="1.6"/>'
    )
    for k in u.mesh.anchors:
        p = frame.map(u.images[u.mesh.boundary[k]])
        body.append(
            f'<circle cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" r="3.5" '
            f'fill="rgb(180,30,30)"/>'
        )
    if title:
        body.append(
            f'<text x="{_fmt(frame.x0 + 10)}" y="16" font-family="sans-serif" '
            f'font-size="13">{title}</text>'
        )
    return _document("".join(body), size, size)


def plateau_figure(u, samples=1024, size=420.0):
    """Two-panel report figure for a disc map.

    Left: the planar mesh colored by per-triangle quasiconformality
    (degenerate triangles gray).  Right, for 2-dimensional targets: the
    image mesh with the boundary trace and anchors marked.
    """
    qc = np.array(
        [quasiconformality(n, samples=samples) if n.is_norm else np.nan
         for n in triangle_norms(u)]
    )
    left = mesh_figure(u, values=qc, vmin=1.0, title="per-triangle QC", size=size)
    if u.images.shape[1] != 2:
        return left
    right = image_figure(u, size=size, title=f"image mesh ({u.target.label()})")
    inner_l = left[left.index(">") + 1: left.rindex("</svg>")]
    inner_r = right[right.index(">") + 1: right.rindex("</svg>")]
    body = inner_l + f'<g transform="translate({_fmt(size)},0)">{inner_r}</g>'
    return _document(body, 2.0 * size, size)


def norm_figure(norm, count=256, size=420.0):
    """Unit ball with its inscribed ellipse, minimal enclosing
    parallelogram, and polar dual overlaid."""
    half = norm.half_vertices(count)
    ball = convex.full_polygon(half)
    ell = convex.loewner_ellipse(half)
    par = convex.min_enclosing_parallelogram(half)
    dual = convex.full_polygon(convex.polar_dual(half))
    frame = _Frame(np.vstack([ball, par.corners(), dual]), size=size)
    body = [
        f'<path d="{frame.path(dual)}" fill="none" stroke="rgb(150,150,150)" '
        f'stroke-width="1" stroke-dasharray="5,3"/>',
        f'<path d="{frame.path(par.corners())}" fill="none" '
        f'stroke="rgb(60,130,60)" stroke-width="1.4"/>',
        f'<path d="{frame.path(ball)}" fill="rgb(222,235,247)" '
        f'fill-opacity="0.7" stroke="rgb(40,80,150)" stroke-width="1.8"/>',
        f'<path d="{frame.path(ell.boundary_points(count))}" fill="none" '
        f'stroke="rgb(190,60,40)" stroke-width="1.4"/>',
    ]
    labels = (
        ("ball", "rgb(40,80,150)"),
        ("inscribed ellipse", "rgb(190,60,40)"),
        ("min parallelogram", "rgb(60,130,60)"),
        ("dual ball", "rgb(150,150,150)"),
    )
    for i, (text, color) in enumerate(labels):
        body.append(
            f'<text x="10" y="{_fmt(18 + 15 * i)}" font-family="sans-serif" '
            f'font-size="12" fill="{color}">{text}</text>'
        )
    return _document("".join(body), size, size)


def write_svg(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
