"""Structured triangulations of the closed unit disc.

The level-0 mesh is the fan of three triangles over the boundary points at
angles 0, 2pi/3 and 4pi/3; each refinement level splits every triangle in
four through edge midpoints, with midpoints of boundary edges projected
radially onto the circle.  Chord midpoints project to arc midpoints, so the
boundary vertices of a level-L mesh sit at 3 * 2^L equally spaced angles and
the three original anchor vertices stay at positions 0, 2^L and 2 * 2^L of
the boundary cycle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .norms import StructureError

__all__ = ["DiscMesh", "build_mesh"]


@dataclass(frozen=True)
class DiscMesh:
    """Conforming, positively oriented triangulation of the unit disc.

    vertices : (V, 2) float array
    triangles : (T, 3) int array, counterclockwise
    boundary : (B,) int array, the boundary cycle ordered by angle starting
        at the vertex on the positive x axis
    anchors : (3,) int array, positions WITHIN the boundary cycle of the
        three gauge vertices (angles 0, 2pi/3, 4pi/3)
    level : refinement level
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    anchors: np.ndarray
    level: int
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def interior(self):
        """Indices of the non-boundary vertices."""
        key = "interior"
        if key not in self._cache:
            mask = np.ones(len(self.vertices), dtype=bool)
            mask[self.boundary] = False
            self._cache[key] = np.nonzero(mask)[0]
        return self._cache[key]

    @property
    def signed_areas(self):
        key = "areas"
        if key not in self._cache:
            v = self.vertices
            a, b, c = (v[self.triangles[:, m]] for m in range(3))
            e1, e2 = b - a, c - a
            self._cache[key] = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        return self._cache[key]

    @property
    def ref_inverse(self):
        """Per-triangle inverse of the edge matrix [v1-v0, v2-v0]."""
        key = "ginv"
        if key not in self._cache:
            v = self.vertices
            a, b, c = (v[self.triangles[:, m]] for m in range(3))
            e = np.stack([b - a, c - a], axis=2)  # (T, 2, 2), edges as columns
            self._cache[key] = np.ascontiguousarray(np.linalg.inv(e))
        return self._cache[key]

    @property
    def boundary_angles(self):
        key = "angles"
        if key not in self._cache:
            p = self.vertices[self.boundary]
            ang = np.arctan2(p[:, 1], p[:, 0])
            self._cache[key] = np.where(ang < -1e-12, ang + 2.0 * math.pi, ang)
        return self._cache[key]

    def locate(self, points):
        """Containing triangle and barycentric coordinates per query point.

        Brute force over triangles; fine at the mesh sizes used here.
        Points outside every triangle (beyond a 1e-9 slack) get index -1.
        """
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        v = self.vertices
        a = v[self.triangles[:, 0]]
        d = points[:, None, :] - a[None, :, :]  # (P, T, 2)
        g = self.ref_inverse  # (T, 2, 2) inverse of columns [e1 e2]
        lam1 = g[None, :, 0, 0] * d[:, :, 0] + g[None, :, 0, 1] * d[:, :, 1]
        lam2 = g[None, :, 1, 0] * d[:, :, 0] + g[None, :, 1, 1] * d[:, :, 1]
        lam0 = 1.0 - lam1 - lam2
        inside = np.minimum(np.minimum(lam0, lam1), lam2)
        tri = inside.argmax(axis=1)
        best = inside[np.arange(len(points)), tri]
        tri = np.where(best >= -1e-9, tri, -1)
        rows = np.arange(len(points))
        bary = np.stack([lam0[rows, tri], lam1[rows, tri], lam2[rows, tri]], axis=1)
        return tri, bary

    def interpolate(self, values, points):
        """Piecewise-linear interpolation of per-vertex values at points."""
        tri, bary = self.locate(points)
        if np.any(tri < 0):
            raise StructureError("interpolation point outside the mesh")
        corners = self.triangles[tri]
        vals = np.asarray(values, dtype=np.float64)
        return np.einsum("pm,pm...->p...", bary, vals[corners])


def _validate(mesh):
    if np.any(mesh.signed_areas <= 0.0):
        raise StructureError("degenerate or misoriented triangle in mesh")
    edges = {}
    for t, (i, j, k) in enumerate(mesh.triangles):
        for a, b in ((i, j), (j, k), (k, i)):
            edges.setdefault((min(a, b), max(a, b)), []).append((a, b))
    rim = set()
    for key, owners in edges.items():
        if len(owners) > 2:
            raise StructureError("non-conforming mesh edge")
        if len(owners) == 2 and owners[0] == owners[1]:
            raise StructureError("inconsistent orientation across an edge")
        if len(owners) == 1:
            rim.update(key)
    if rim != set(mesh.boundary.tolist()):
        raise StructureError("boundary cycle does not match rim edges")


def build_mesh(level):
    """Deterministic disc triangulation with 3 * 4^level triangles."""
    if not 0 <= int(level) <= 8:
        raise StructureError("mesh level must be in 0..8")
    level = int(level)
    third = 2.0 * math.pi / 3.0
    verts = [
        (0.0, 0.0),
        (1.0, 0.0),
        (math.cos(third), math.sin(third)),
        (math.cos(2.0 * third), math.sin(2.0 * third)),
    ]
    on_rim = [False, True, True, True]
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 1)]

    for _ in range(level):
        cache = {}

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            if key in cache:
                return cache[key]
            x = 0.5 * (verts[a][0] + verts[b][0])
            y = 0.5 * (verts[a][1] + verts[b][1])
            rim = on_rim[a] and on_rim[b]
            if rim:
                r = math.hypot(x, y)
                x, y = x / r, y / r
            verts.append((x, y))
            on_rim.append(rim)
            cache[key] = len(verts) - 1
            return cache[key]

        nxt = []
        for i, j, k in tris:
            a, b, c = midpoint(i, j), midpoint(j, k), midpoint(k, i)
            nxt += [(i, a, c), (a, j, b), (c, b, k), (a, b, c)]
        tris = nxt

    vertices = np.array(verts, dtype=np.float64)
    rim_idx = np.nonzero(np.array(on_rim))[0]
    ang = np.arctan2(vertices[rim_idx, 1], vertices[rim_idx, 0]) % (2.0 * math.pi)
    boundary = rim_idx[np.argsort(ang)]
    start = int(np.nonzero(boundary == 1)[0][0])
    boundary = np.roll(boundary, -start)
    step = 2**level
    anchors = np.array([0, step, 2 * step])
    if not np.array_equal(boundary[anchors], [1, 2, 3]):
        raise StructureError("gauge anchors lost during refinement")
    mesh = DiscMesh(
        vertices=vertices,
        triangles=np.array(tris, dtype=np.int64),
        boundary=boundary,
        anchors=anchors,
        level=level,
    )
    _validate(mesh)
    return mesh
