"""Discrete Plateau problem for disc-type maps into normed spaces.

A candidate surface is a piecewise-linear map from a triangulated disc
(``nal.mesh``) into R^n carrying a norm.  On each triangle the differential
Du is constant, so the pulled-back seminorm v -> N(Du v) is exact, and
energies and areas of the map are plain weighted sums over triangles:

    E_I(u)     = sum_t w_t * I(N o Du_t)
    Area_mu(u) = sum_t w_t * J^mu(N o Du_t)

The boundary trace is constrained to a Jordan polygon Gamma: boundary
vertices carry arclength parameters, weakly monotone along the curve, with
three anchor parameters frozen to kill the conformal gauge.

Minimization runs on a smoothed objective (max terms relaxed to p-norms
with p ramped upward), then a pattern-search polish certifies the final
value on the exact, unsmoothed functional.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any

import numpy as np
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

from . import _kernels, convex
from .areas import AreaDef, induced_area, jacobian
from .mesh import DiscMesh, build_mesh
from .norms import (
    Norm2,
    StructureError,
    _hull_half_list,
    degenerate_norm,
    euclidean,
    lp_norm,
    polygon_norm,
    polygon_norm_hull,
    quasiconformality,
    unit_vectors,
    zero_seminorm,
)
from .orbit import normalizer, orbit_minimize

__all__ = [
    "NormedTarget",
    "sup_plane",
    "euclid_target",
    "lp_target",
    "polyhedral_target",
    "target_from_spec",
    "BoundaryCurve",
    "circle_curve",
    "square_curve",
    "curve_from_file",
    "DiscMap",
    "initial_map",
    "map_energy",
    "map_area",
    "triangle_norms",
    "minimize_energy",
    "minimize_area",
    "MinimizeInfo",
    "inner_variation_decrease",
    "inner_variation_test",
    "InnerVariationReport",
    "verify_main_lemma",
    "MainLemmaReport",
    "compare_energy_vs_area_minimizer",
    "CompareReport",
    "mobius_points",
    "resample",
]


# ---------------------------------------------------------------------------
# targets


@dataclass(frozen=True)
class NormedTarget:
    """A finite-dimensional normed space R^n, n >= 2.

    kind "polyhedral" evaluates max_l |<funcs[l], y>|; "euclid" and "lp"
    are the usual formulas.
    """

    kind: str
    dim: int
    funcs: Any = None
    p: float = 2.0

    def __post_init__(self):
        if self.dim < 2:
            raise StructureError("target dimension must be at least 2")
        if self.kind == "polyhedral":
            f = np.asarray(self.funcs, dtype=np.float64)
            if f.ndim != 2 or f.shape[1] != self.dim:
                raise StructureError("functional list shape mismatch")
            if np.linalg.matrix_rank(f, tol=1e-12) < self.dim:
                raise StructureError("functionals do not span the target")
            object.__setattr__(self, "funcs", f)
        elif self.kind == "lp":
            if not self.p >= 1.0:
                raise StructureError("lp target needs p >= 1")
        elif self.kind != "euclid":
            raise StructureError(f"unknown target kind {self.kind!r}")

    def gauge(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        if self.kind == "polyhedral":
            return np.abs(pts @ self.funcs.T).max(axis=-1)
        if self.kind == "euclid":
            return np.sqrt((pts * pts).sum(axis=-1))
        a = np.abs(pts)
        m = a.max(axis=-1, keepdims=True)
        m = np.where(m > 0.0, m, 1.0)
        out = np.squeeze(m, -1) * ((a / m) ** self.p).sum(axis=-1) ** (1.0 / self.p)
        return out

    def plane_norm(self):
        """The target norm as a Norm2; planar targets only."""
        if self.dim != 2:
            raise StructureError("plane_norm needs a 2-dimensional target")
        if self.kind == "euclid":
            return euclidean()
        if self.kind == "lp":
            return lp_norm(self.p)
        return polygon_norm(convex.polar_dual(_hull_half_list(self.funcs)))

    def label(self):
        if self.kind == "polyhedral":
            rows = ";".join(",".join(f"{c:g}" for c in row) for row in self.funcs)
            return f"polyhedral:{rows}"
        if self.kind == "euclid":
            return "euclid" if self.dim == 2 else f"euclid:{self.dim}"
        return f"lp:{self.p:g}" if self.dim == 2 else f"lp:{self.p:g}:{self.dim}"


def sup_plane():
    """R^2 with the sup norm; the unit ball is the square [-1, 1]^2."""
    return NormedTarget("polyhedral", 2, funcs=[[1.0, 0.0], [0.0, 1.0]])


def euclid_target(dim=2):
    return NormedTarget("euclid", dim)


def lp_target(p, dim=2):
    return NormedTarget("lp", dim, p=float(p))


def polyhedral_target(funcs):
    funcs = np.asarray(funcs, dtype=np.float64)
    return NormedTarget("polyhedral", funcs.shape[1], funcs=funcs)


def target_from_spec(text):
    """Parse ``sup`` | ``euclid[:n]`` | ``lp:p[:n]`` | ``polyhedral:x,y;...``."""
    text = text.strip()
    try:
        if text == "sup":
            return sup_plane()
        if text == "euclid" or text.startswith("euclid:"):
            return euclid_target(int(text[7:]) if ":" in text else 2)
        if text.startswith("lp:"):
            parts = text[3:].split(":")
            return lp_target(float(parts[0]), int(parts[1]) if len(parts) > 1 else 2)
        if text.startswith("polyhedral:"):
            rows = [[float(c) for c in row.split(",")] for row in text[11:].split(";")]
            return polyhedral_target(rows)
    except (ValueError, IndexError) as exc:
        raise StructureError(f"bad target spec {text!r}: {exc}") from exc
    raise StructureError(f"unknown target spec {text!r}")


# ---------------------------------------------------------------------------
# boundary curves


class BoundaryCurve:
    """Closed polygon in the target, parametrized by arclength."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or len(pts) < 3:
            raise StructureError("a Jordan polygon needs at least 3 points")
        seg = np.roll(pts, -1, axis=0) - pts
        lengths = np.sqrt((seg * seg).sum(axis=1))
        if np.any(lengths <= 1e-14):
            raise StructureError("repeated consecutive curve points")
        self.points = pts
        self.dim = pts.shape[1]
        self._seg = seg
        self._len = lengths
        self.cum = np.concatenate([[0.0], np.cumsum(lengths)])
        self.total = float(self.cum[-1])

    def _locate(self, t):
        t = np.asarray(t, dtype=np.float64) % self.total
        idx = np.clip(np.searchsorted(self.cum, t, side="right") - 1, 0, len(self._len) - 1)
        return t, idx

    def eval(self, t):
        t, idx = self._locate(t)
        frac = (t - self.cum[idx]) / self._len[idx]
        return self.points[idx] + frac[..., None] * self._seg[idx]

    def tangent(self, t):
        """Unit forward tangent; right-continuous at corners."""
        _, idx = self._locate(t)
        return self._seg[idx] / self._len[idx][..., None]


def circle_curve(radius=1.0, segments=720):
    ang = np.linspace(0.0, 2.0 * math.pi, segments, endpoint=False)
    return BoundaryCurve(radius * np.stack([np.cos(ang), np.sin(ang)], axis=1))


def square_curve(half=1.0):
    return BoundaryCurve(half * np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=float))


def curve_from_file(path):
    """One target point per line, whitespace separated; closed implicitly."""
    pts = np.loadtxt(path, dtype=np.float64, ndmin=2)
    return BoundaryCurve(pts)


# ---------------------------------------------------------------------------
# maps


@dataclass
class DiscMap:
    """PL map: vertex images plus boundary arclength parameters.

    ``params`` is aligned with ``mesh.boundary``; entries at the three
    anchor positions are frozen to ``anchor_params``.  Boundary vertex
    images are always ``curve.eval(params)``.
    """

    mesh: DiscMesh
    target: NormedTarget
    curve: BoundaryCurve
    images: np.ndarray
    params: np.ndarray
    anchor_params: np.ndarray

    def validate(self, tol=1e-9):
        if self.curve.dim != self.target.dim:
            raise StructureError("curve and target dimensions differ")
        t = self.params
        if not np.allclose(t[self.mesh.anchors], self.anchor_params, atol=tol):
            raise StructureError("anchor parameters moved")
        lifted = _lift_params(t, self.mesh.anchors, self.curve.total)
        if np.any(np.diff(lifted) < -tol * max(1.0, self.curve.total)):
            raise StructureError("boundary parameters are not monotone")
        img = self.curve.eval(t)
        if not np.allclose(self.images[self.mesh.boundary], img, atol=1e-7):
            raise StructureError("boundary images are off the curve")

    def copy(self):
        return replace(self, images=self.images.copy(), params=self.params.copy())


def _lift_params(t, anchors, total):
    """Unwrap cyclic parameters to a nondecreasing sequence starting at the
    first anchor (anchor gaps are each less than one full loop)."""
    out = np.asarray(t, dtype=np.float64).copy()
    out = out - out[0]
    out %= total
    out[0] = out[0] % total
    lift = out.copy()
    for m in range(1, len(lift)):
        while lift[m] < lift[m - 1] - 0.5 * total:
            lift[m] += total
    return lift


def _pav(y):
    # least-squares nondecreasing fit (pool adjacent violators)
    vals, counts = [], []
    for v in y:
        vals.append(float(v))
        counts.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            tot = vals[-1] * counts[-1] + vals[-2] * counts[-2]
            cnt = counts[-1] + counts[-2]
            vals[-2:] = [tot / cnt]
            counts[-2:] = [cnt]
    return np.repeat(vals, counts)


def _project_monotone(params, anchors, anchor_params, total):
    """Project boundary parameters onto the monotone constraint set, arc by
    arc between consecutive anchors, anchors staying fixed."""
    out = params.copy()
    b = len(params)
    for m in range(3):
        lo_pos, hi_pos = anchors[m], anchors[(m + 1) % 3]
        lo, hi = anchor_params[m], anchor_params[(m + 1) % 3]
        while hi <= lo:
            hi += total
        idx = np.arange(lo_pos + 1, (hi_pos if hi_pos > lo_pos else hi_pos + b))
        idx = idx % b
        if len(idx) == 0:
            continue
        seg = out[idx]
        seg = np.where(seg < lo - 0.5 * total, seg + total, seg)
        seg = np.clip(_pav(seg), lo, hi)
        out[idx] = seg % total
    out[anchors] = anchor_params
    return out


def _laplace_interior(mesh, boundary_values):
    """Harmonic-like extension: umbrella-weight Laplace solve per coordinate."""
    v = len(mesh.vertices)
    interior = mesh.interior
    pos = -np.ones(v, dtype=np.int64)
    pos[interior] = np.arange(len(interior))
    rows, cols, vals = [], [], []
    rhs = np.zeros((len(interior), boundary_values.shape[1]))
    deg = np.zeros(v)
    edges = set()
    for i, j, k in mesh.triangles:
        for a, b in ((i, j), (j, k), (k, i)):
            edges.add((min(a, b), max(a, b)))
    bmap = {int(b): m for m, b in enumerate(mesh.boundary)}
    for a, b in edges:
        deg[a] += 1.0
        deg[b] += 1.0
        for x, y in ((a, b), (b, a)):
            if pos[x] >= 0:
                if pos[y] >= 0:
                    rows.append(pos[x])
                    cols.append(pos[y])
                    vals.append(-1.0)
                else:
                    rhs[pos[x]] += boundary_values[bmap[int(y)]]
    rows += list(range(len(interior)))
    cols += list(range(len(interior)))
    vals += list(deg[interior])
    lap = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(len(interior),) * 2)
    return scipy.sparse.linalg.spsolve(lap, rhs).reshape(len(interior), -1)


def initial_map(mesh, target, curve, anchor_params=None, rng=None, jitter=0.0):
    """Boundary parameters spread arc-proportionally between anchors,
    interior harmonically extended; optional seeded jitter for restarts."""
    b = len(mesh.boundary)
    total = curve.total
    if anchor_params is None:
        anchor_params = np.array([0.0, total / 3.0, 2.0 * total / 3.0])
    anchor_params = np.asarray(anchor_params, dtype=np.float64) % total
    params = np.empty(b)
    arc = b // 3
    for m in range(3):
        lo = anchor_params[m]
        hi = anchor_params[(m + 1) % 3]
        while hi <= lo:
            hi += total
        fr = np.arange(arc) / arc
        params[m * arc : (m + 1) * arc] = (lo + fr * (hi - lo)) % total
    if rng is not None and jitter > 0.0:
        gap = total / b
        params += rng.uniform(-jitter, jitter, size=b) * gap
        params = _project_monotone(params, mesh.anchors, anchor_params, total)
    params[mesh.anchors] = anchor_params
    bnd = curve.eval(params)
    images = np.zeros((len(mesh.vertices), curve.dim))
    images[mesh.boundary] = bnd
    images[mesh.interior] = _laplace_interior(mesh, bnd)
    if rng is not None and jitter > 0.0:
        scale = np.abs(bnd).max()
        images[mesh.interior] += rng.normal(0.0, jitter * scale * 0.2, images[mesh.interior].shape)
    u = DiscMap(mesh, target, curve, images, params, anchor_params)
    u.validate()
    return u


# ---------------------------------------------------------------------------
# exact energies and areas


def _differentials(mesh, images):
    t = mesh.triangles
    f = np.stack([images[t[:, 1]] - images[t[:, 0]], images[t[:, 2]] - images[t[:, 0]]], axis=2)
    return f @ mesh.ref_inverse  # (T, n, 2)


def _poly_ball_norm(brows):
    """Norm2 whose dual functionals are the rows of ``brows`` (rank 2)."""
    return polygon_norm(convex.polar_dual(_hull_half_list(brows)))


def _exact_terms(target, Du):
    """Per-triangle (circle-average, sup) of v -> N(Du v), exact for
    polyhedral and euclid targets; lp uses dense sampling."""
    tcount = Du.shape[0]
    out = np.empty((tcount, 2))
    if target.kind == "euclid":
        m00 = (Du[:, :, 0] * Du[:, :, 0]).sum(axis=1)
        m11 = (Du[:, :, 1] * Du[:, :, 1]).sum(axis=1)
        m01 = (Du[:, :, 0] * Du[:, :, 1]).sum(axis=1)
        tr = m00 + m11
        disc = np.sqrt((m00 - m11) ** 2 + 4.0 * m01 * m01)
        out[:, 0] = tr
        out[:, 1] = 0.5 * (tr + disc)
        return out
    if target.kind == "polyhedral":
        brows = np.einsum("ln,tnk->tlk", target.funcs, Du)  # (T, L, 2)
        out[:, 1] = (brows * brows).sum(axis=2).max(axis=1)
        for t in range(tcount):
            out[t, 0] = _exact_ks_poly(brows[t], out[t, 1])
        return out
    dirs = unit_vectors(512, half=True)
    s = target.gauge(np.einsum("tnk,qk->tqn", Du, dirs))
    out[:, 0] = 2.0 * (s * s).mean(axis=1)
    out[:, 1] = (s * s).max(axis=1)
    return out


def _exact_ks_poly(brows, resh):
    """Circle average of max_l <b_l, v>^2 by exact sector integration."""
    try:
        n2 = _poly_ball_norm(brows)
    except StructureError:
        # functionals collinear: the seminorm is |<w, v>| for the longest w
        return resh
    prims, duals = n2.polygon_data()
    return float(
        _kernels.orbit_grid(prims, duals, np.zeros(1), np.ones(1))[0, 0]
    )


def _map_weights(e):
    if e.kind == "dirichlet":
        return 1.0, 0.0, 0.0, None
    if e.kind == "reshetnyak":
        return 0.0, 1.0, 0.0, None
    return e.a, e.b, e.c, e.area


def _energy_given(target, e, Du, warea):
    a, b, c, area = _map_weights(e)
    terms = _exact_terms(target, Du)
    total = float((warea * (a * terms[:, 0] + b * terms[:, 1])).sum())
    if c:
        total += c * _area_given(target, area, Du, warea)
    return total


def _area_given(target, area, Du, warea, method="auto", resolution=128):
    if method == "auto":
        method = "planar" if target.dim == 2 else "polygon"
    if method == "planar":
        if target.dim != 2:
            raise StructureError("planar area evaluation needs a 2d target")
        dets = np.abs(Du[:, 0, 0] * Du[:, 1, 1] - Du[:, 0, 1] * Du[:, 1, 0])
        return jacobian(area, target.plane_norm()) * float((warea * dets).sum())
    total = 0.0
    for t in range(Du.shape[0]):
        total += warea[t] * jacobian(area, triangle_norm(target, Du[t]), resolution)
    return float(total)


def map_energy(u, e):
    """Exact (unsmoothed) discrete energy of the map."""
    return _energy_given(u.target, e, _differentials(u.mesh, u.images), u.mesh.signed_areas)


def map_area(u, area, method="auto", resolution=128):
    """Discrete mu-area of the map.

    "planar" uses Area = J(N) * sum w |det Du| (exact for 2d targets, any
    area definition); "polygon" converts every triangle seminorm to a Norm2
    and evaluates its jacobian, which works in any dimension.
    """
    return _area_given(
        u.target, area, _differentials(u.mesh, u.images), u.mesh.signed_areas, method, resolution
    )


def triangle_norm(target, du, samples=128):
    """The seminorm v -> N(du v) as a Norm2 (possibly degenerate)."""
    sv = np.linalg.svd(du, compute_uv=False)
    if sv[0] <= 1e-300:
        return zero_seminorm()
    if sv[1] <= 1e-12 * sv[0]:
        uu, ss, vt = np.linalg.svd(du)
        w = float(target.gauge(uu[:, 0]) * ss[0]) * vt[0]
        return degenerate_norm(w)
    if target.kind == "polyhedral":
        return _poly_ball_norm(target.funcs @ du)
    dirs = unit_vectors(samples, half=True)
    radii = 1.0 / target.gauge((du @ dirs.T).T)
    return polygon_norm_hull(radii[:, None] * dirs)


def triangle_norms(u, samples=128):
    du = _differentials(u.mesh, u.images)
    return [triangle_norm(u.target, du[t], samples) for t in range(du.shape[0])]


def resample(u, points):
    """Vertex images of u at given domain points (PL interpolation)."""
    return u.mesh.interpolate(u.images, points)


def mobius_points(points, a=0.0 + 0.0j, phi=0.0):
    """Disc automorphism z -> e^{i phi} (z - a) / (1 - conj(a) z)."""
    z = points[:, 0] + 1j * points[:, 1]
    w = np.exp(1j * phi) * (z - a) / (1.0 - np.conj(a) * z)
    return np.stack([w.real, w.imag], axis=1)


# ---------------------------------------------------------------------------
# minimization


@dataclass
class MinimizeInfo:
    converged: bool
    energy: float
    smoothed: float
    rounds: int
    iterations: int


class _SmoothedObjective:
    """Smoothed energy as a function of the packed variable vector
    [interior images, free boundary parameters]."""

    def __init__(self, u, coeffs, p, det_eps, ks_dirs=32, free_boundary=True):
        self.mesh, self.target, self.curve = u.mesh, u.target, u.curve
        self.a, self.b, self.cdet = coeffs
        self.p, self.det_eps = p, det_eps
        self.interior = self.mesh.interior
        free = np.ones(len(self.mesh.boundary), dtype=bool)
        free[self.mesh.anchors] = False
        if not free_boundary:
            free[:] = False
        self.free = np.nonzero(free)[0]
        self.anchor_params = u.anchor_params
        self.dirs = unit_vectors(ks_dirs, half=True)
        self.warea = self.mesh.signed_areas
        self.ginv = self.mesh.ref_inverse
        self.tris = np.ascontiguousarray(self.mesh.triangles, dtype=np.int32)
        self.n = self.target.dim
        self.images = u.images.copy()
        self.params = u.params.copy()

    def pack(self):
        return np.concatenate([self.images[self.interior].ravel(), self.params[self.free]])

    def unpack(self, x):
        ni = len(self.interior) * self.n
        images = self.images
        images[self.interior] = x[:ni].reshape(-1, self.n)
        params = self.params
        params[self.free] = x[ni:]
        params[self.mesh.anchors] = self.anchor_params
        images[self.mesh.boundary] = self.curve.eval(params)
        return images, params

    def __call__(self, x):
        images, params = self.unpack(x)
        if self.target.kind == "polyhedral":
            val, grad = _kernels.plateau_poly(
                images, self.tris, self.ginv, self.warea,
                self.target.funcs, self.dirs, self.p,
                self.a, self.b, self.cdet, self.det_eps,
            )
        else:
            val, grad = _kernels.plateau_dirs(
                images, self.tris, self.ginv, self.warea,
                self.dirs, self.p, self.a, self.b, self.cdet, self.det_eps,
                self.target.kind, self.target.p,
            )
        tang = self.curve.tangent(params[self.free])
        gpar = (grad[self.mesh.boundary[self.free]] * tang).sum(axis=1)
        return val, np.concatenate([grad[self.interior].ravel(), gpar])

    def project(self, x):
        ni = len(self.interior) * self.n
        params = self.params.copy()
        params[self.free] = x[ni:]
        params[self.mesh.anchors] = self.anchor_params
        params = _project_monotone(params, self.mesh.anchors, self.anchor_params, self.curve.total)
        out = x.copy()
        out[ni:] = params[self.free]
        return out

    def box_bounds(self):
        """Per-variable boxes: interior images are unbounded; each free
        boundary parameter stays inside its anchor arc (ordering within the
        arc is left to the monotone projection)."""
        ni = len(self.interior) * self.n
        lb = np.full(ni + len(self.free), -np.inf)
        ub = np.full(ni + len(self.free), np.inf)
        anchors = np.asarray(self.mesh.anchors)
        aps = np.asarray(self.anchor_params, dtype=float)
        total = self.curve.total
        for idx, pos in enumerate(self.free):
            k = int(np.searchsorted(anchors, pos, side="right")) - 1
            lo = aps[k]
            hi = aps[k + 1] if k + 1 < len(aps) else aps[0] + total
            if 0.0 <= lo < hi <= total:  # arc does not wrap the parameter cut
                lb[ni + idx] = lo
                ub[ni + idx] = hi
        return scipy.optimize.Bounds(lb, ub)


class _ExactState:
    """Exact objective with incremental per-vertex recomputation, used by
    the pattern-search polish."""

    def __init__(self, obj, x):
        self.obj = obj
        self.x = obj.project(x.copy())
        self.images, self.params = (arr.copy() for arr in obj.unpack(self.x))
        mesh = obj.mesh
        self.incident = [[] for _ in mesh.vertices]
        for t, tri in enumerate(mesh.triangles):
            for v in tri:
                self.incident[int(v)].append(t)
        self.contrib = np.array(
            [self._tri_value(t, self.images) for t in range(len(mesh.triangles))]
        )
        self.total = float(self.contrib.sum())

    def _tri_value(self, t, images):
        mesh, obj = self.obj.mesh, self.obj
        i, j, k = mesh.triangles[t]
        f = np.stack([images[j] - images[i], images[k] - images[i]], axis=1)
        du = f @ mesh.ref_inverse[t]
        terms = _exact_terms(obj.target, du[None])[0]
        val = obj.a * terms[0] + obj.b * terms[1]
        if obj.cdet:
            val += obj.cdet * abs(du[0, 0] * du[1, 1] - du[0, 1] * du[1, 0])
        return mesh.signed_areas[t] * val

    def try_vertex(self, v, new_xy):
        old = self.images[v].copy()
        self.images[v] = new_xy
        tris = self.incident[v]
        new_vals = [self._tri_value(t, self.images) for t in tris]
        delta = sum(new_vals) - sum(self.contrib[t] for t in tris)
        if delta < -1e-15 * max(1.0, abs(self.total)):
            for t, nv in zip(tris, new_vals):
                self.contrib[t] = nv
            self.total += delta
            return True
        self.images[v] = old
        return False

    def try_param(self, bpos, delta):
        """Move a free boundary parameter by delta, clipped so the cyclic
        monotonicity against the neighbors is preserved."""
        mesh, obj = self.obj.mesh, self.obj
        b = len(mesh.boundary)
        total = obj.curve.total
        lifted = _lift_params(self.params, mesh.anchors, total)
        lo = lifted[bpos - 1] if bpos > 0 else lifted[0]
        hi = lifted[bpos + 1] if bpos + 1 < b else lifted[0] + total
        cand = min(max(lifted[bpos] + delta, lo), hi)
        if cand == lifted[bpos]:
            return False
        old_t = self.params[bpos]
        self.params[bpos] = (cand + self.params[0]) % total
        v = int(mesh.boundary[bpos])
        new_xy = obj.curve.eval(np.array([self.params[bpos]]))[0]
        if self.try_vertex(v, new_xy):
            return True
        self.params[bpos] = old_t
        return False


def _polish(state, sweeps=2, h_img=None, h_par=None):
    obj = state.obj
    mesh = obj.mesh
    scale = float(np.abs(state.images).max())
    h = h_img if h_img is not None else 1e-3 * max(scale, 1.0)
    hp = h_par if h_par is not None else 1e-3 * obj.curve.total / len(mesh.boundary) * 10.0
    free_set = set(int(b) for b in obj.free)
    for _ in range(sweeps):
        for v in obj.interior:
            for axis in range(obj.n):
                for sign in (1.0, -1.0):
                    cand = state.images[v].copy()
                    cand[axis] += sign * h
                    if state.try_vertex(int(v), cand):
                        break
        for bpos in range(len(mesh.boundary)):
            if bpos not in free_set:
                continue
            for sign in (1.0, -1.0):
                if state.try_param(bpos, sign * hp):
                    break
        h *= 0.5
        hp *= 0.5
    return state


def _descend(obj, x0, p_schedule, maxiter, chunk=60):
    """Projected quasi-Newton descent.

    L-BFGS-B runs in short chunks with the monotone projection applied
    between chunks; anchor-arc boxes keep the free parameters from crossing
    anchors mid-run.  The convergence flag reflects the final stage's last
    chunk: status 0 is a met tolerance; an exhausted iteration budget or a
    line-search failure leaves the flag down and the best iterate is
    returned as-is.
    """
    x = obj.project(x0)
    bounds = obj.box_bounds()
    converged = True
    iters = 0
    for p in p_schedule:
        obj.p = p
        best = obj(x)[0]
        used = 0
        while used < maxiter:
            res = scipy.optimize.minimize(
                obj, x, jac=True, method="L-BFGS-B", bounds=bounds,
                options={"maxiter": min(chunk, maxiter - used),
                         "ftol": 1e-14, "gtol": 1e-10, "maxcor": 20},
            )
            used += res.nit
            iters += res.nit
            converged = res.status == 0
            x = obj.project(res.x)
            val = obj(x)[0]
            improved = val < best - 1e-12 * max(1.0, abs(best))
            best = min(best, val)
            if converged or not improved or res.nit == 0:
                break
    return x, converged, iters


def _run(u, coeffs, p_schedule, det_eps_schedule, maxiter, polish_sweeps,
         free_boundary=True):
    obj = _SmoothedObjective(u, coeffs, p=p_schedule[0], det_eps=det_eps_schedule[0],
                             free_boundary=free_boundary)
    x = obj.pack()
    converged = True
    iters = 0
    for det_eps in det_eps_schedule:
        obj.det_eps = det_eps
        x, ok, it = _descend(obj, x, p_schedule, maxiter)
        converged = converged and ok
        iters += it
    smoothed = obj(x)[0]
    state = _ExactState(obj, x)
    if polish_sweeps:
        _polish(state, polish_sweeps)
    out = u.copy()
    out.images = state.images
    out.params = state.params
    out.images[out.mesh.boundary] = out.curve.eval(out.params)
    out.validate()
    return out, MinimizeInfo(converged, state.total, smoothed, len(det_eps_schedule), iters)


def _conformal_presolve(init, maxiter=600):
    """Warm-start the boundary correspondence.

    Minimizing the Euclidean circle-average energy first slides the
    boundary parameters toward the conformal correspondence (the classical
    route to disc parametrizations); descent on a max-type target energy
    from a naive arc-length seeding otherwise tends to stall in a basin
    with badly placed parameters.
    """
    tmp = DiscMap(mesh=init.mesh, target=euclid_target(init.target.dim),
                  curve=init.curve, images=init.images.copy(),
                  params=init.params.copy(), anchor_params=init.anchor_params)
    out, _ = _run(tmp, (1.0, 0.0, 0.0), (2.0,), (1e-6,), maxiter,
                  polish_sweeps=0)
    return DiscMap(mesh=init.mesh, target=init.target, curve=init.curve,
                   images=out.images, params=out.params,
                   anchor_params=init.anchor_params)


def minimize_energy(target, curve, e, mesh, init=None,
                    p_schedule=(8.0, 16.0, 32.0, 64.0),
                    maxiter=2000, polish_sweeps=2, presolve=True):
    """Minimize the discrete I-energy over interior images and boundary
    parameters; returns (map, info) with info.energy the exact value.

    The smoothed objective ramps the p-norm relaxation of max terms along
    ``p_schedule``; a pattern-search polish then certifies the value on the
    unsmoothed functional.  A combo energy with a determinant (area) term
    requires a planar target.
    """
    if init is None:
        init = initial_map(mesh, target, curve)
    if presolve:
        init = _conformal_presolve(init, maxiter=maxiter // 3)
    a, b, c, area = _map_weights(e)
    cdet = c * jacobian(area, target.plane_norm()) if c else 0.0
    return _run(init, (a, b, cdet), tuple(p_schedule), (1e-6,), maxiter, polish_sweeps)


def minimize_area(target, curve, area, mesh, init=None, tie_weight=1e-6,
                  p_schedule=(8.0, 16.0, 32.0, 64.0), maxiter=2000,
                  polish_sweeps=2, presolve=True, free_boundary=False):
    """Directly minimize the discrete mu-area (planar targets), with a small
    sup-energy tie-breaker suppressing the interior parametrization gauge
    freedom.

    Boundary parameters are frozen at the initial correspondence by default.
    In the continuum, sliding the boundary parametrization is a pure gauge
    direction for area; its discrete shadow is not gauge but a chordal leak
    (bunching the parameters replaces curve arcs by long chords and strictly
    shrinks the trace polygon, all the way down to the anchor triangle), so
    the area descent must not follow it.
    """
    if target.dim != 2:
        raise StructureError("direct area minimization is implemented for planar targets")
    if init is None:
        init = initial_map(mesh, target, curve)
    if presolve:
        init = _conformal_presolve(init, maxiter=maxiter // 3)
    jac_n = jacobian(area, target.plane_norm())
    coeffs = (0.0, tie_weight, jac_n)
    return _run(init, coeffs, tuple(p_schedule), (1e-2, 1e-4, 1e-6), maxiter,
                polish_sweeps, free_boundary=free_boundary)


# ---------------------------------------------------------------------------
# inner variations


def inner_variation_decrease(u, e, center, r, theta, lam):
    """Energy change from one inner-variation trial.

    The trial map is linear (stretch lam along direction theta) on the
    r-ball at ``center`` and the conformal extension f(z) = c z + r^2 d / z
    outside, acting on the reference disc.  The mesh vertices are pulled
    back through the inverse map (images unchanged), so identity trials
    (lam = 1) change nothing and the boundary trace stays on the curve.

    Returns (decrease, admissible): decrease = E(u) - E(u o psi), positive
    when the trial improves on u; trials whose stretched ball leaves the
    disc or that fold a triangle are inadmissible.
    """
    z0 = complex(center[0], center[1])
    lam = float(lam)
    if abs(z0) + r * max(lam, 1.0 / lam) > 0.98:
        return 0.0, False
    if lam == 1.0:  # psi_r is the identity
        return 0.0, True
    c = 0.5 * (lam + 1.0 / lam)
    d = 0.5 * (lam - 1.0 / lam)
    w = u.mesh.vertices[:, 0] + 1j * u.mesh.vertices[:, 1] - z0
    zeta = w * np.exp(-1j * theta)
    inside = (zeta.real / (r * lam)) ** 2 + (zeta.imag * lam / r) ** 2 <= 1.0
    pulled = np.empty_like(zeta)
    pulled[inside] = zeta[inside].real / lam + 1j * zeta[inside].imag * lam
    zo = zeta[~inside]
    disc = np.sqrt(zo * zo - 4.0 * c * d * r * r)
    roots = np.stack([(zo + disc) / (2.0 * c), (zo - disc) / (2.0 * c)])
    pulled[~inside] = np.where(np.abs(roots[0]) >= np.abs(roots[1]), roots[0], roots[1])
    moved = (pulled * np.exp(1j * theta)) + z0
    verts = np.stack([moved.real, moved.imag], axis=1)

    t = u.mesh.triangles
    a, b2, c2 = verts[t[:, 0]], verts[t[:, 1]], verts[t[:, 2]]
    e1, e2 = b2 - a, c2 - a
    areas = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    if np.any(areas <= 1e-14):
        return 0.0, False
    edges = np.stack([b2 - a, c2 - a], axis=2)
    ginv = np.linalg.inv(edges)
    f = np.stack(
        [u.images[t[:, 1]] - u.images[t[:, 0]], u.images[t[:, 2]] - u.images[t[:, 0]]], axis=2
    )
    du = f @ ginv
    e_new = _energy_given(u.target, e, du, areas)
    e_old = _energy_given(u.target, e, _differentials(u.mesh, u.images), u.mesh.signed_areas)
    return e_old - e_new, True


@dataclass
class InnerVariationReport:
    worst_decrease: float
    energy: float
    trials: int
    admissible: int
    skipped: int
    seed: int


def inner_variation_test(u, e, trials=48, seed=0, r_range=(0.05, 0.4), lam_range=(1.0, 2.0)):
    """Max energy decrease over seeded inner-variation trials; for a
    discrete minimizer this stays at mesh-scale tolerance."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    admissible = skipped = 0
    for _ in range(trials):
        ang = rng.uniform(0.0, 2.0 * math.pi)
        z0 = rng.uniform(0.0, 0.7) * np.array([math.cos(ang), math.sin(ang)])
        r = rng.uniform(*r_range)
        theta = rng.uniform(0.0, math.pi)
        lam = rng.uniform(*lam_range)
        dec, ok = inner_variation_decrease(u, e, z0, r, theta, lam)
        if ok:
            admissible += 1
            worst = max(worst, dec)
        else:
            skipped += 1
    energy = map_energy(u, e)
    if admissible == 0:
        worst = 0.0
    return InnerVariationReport(worst, energy, trials, admissible, skipped, seed)


# ---------------------------------------------------------------------------
# main-lemma verification


@dataclass
class MainLemmaReport:
    energy: float
    area: float
    lam: float
    gap: float
    minimal_fraction: float
    isotropy_fraction: float
    qc_max: float
    qc_max_all: float
    degenerate_weight: float
    mesh_level: int


def verify_main_lemma(u, e, minimal_tol=1e-3, iso_tol=5e-2, orbit_resolution=48,
                      qc_quantile=0.95):
    """Per-triangle audit of the energy-area relationship.

    Reports the gap lam * E - Area(mu_I) (nonnegative up to solver noise),
    the mu_I-area-weighted fraction of triangles whose seminorm minimizes
    its own orbit (relative tolerance ``minimal_tol``), the area-weighted
    fraction with round inscribed ellipse (aspect within ``iso_tol``), and
    area-weighted quasiconformality: qc_max is the smallest bound covering
    ``qc_quantile`` of the area, qc_max_all the plain maximum.
    """
    du = _differentials(u.mesh, u.images)
    warea = u.mesh.signed_areas
    a, b, c, _ = _map_weights(e)
    terms = _exact_terms(u.target, du)
    lam = normalizer(e)

    tcount = du.shape[0]
    weights = np.zeros(tcount)
    minimal = np.zeros(tcount, dtype=bool)
    isotropic = np.zeros(tcount, dtype=bool)
    qc = np.ones(tcount)
    energy = 0.0
    degenerate = 0.0
    for t in range(tcount):
        ident = a * terms[t, 0] + b * terms[t, 1]
        energy += warea[t] * ident
        n2 = triangle_norm(u.target, du[t])
        if not n2.is_norm:
            degenerate += warea[t]
            continue
        res = orbit_minimize(e, n2, resolution=orbit_resolution)
        weights[t] = warea[t] * res.induced
        minimal[t] = ident - res.value <= minimal_tol * res.value
        body = convex.loewner_ellipse(n2.half_vertices())
        isotropic[t] = body.aspect <= 1.0 + iso_tol
        qc[t] = quasiconformality(n2)
    area = float(weights.sum())
    wtot = area if area > 0.0 else 1.0
    order = np.argsort(qc)
    cum = np.cumsum(weights[order])
    covered = np.searchsorted(cum, qc_quantile * cum[-1]) if cum[-1] > 0 else 0
    qc_max = float(qc[order][min(covered, tcount - 1)])
    return MainLemmaReport(
        energy=float(energy),
        area=area,
        lam=lam,
        gap=lam * float(energy) - area,
        minimal_fraction=float(weights[minimal].sum() / wtot),
        isotropy_fraction=float(weights[isotropic].sum() / wtot),
        qc_max=qc_max,
        qc_max_all=float(qc.max()),
        degenerate_weight=float(degenerate),
        mesh_level=u.mesh.level,
    )


# ---------------------------------------------------------------------------
# energy minimizer vs direct area minimizer


@dataclass
class CompareReport:
    area_energy_min: float
    area_area_min: float
    difference: float
    relative: float
    energy: float
    converged: bool
    seeds: tuple
    mesh_level: int


def compare_energy_vs_area_minimizer(target, curve, e, mesh, seeds=(0, 1, 2), **opts):
    """Best-of-seeds energy minimizer vs the direct area minimizer, both
    measured in the induced area.

    The area solve starts from the best energy minimizer with its boundary
    correspondence frozen (gauge fixed); it reports how much induced area
    interior rearrangement can still remove.  Values are compared, never
    maps: discrete minimizers are not unique.
    """
    ind = induced_area(e)
    converged = True
    best_e, best_e_val = None, math.inf
    for s in seeds:
        rng = np.random.default_rng(s) if s else None
        init = initial_map(mesh, target, curve, rng=rng, jitter=0.3 if s else 0.0)
        ue, infoe = minimize_energy(target, curve, e, mesh, init=init, **opts)
        converged = converged and infoe.converged
        if infoe.energy < best_e_val:
            best_e, best_e_val = ue, infoe.energy
    ua, infoa = minimize_area(target, curve, ind, mesh, init=best_e,
                              presolve=False, **opts)
    converged = converged and infoa.converged
    area_a = map_area(ua, ind)
    area_e = map_area(best_e, ind)
    return CompareReport(
        area_energy_min=area_e,
        area_area_min=area_a,
        difference=area_e - area_a,
        relative=(area_e - area_a) / area_a,
        energy=best_e_val,
        converged=converged,
        seeds=tuple(seeds),
        mesh_level=mesh.level,
    )
