"""Seminorms on the plane and the linear maps acting on them.

A seminorm is represented by its kind plus a small payload.  Convex-geometry
kinds (polygon, ellipse) carry exact data and support closed-form operations;
the analytic kinds (lp and its scaled/composed wrappers) evaluate the gauge
directly and are polygonized on demand for convex-geometry work.

Half-list convention: a centrally symmetric polygon B = conv{+-v_1..+-v_m} is
stored as the m vertices with angles in [0, pi), strictly increasing.  The
polar dual vertex attached to edge (v_j, v_{j+1}) is the unique functional d
with <d, v_j> = <d, v_{j+1}> = 1; the gauge of B is max_j |<d_j, x>|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels

__all__ = [
    "StructureError",
    "ConvergenceError",
    "LinearMap2",
    "Norm2",
    "euclidean",
    "sup_norm",
    "lp_norm",
    "ellipse_norm",
    "polygon_norm",
    "degenerate_norm",
    "zero_seminorm",
    "seminorm_distance",
    "quasiconformality",
    "norm_from_spec",
    "unit_vectors",
    "golden_max",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class StructureError(ValueError):
    """Malformed geometric input (non-convex polygon, bad matrix, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to reach its tolerance."""


def unit_vectors(count, half=False):
    """`count` equi-angular unit vectors on the full circle (or half-turn)."""
    span = math.pi if half else 2.0 * math.pi
    ang = np.arange(count) * (span / count)
    return np.stack([np.cos(ang), np.sin(ang)], axis=1)


def golden_max(fun, lo, hi, tol=1e-12, maxiter=200):
    """Golden-section maximization of a unimodal function on [lo, hi]."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(maxiter):
        if b - a < tol:
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = fun(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = fun(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)


@dataclass(frozen=True)
class LinearMap2:
    """A linear map of the plane, entries row-major [[a, b], [c, d]]."""

    a: float
    b: float
    c: float
    d: float

    @staticmethod
    def identity():
        return LinearMap2(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def rotation(theta):
        ct, st = math.cos(theta), math.sin(theta)
        return LinearMap2(ct, -st, st, ct)

    @staticmethod
    def diagonal(l1, l2):
        return LinearMap2(float(l1), 0.0, 0.0, float(l2))

    @staticmethod
    def from_matrix(m):
        m = np.asarray(m, dtype=float)
        return LinearMap2(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    @property
    def is_special(self):
        return abs(self.det - 1.0) <= 1e-12

    def inverse(self):
        det = self.det
        if det == 0.0:
            raise StructureError("singular map has no inverse")
        return LinearMap2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def compose(self, other):
        """self after other: (self.compose(other))(x) = self(other(x))."""
        return LinearMap2.from_matrix(self.matrix @ other.matrix)

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T

    def operator_distance(self, other):
        return float(np.linalg.norm(self.matrix - other.matrix, 2))


def _canonical_half_list(pts, strict=True):
    """Flip into [0, pi), sort by angle, dedupe; validate strict convexity."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pts)):
        raise StructureError("non-finite polygon vertex")
    flip = (pts[:, 1] < 0) | ((pts[:, 1] == 0) & (pts[:, 0] < 0))
    pts = np.where(flip[:, None], -pts, pts)
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    order = np.argsort(ang, kind="stable")
    pts = pts[order]
    scale = float(np.abs(pts).max(initial=0.0))
    if scale <= 0.0:
        raise StructureError("polygon has no extent")
    keep = [0]
    for idx in range(1, len(pts)):
        if np.abs(pts[idx] - pts[keep[-1]]).max() > 1e-14 * scale:
            keep.append(idx)
    pts = pts[keep]
    if len(pts) < 2:
        raise StructureError("polygon needs at least 2 half-list vertices")
    if strict:
        full = np.vstack([pts, -pts])
        edges = np.roll(full, -1, axis=0) - full
        cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        lens = np.linalg.norm(edges, axis=1)
        if np.any(cross <= 1e-13 * lens * np.roll(lens, -1)):
            raise StructureError("polygon is not strictly convex around the origin")
    return np.ascontiguousarray(pts)


def _hull_half_list(points):
    """Tolerant construction: convex hull of +-points, collinear runs pruned."""
    from scipy.spatial import ConvexHull, QhullError

    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    sym = np.vstack([pts, -pts])
    try:
        hull = ConvexHull(sym)
    except QhullError as exc:
        raise StructureError("point set is degenerate") from exc
    verts = sym[hull.vertices]
    half = _canonical_half_list(verts, strict=False)
    # prune vertices that are collinear with their neighbours on the full ring
    changed = True
    while changed and len(half) > 2:
        changed = False
        full = np.vstack([half, -half])
        m = len(half)
        keep = np.ones(m, dtype=bool)
        for j in range(m):
            prev = full[(j - 1) % (2 * m)]
            cur = full[j]
            nxt = full[(j + 1) % (2 * m)]
            area2 = abs((cur[0] - prev[0]) * (nxt[1] - prev[1]) - (cur[1] - prev[1]) * (nxt[0] - prev[0]))
            base = np.linalg.norm(nxt - prev) * max(np.linalg.norm(cur - prev), np.linalg.norm(nxt - cur))
            if base > 0 and area2 <= 1e-12 * base:
                keep[j] = False
                changed = True
                break
        half = half[keep]
    return _canonical_half_list(half, strict=True)


def _edge_duals(prims):
    """Dual vertex per edge (prims[j] -> prims[j+1], wrapping to -prims[0])."""
    a = prims
    b = np.vstack([prims[1:], -prims[:1]])
    det = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    if np.any(det <= 0.0):
        raise StructureError("half-list is not in convex position")
    duals = np.stack([(b[:, 1] - a[:, 1]) / det, (a[:, 0] - b[:, 0]) / det], axis=1)
    return np.ascontiguousarray(duals)


class Norm2:
    """A seminorm on R^2.

    Use the factory functions (``euclidean``, ``sup_norm``, ``lp_norm``,
    ``ellipse_norm``, ``polygon_norm``, ``degenerate_norm``,
    ``zero_seminorm``) rather than the constructor.  Instances are immutable.
    """

    def __init__(self, kind, *, vertices=None, spd=None, p=None,
                 functional=None, base=None, factor=None, linmap=None):
        self.kind = kind
        self._vertices = vertices
        self._spd = spd
        self._p = p
        self._functional = functional
        self._base = base
        self._factor = factor
        self._linmap = linmap

    # -- basic queries ----------------------------------------------------

    @property
    def is_norm(self):
        """True when the gauge is positive definite."""
        return self.kind not in ("zero", "degenerate")

    @property
    def spd_matrix(self):
        if self.kind != "ellipse":
            raise StructureError("not an ellipse norm")
        return self._spd.copy()

    @property
    def lp_exponent(self):
        if self.kind != "lp":
            raise StructureError("not an lp norm")
        return self._p

    @property
    def functional(self):
        if self.kind != "degenerate":
            raise StructureError("not a degenerate seminorm")
        return self._functional.copy()

    def __repr__(self):
        return f"Norm2({self.to_spec()!r})"

    # -- evaluation --------------------------------------------------------

    def gauge(self, pts):
        """Evaluate the seminorm; accepts shape (2,) or (..., 2)."""
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        flat = np.ascontiguousarray(pts.reshape(-1, 2))
        if self.kind == "zero":
            out = np.zeros(len(flat))
        elif self.kind == "degenerate":
            out = np.abs(flat @ self._functional)
        elif self.kind == "polygon":
            out = np.asarray(_kernels.gauge_max_abs(self._duals, flat))
        elif self.kind == "ellipse":
            out = np.sqrt(np.einsum("ki,ij,kj->k", flat, self._spd, flat))
        elif self.kind == "lp":
            out = self._lp_gauge(flat, self._p)
        elif self.kind == "scaled":
            out = self._factor * self._base.gauge(flat)
        elif self.kind == "composed":
            out = self._base.gauge(self._linmap.apply(flat))
        else:  # pragma: no cover
            raise StructureError(f"unknown kind {self.kind!r}")
        if single:
            return float(out[0])
        return out.reshape(pts.shape[:-1])

    @staticmethod
    def _lp_gauge(flat, p):
        ax = np.abs(flat)
        m = ax.max(axis=1)
        safe = np.where(m > 0.0, m, 1.0)
        val = safe * ((ax / safe[:, None]) ** p).sum(axis=1) ** (1.0 / p)
        return np.where(m > 0.0, val, 0.0)

    # -- algebra -----------------------------------------------------------

    def scale(self, factor):
        """The seminorm x -> factor * s(x)."""
        factor = float(factor)
        if factor < 0.0:
            raise StructureError("scale factor must be nonnegative")
        if factor == 0.0 or self.kind == "zero":
            return zero_seminorm()
        if self.kind == "degenerate":
            return degenerate_norm(self._functional * factor)
        if self.kind == "polygon":
            return polygon_norm(self._vertices / factor)
        if self.kind == "ellipse":
            return ellipse_norm_from_matrix(self._spd * factor ** 2)
        if self.kind == "scaled":
            return Norm2("scaled", base=self._base, factor=self._factor * factor)
        return Norm2("scaled", base=self, factor=factor)

    def compose(self, t):
        """The seminorm x -> s(t x).

        Composition with a singular map collapses to a degenerate or zero
        seminorm.
        """
        if not isinstance(t, LinearMap2):
            t = LinearMap2.from_matrix(t)
        if self.kind == "zero":
            return zero_seminorm()
        if self.kind == "degenerate":
            w = t.matrix.T @ self._functional
            if np.linalg.norm(w) == 0.0:
                return zero_seminorm()
            return degenerate_norm(w)
        m = t.matrix
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[1] <= 1e-14 * max(sv[0], 1e-300):
            # rank <= 1: s(Tx) = s(sigma*u) * |<v, x>|
            u, s, vt = np.linalg.svd(m)
            if sv[0] == 0.0:
                return zero_seminorm()
            coef = s[0] * self.gauge(u[:, 0])
            if coef == 0.0:
                return zero_seminorm()
            return degenerate_norm(coef * vt[0])
        if self.kind == "polygon":
            inv = np.linalg.inv(m)
            return polygon_norm(self._vertices @ inv.T)
        if self.kind == "ellipse":
            return ellipse_norm_from_matrix(m.T @ self._spd @ m)
        if self.kind == "composed":
            return Norm2("composed", base=self._base,
                         linmap=self._linmap.compose(t))
        return Norm2("composed", base=self, linmap=t)

    # -- polygon materialization --------------------------------------------

    @cached_property
    def _duals(self):
        return _edge_duals(self._vertices)

    def half_vertices(self, count=256):
        """Canonical half-list of the unit-ball polygon.

        Exact for polygon kind; analytic kinds are sampled at ``count``
        boundary directions (the inscribed polygon).
        """
        if self.kind == "polygon":
            return self._vertices.copy()
        if not self.is_norm:
            raise StructureError("degenerate seminorm has no polygon ball")
        dirs = unit_vectors(count, half=True)
        radii = self.gauge(dirs)
        return _hull_half_list(dirs / radii[:, None])

    def dual_vertices(self, count=256):
        """Canonical half-list of the polar dual ball."""
        if self.kind == "polygon":
            return _canonical_half_list(self._duals)
        return _canonical_half_list(_edge_duals(self.half_vertices(count)))

    def polygon_data(self, count=256):
        """(prims, edge-aligned duals) for sector-exact computations."""
        if self.kind == "polygon":
            return self._vertices, self._duals
        prims = self.half_vertices(count)
        return prims, _edge_duals(prims)

    # -- specs ---------------------------------------------------------------

    def to_spec(self):
        if self.kind == "zero":
            return "scale:euclid|0"
        if self.kind == "degenerate":
            w = self._functional
            return f"degenerate:{w[0]:.17g},{w[1]:.17g}"
        if self.kind == "polygon":
            return "polygon:" + ";".join(f"{x:.17g},{y:.17g}" for x, y in self._vertices)
        if self.kind == "ellipse":
            s = self._spd
            return f"ellipse:{s[0, 0]:.17g},{s[0, 1]:.17g},{s[1, 1]:.17g}"
        if self.kind == "lp":
            return f"lp:{self._p:.17g}"
        if self.kind == "scaled":
            return f"scale:{self._base.to_spec()}|{self._factor:.17g}"
        if self.kind == "composed":
            t = self._linmap
            return f"compose:{self._base.to_spec()}|{t.a:.17g},{t.b:.17g},{t.c:.17g},{t.d:.17g}"
        raise StructureError(f"unknown kind {self.kind!r}")  # pragma: no cover


def euclidean():
    """The round norm |x|_2."""
    return ellipse_norm(1.0, 0.0, 1.0)


def sup_norm():
    """max(|x_1|, |x_2|); its unit ball is the square [-1, 1]^2."""
    return polygon_norm([(1.0, 1.0), (-1.0, 1.0)])


def lp_norm(p):
    """The lp norm; p in {1, 2, inf} collapse to exact polygon/ellipse kinds."""
    p = float(p)
    if not p >= 1.0:
        raise StructureError("lp norm requires p >= 1")
    if p == 1.0:
        return polygon_norm([(1.0, 0.0), (0.0, 1.0)])
    if p == 2.0:
        return euclidean()
    if math.isinf(p):
        return sup_norm()
    return Norm2("lp", p=p)


def ellipse_norm(a, b, c):
    """sqrt(x^T M x) with M = [[a, b], [b, c]] positive definite."""
    m = np.array([[float(a), float(b)], [float(b), float(c)]])
    return ellipse_norm_from_matrix(m)


def ellipse_norm_from_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (2, 2) or abs(m[0, 1] - m[1, 0]) > 1e-12 * max(1.0, np.abs(m).max()):
        raise StructureError("ellipse matrix must be symmetric 2x2")
    m = 0.5 * (m + m.T)
    if m[0, 0] <= 0.0 or np.linalg.det(m) <= 0.0:
        raise StructureError("ellipse matrix must be positive definite")
    return Norm2("ellipse", spd=m)


def polygon_norm(half_vertices):
    """Gauge of the symmetric polygon conv{+-v_1 .. +-v_m}.

    The half-list must be in strictly convex position; use
    ``polygon_norm_hull`` for point clouds.
    """
    verts = _canonical_half_list(half_vertices, strict=True)
    return Norm2("polygon", vertices=verts)


def polygon_norm_hull(points):
    """Polygon norm from the convex hull of +-points."""
    return Norm2("polygon", vertices=_hull_half_list(points))


def degenerate_norm(functional):
    w = np.asarray(functional, dtype=float).reshape(2)
    if np.linalg.norm(w) == 0.0:
        raise StructureError("degenerate seminorm needs a nonzero functional")
    if w[1] < 0 or (w[1] == 0 and w[0] < 0):
        w = -w
    return Norm2("degenerate", functional=w)


def zero_seminorm():
    return Norm2("zero")


# -- module operations ------------------------------------------------------

def seminorm_distance(s1, s2, samples=4096):
    """max_{S^1} |s1(v) - s2(v)| over equi-angular samples.

    Nondecreasing under doubling of ``samples`` (nested grids).
    """
    if samples < 8:
        raise StructureError("need at least 8 samples")
    dirs = unit_vectors(samples)
    return float(np.abs(s1.gauge(dirs) - s2.gauge(dirs)).max())


def quasiconformality(s, samples=4096):
    """max s / min s over the unit circle; +inf for degenerate seminorms.

    Polygon and ellipse kinds are exact; analytic kinds use sampling with
    golden-section refinement of the bracketing arcs.
    """
    if not s.is_norm:
        return math.inf
    if s.kind == "polygon":
        smax = float(np.linalg.norm(s._duals, axis=1).max())
        smin = 1.0 / float(np.linalg.norm(s._vertices, axis=1).max())
        return smax / smin
    if s.kind == "ellipse":
        ev = np.linalg.eigvalsh(s._spd)
        return float(math.sqrt(ev[1] / ev[0]))
    if samples < 16:
        raise StructureError("need at least 16 samples")
    ang = np.arange(samples) * (math.pi / samples)
    vals = s.gauge(np.stack([np.cos(ang), np.sin(ang)], axis=1))
    h = math.pi / samples

    def at(a):
        return s.gauge(np.array([math.cos(a), math.sin(a)]))

    hi_i = int(np.argmax(vals))
    _, hi = golden_max(at, ang[hi_i] - h, ang[hi_i] + h)
    lo_i = int(np.argmin(vals))
    _, lo_neg = golden_max(lambda a: -at(a), ang[lo_i] - h, ang[lo_i] + h)
    hi = max(hi, float(vals[hi_i]))
    lo = min(-lo_neg, float(vals[lo_i]))
    return hi / lo


# -- spec strings -------------------------------------------------------------

def norm_from_spec(text):
    """Parse a norm spec string.

    Formats: ``euclid`` | ``sup`` | ``lp:<p>`` | ``ellipse:<a>,<b>,<c>`` |
    ``polygon:<x1>,<y1>;<x2>,<y2>;...`` | ``compose:<spec>|<m11>,<m12>,<m21>,<m22>``
    | ``scale:<spec>|<factor>`` | ``degenerate:<w1>,<w2>``.  ``compose`` and
    ``scale`` split on the last ``|`` so specs nest.
    """
    text = text.strip()
    try:
        if text == "euclid":
            return euclidean()
        if text == "sup":
            return sup_norm()
        if text.startswith("lp:"):
            return lp_norm(float(text[3:]))
        if text.startswith("ellipse:"):
            a, b, c = (float(x) for x in text[8:].split(","))
            return ellipse_norm(a, b, c)
        if text.startswith("polygon:"):
            verts = [tuple(float(x) for x in chunk.split(","))
                     for chunk in text[8:].split(";") if chunk.strip()]
            return polygon_norm(verts)
        if text.startswith("degenerate:"):
            w = [float(x) for x in text[11:].split(",")]
            return degenerate_norm(w)
        if text.startswith("compose:"):
            body, _, tail = text[8:].rpartition("|")
            a, b, c, d = (float(x) for x in tail.split(","))
            return norm_from_spec(body).compose(LinearMap2(a, b, c, d))
        if text.startswith("scale:"):
            body, _, tail = text[6:].rpartition("|")
            return norm_from_spec(body).scale(float(tail))
    except (ValueError, IndexError) as exc:
        raise StructureError(f"bad norm spec {text!r}: {exc}") from exc
    raise StructureError(f"unknown norm spec {text!r}")
