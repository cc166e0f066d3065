"""Convex geometry of centrally symmetric polygons.

All functions take the canonical half-list representation (see
``nal.norms``): the polygon is conv{+-v_1 .. +-v_m} with the v_j sorted by
angle inside a half-turn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .norms import ConvergenceError, StructureError, _canonical_half_list, _edge_duals, golden_max

__all__ = [
    "EllipseBody",
    "Parallelogram",
    "full_polygon",
    "polygon_area",
    "polar_dual",
    "loewner_ellipse",
    "mvee_matrix",
    "loewner_via_mvee",
    "min_enclosing_parallelogram",
    "min_parallelogram_rotation_grid",
    "contains_scaled_ellipse",
]


@dataclass(frozen=True)
class EllipseBody:
    """The centered ellipse A(closed unit disc) for symmetric positive A."""

    a: float
    b: float
    c: float

    @staticmethod
    def from_matrix(m):
        m = np.asarray(m, dtype=float)
        return EllipseBody(float(m[0, 0]), 0.5 * float(m[0, 1] + m[1, 0]), float(m[1, 1]))

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.b, self.c]])

    @property
    def det(self):
        return self.a * self.c - self.b * self.b

    @property
    def area(self):
        return math.pi * self.det

    @property
    def aspect(self):
        """Ratio of the semi-axes (largest singular value over smallest)."""
        ev = np.linalg.eigvalsh(self.matrix)
        return float(ev[1] / ev[0])

    def boundary_points(self, count=128):
        ang = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        circ = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return circ @ self.matrix.T

    def gauge(self, pts):
        """Minkowski gauge of the ellipse body at pts."""
        inv = np.linalg.inv(self.matrix)
        y = np.asarray(pts, dtype=float) @ inv.T
        return np.linalg.norm(y, axis=-1)


@dataclass(frozen=True)
class Parallelogram:
    """Symmetric parallelogram {x : |<p, x>| <= 1 and |<q, x>| <= 1}."""

    p: tuple
    q: tuple

    @property
    def area(self):
        p, q = self.p, self.q
        return 4.0 / abs(p[0] * q[1] - p[1] * q[0])

    def corners(self):
        m = np.array([self.p, self.q])
        x1 = np.linalg.solve(m, [1.0, 1.0])
        x2 = np.linalg.solve(m, [1.0, -1.0])
        return np.array([x1, x2, -x1, -x2])


def full_polygon(half):
    half = np.asarray(half, dtype=float)
    return np.vstack([half, -half])


def polygon_area(half):
    """Shoelace area of the symmetric polygon given by a half-list."""
    full = full_polygon(half)
    x, y = full[:, 0], full[:, 1]
    return 0.5 * float(np.abs(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def polar_dual(half):
    """Canonical half-list of the polar dual polygon.

    Involutive up to ordering: polar_dual(polar_dual(B)) == B.
    """
    half = _canonical_half_list(half, strict=True)
    return _canonical_half_list(_edge_duals(half), strict=True)


# -- largest inscribed ellipse -------------------------------------------------

_EBASIS = (
    np.array([[1.0, 0.0], [0.0, 0.0]]),
    np.array([[0.0, 1.0], [1.0, 0.0]]),
    np.array([[0.0, 0.0], [0.0, 1.0]]),
)


def _barrier_value(x, t, N):
    a, b, c = x
    det = a * c - b * b
    if a <= 0.0 or det <= 0.0:
        return math.inf, None, None
    w = N @ np.array([[a, b], [b, c]]).T  # rows A n_j
    u = (w * w).sum(axis=1)
    slack = 1.0 - u
    if np.any(slack <= 0.0):
        return math.inf, w, slack
    return -t * math.log(det) - float(np.log(slack).sum()), w, slack


def _barrier_grad_hess(x, t, N, w, slack):
    a, b, c = x
    det = a * c - b * b
    inv = np.array([[c, -b], [-b, a]]) / det
    # d(u_j)/d(a,b,c) with u = |A n|^2, w = A n
    du = np.stack(
        [
            2.0 * w[:, 0] * N[:, 0],
            2.0 * (w[:, 0] * N[:, 1] + w[:, 1] * N[:, 0]),
            2.0 * w[:, 1] * N[:, 1],
        ],
        axis=1,
    )
    grad = -t * np.array([inv[0, 0], 2.0 * inv[0, 1], inv[1, 1]])
    grad += (du / slack[:, None]).sum(axis=0)

    hess = np.empty((3, 3))
    for i in range(3):
        for j in range(i, 3):
            hess[i, j] = hess[j, i] = t * np.trace(inv @ _EBASIS[i] @ inv @ _EBASIS[j])
    hess += np.einsum("ji,j,jk->ik", du, 1.0 / slack**2, du)
    n0, n1 = N[:, 0], N[:, 1]
    s = 1.0 / slack
    d2 = 2.0 * np.array(
        [
            [(s * n0 * n0).sum(), (s * n0 * n1).sum(), 0.0],
            [0.0, (s * (n0 * n0 + n1 * n1)).sum(), (s * n0 * n1).sum()],
            [0.0, 0.0, (s * n1 * n1).sum()],
        ]
    )
    d2[1, 0] = d2[0, 1]
    d2[2, 1] = d2[1, 2]
    hess += d2
    return grad, hess


def loewner_ellipse(half, tol=1e-10):
    """Largest-area inscribed ellipse of the symmetric polygon.

    Interior-point method on the smooth constraints |A n_j|^2 <= 1 over the
    edge functionals n_j, damped Newton steps, barrier parameter increased by
    a factor 10 until the duality measure drops below ``tol``.
    """
    half = np.asarray(half, dtype=float)
    N = _edge_duals(_canonical_half_list(half, strict=True))
    m = len(N)
    r = 0.9 / float(np.linalg.norm(N, axis=1).max())
    x = np.array([r, 0.0, r])
    t = 1.0
    t_final = m / tol
    while True:
        for _ in range(200):
            f, w, slack = _barrier_value(x, t, N)
            grad, hess = _barrier_grad_hess(x, t, N, w, slack)
            try:
                step = np.linalg.solve(hess, -grad)
            except np.linalg.LinAlgError:
                step = -grad
            decrement = float(-grad @ step)
            if decrement <= 2.0 * 1e-13 * (1.0 + abs(f)):
                break
            alpha = 1.0
            for _ in range(60):
                f_new, _, _ = _barrier_value(x + alpha * step, t, N)
                if f_new <= f - 1e-4 * alpha * decrement:
                    break
                alpha *= 0.5
            else:
                break
            x = x + alpha * step
        if t >= t_final:
            break
        t = min(10.0 * t, t_final)
    a, b, c = x
    body = EllipseBody(a, b, c)
    if body.det <= 0.0:
        raise ConvergenceError("inscribed-ellipse solve left the cone")
    return body


# -- minimum-volume enclosing ellipse (test oracle route) ----------------------

def mvee_matrix(points, tol=1e-9, maxiter=200000):
    """Centered minimum-volume ellipse {x : x^T Q x <= 1} of +-points.

    Khachiyan-style multiplicative updates on the design weights with Wolfe
    away steps (the plain toward-step iteration converges too slowly for
    tight tolerances).  Sign of the input points is irrelevant.
    """
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(P)
    if n < 2:
        raise StructureError("need at least 2 points")
    d = 2.0
    u = np.full(n, 1.0 / n)
    outer = P[:, :, None] * P[:, None, :]
    V = np.einsum("n,nij->ij", u, outer)
    for _ in range(maxiter):
        try:
            vinv = np.linalg.inv(V)
        except np.linalg.LinAlgError as exc:
            raise StructureError("point set is rank deficient") from exc
        kappa = np.einsum("ni,ij,nj->n", P, vinv, P)
        jp = int(np.argmax(kappa))
        up = kappa[jp] - d
        support = u > 1e-15
        kmin = np.where(support, kappa, np.inf)
        jm = int(np.argmin(kmin))
        dn = d - kappa[jm]
        if max(up, dn) <= d * tol:
            break
        if up >= dn:
            lam = up / (d * (kappa[jp] - 1.0))
            u *= 1.0 - lam
            u[jp] += lam
        else:
            kj = kappa[jm]
            cap = u[jm] / (1.0 - u[jm])
            lam = min((d - kj) / (d * (kj - 1.0)), cap) if kj > 1.0 else cap
            u *= 1.0 + lam
            u[jm] = max(u[jm] - lam, 0.0)
        V = np.einsum("n,nij->ij", u, outer)
    else:
        raise ConvergenceError("minimum-volume ellipse iteration did not converge")
    return np.linalg.inv(V) / d


def loewner_via_mvee(half, tol=1e-10):
    """Inscribed ellipse through the polar route: the polar of the minimal
    ellipse enclosing the dual polygon.  Test oracle for ``loewner_ellipse``."""
    duals = polar_dual(half)
    q = mvee_matrix(duals, tol=max(tol, 1e-12))
    ev, rot = np.linalg.eigh(q)
    a = rot @ np.diag(np.sqrt(ev)) @ rot.T
    return EllipseBody.from_matrix(a)


# -- minimal enclosing parallelogram -------------------------------------------

def _best_conjugate(p, duals):
    """Vertex of the dual polygon maximizing |det[p, q]|."""
    perp = np.array([-p[1], p[0]])
    vals = duals @ perp
    j = int(np.argmax(np.abs(vals)))
    q = duals[j] if vals[j] >= 0 else -duals[j]
    return q, float(abs(vals[j]))


def min_enclosing_parallelogram(half):
    """Smallest-area symmetric parallelogram containing the polygon.

    Uses the flush-edge property: some optimal slab functional sits at a
    vertex of the polar dual, so an exact sweep over dual vertices with the
    conjugate functional maximized over the dual polygon finds the optimum.
    """
    half = _canonical_half_list(half, strict=True)
    duals = polar_dual(half)
    best = None
    for p in duals:
        q, det = _best_conjugate(p, duals)
        if det <= 0.0:
            continue
        area = 4.0 / det
        if best is None or area < best[0]:
            best = (area, p, q)
    if best is None:
        raise StructureError("no conjugate direction found")
    _, p, q = best
    return Parallelogram((float(p[0]), float(p[1])), (float(q[0]), float(q[1])))


def min_parallelogram_rotation_grid(half, steps=3600):
    """Brute-force oracle: grid over the flush-slab direction, golden-section
    polish on the bracketing arc.  Returns the minimal area found."""
    half = _canonical_half_list(half, strict=True)
    duals = polar_dual(half)

    def area_at(phi):
        u = np.array([math.cos(phi), math.sin(phi)])
        h = float(np.abs(half @ u).max())  # support function of B
        p = u / h
        _, det = _best_conjugate(p, duals)
        return 4.0 / det

    ang = np.arange(steps) * (math.pi / steps)
    vals = np.array([area_at(a) for a in ang])
    j = int(np.argmin(vals))
    h = math.pi / steps
    _, neg = golden_max(lambda a: -area_at(a), ang[j] - h, ang[j] + h)
    return min(float(vals[j]), -neg)


def contains_scaled_ellipse(half, body, factor=1.0, tol=1e-6):
    """True when the polygon lies inside factor * body."""
    g = body.gauge(half)
    return bool(np.all(g <= factor * (1.0 + tol)))
