"""Jacobians (area densities) on the space of seminorms.

A definition of area on normed planes is determined by its jacobian J(s):
monotone, 2-homogeneous, SL2-invariant and normalized to J = 1 on the round
norm.  Four classical choices are provided, plus convex mixtures and the
definitions induced by an energy via the SL2 orbit (see ``nal.orbit``).

All jacobians agree on quadratic (ellipse) norms, where they equal
sqrt(det M); they differ on generic norms, and the ratio

    q_ratio(mu, n) = J^mu(n) / J^inscribed(n)

lies in [1/2, 1] with known extremal bodies: the square for busemann
(ratio pi/4) and holmes-thompson (ratio 2/pi), the regular hexagon for
mass-star (ratio sqrt(3)/2).

Accuracy: analytic kinds are polygonized at ``resolution`` half-vertices
before the convex-geometry work; the polygonization error of the jacobian
falls off quadratically in the resolution (doubling it quarters the error),
so Richardson-style refinement applies if needed.  Polygon inputs are exact
up to the inscribed-ellipse solver tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import convex
from .families import norm_family
from .norms import StructureError, golden_max, polygon_norm, polygon_norm_hull

__all__ = [
    "AreaDef",
    "busemann",
    "holmes_thompson",
    "mass_star",
    "inscribed_riemannian",
    "induced_area",
    "mix_area",
    "jacobian",
    "q_ratio",
    "q_search",
    "QSearchResult",
    "area_from_spec",
]


@dataclass(frozen=True)
class AreaDef:
    """Descriptor of an area definition."""

    kind: str
    energy: Any = None
    parts: tuple = ()

    def label(self):
        if self.kind == "induced":
            return f"induced:{self.energy.label()}"
        if self.kind == "mix":
            return "mix:" + ";".join(f"{w:g},{a.label()}" for w, a in self.parts)
        return self.kind


def busemann():
    """J(s) = pi / |B_s|  (Hausdorff measure)."""
    return AreaDef("busemann")


def holmes_thompson():
    """J(s) = |B_s^*| / pi  (symplectic volume of the co-ball)."""
    return AreaDef("holmes-thompson")


def mass_star():
    """J(s) = 4 / |P_s| with P_s the minimal enclosing parallelogram."""
    return AreaDef("mass-star")


def inscribed_riemannian():
    """J(s) = pi / |L_s| with L_s the largest inscribed ellipse."""
    return AreaDef("inscribed")


def induced_area(energy_def):
    """The area definition induced by an energy through its SL2 orbit."""
    return AreaDef("induced", energy=energy_def)


def mix_area(parts):
    """Convex combination sum w_i * J_i; weights nonnegative, summing to 1."""
    parts = tuple((float(w), a) for w, a in parts)
    if any(w < 0 for w, _ in parts) or not parts:
        raise StructureError("mixture weights must be nonnegative")
    if abs(sum(w for w, _ in parts) - 1.0) > 1e-12:
        raise StructureError("mixture weights must sum to 1")
    return AreaDef("mix", parts=parts)


def jacobian(area, n, resolution=256):
    """Evaluate the jacobian of ``area`` at the seminorm ``n``.

    Exactly 0 on seminorms that are not norms; exactly sqrt(det M) on
    ellipse norms.
    """
    if not n.is_norm:
        return 0.0
    if area.kind == "mix":
        return sum(w * jacobian(a, n, resolution) for w, a in area.parts)
    if area.kind == "induced":
        from .orbit import induced_jacobian

        return induced_jacobian(area.energy, n)
    if n.kind == "ellipse":
        return float(math.sqrt(np.linalg.det(n._spd)))
    half = n.half_vertices(resolution)
    if area.kind == "busemann":
        return math.pi / convex.polygon_area(half)
    if area.kind == "holmes-thompson":
        return convex.polygon_area(convex.polar_dual(half)) / math.pi
    if area.kind == "mass-star":
        return 4.0 / convex.min_enclosing_parallelogram(half).area
    if area.kind == "inscribed":
        return math.pi / convex.loewner_ellipse(half).area
    raise StructureError(f"unknown area kind {area.kind!r}")


def q_ratio(area, n, resolution=256):
    """J^mu(n) / J^inscribed(n); in [1/2, 1] up to solver tolerance."""
    denom = jacobian(inscribed_riemannian(), n, resolution)
    if denom == 0.0:
        raise StructureError("q ratio needs a norm")
    return jacobian(area, n, resolution) / denom


@dataclass
class QSearchResult:
    area_label: str
    family: str
    rows: list  # (label, ratio)
    best_label: str
    best_ratio: float
    refined_ratio: float
    refined_vertices: np.ndarray


def _isotropic_position(half):
    body = convex.loewner_ellipse(half)
    t = np.linalg.inv(body.matrix) * math.sqrt(body.det)
    return half @ t.T


def _refine_vertices(area, half, rounds=2, step=0.08):
    """Coordinate descent on the vertex coordinates, polygon rebuilt by hull."""

    def ratio_of(flat):
        try:
            n = polygon_norm_hull(flat.reshape(-1, 2))
        except StructureError:
            return math.inf
        return q_ratio(area, n)

    x = _isotropic_position(half).ravel().copy()
    best = ratio_of(x)
    h = step
    for _ in range(rounds):
        for i in range(len(x)):
            lo, hi = x[i] - h, x[i] + h

            def slice_neg(t, i=i):
                y = x.copy()
                y[i] = t
                return -ratio_of(y)

            t, neg = golden_max(slice_neg, lo, hi, tol=1e-6, maxiter=40)
            if -neg < best:
                best = -neg
                x[i] = t
        h /= 4.0
    return best, x.reshape(-1, 2)


def q_search(area, family="random-polygons", budget=200, seed=0, refine=True):
    """Search a seeded family for small values of q_ratio.

    Returns every evaluated (label, ratio) row plus a locally refined value
    obtained by coordinate descent on the best candidate's vertices in
    isotropic (inscribed-ellipse-is-round) position.
    """
    rows = []
    best = (math.inf, None, None)
    for label, n in norm_family(family, budget, seed):
        r = q_ratio(area, n)
        rows.append((label, r))
        if r < best[0]:
            best = (r, label, n)
    refined_ratio, refined_verts = best[0], best[2].half_vertices()
    if refine and best[2].kind == "polygon":
        refined_ratio, refined_verts = _refine_vertices(area, best[2].half_vertices())
        refined_ratio = min(refined_ratio, best[0])
    return QSearchResult(
        area_label=area.label(),
        family=family,
        rows=rows,
        best_label=best[1],
        best_ratio=best[0],
        refined_ratio=refined_ratio,
        refined_vertices=refined_verts,
    )


def area_from_spec(text):
    """Parse an area spec: ``busemann`` | ``holmes-thompson`` | ``mass-star``
    | ``inscribed`` | ``induced:<energy-spec>`` | ``mix:<w>,<spec>;...``."""
    text = text.strip()
    simple = {
        "busemann": busemann,
        "holmes-thompson": holmes_thompson,
        "ht": holmes_thompson,
        "mass-star": mass_star,
        "inscribed": inscribed_riemannian,
    }
    if text in simple:
        return simple[text]()
    if text.startswith("induced:"):
        from .energies import energy_from_spec

        return induced_area(energy_from_spec(text[8:]))
    if text.startswith("mix:"):
        parts = []
        for item in text[4:].split(";"):
            w, _, spec = item.partition(",")
            parts.append((float(w), area_from_spec(spec)))
        return mix_area(parts)
    raise StructureError(f"unknown area spec {text!r}")
