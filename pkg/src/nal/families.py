"""Seeded families of norms used by searches, estimates and tests.

Every family is deterministic in (budget, seed).  The polygon-based families
lead with the square and the regular hexagon so the extremal bodies are
always part of the sample.
"""
from __future__ import annotations

import math

import numpy as np

from .norms import (
    StructureError,
    lp_norm,
    polygon_norm,
    polygon_norm_hull,
    sup_norm,
    unit_vectors,
)

__all__ = ["FAMILY_NAMES", "norm_family", "random_polygon_norm", "regular_hexagon_norm"]

FAMILY_NAMES = ("random-polygons", "lp", "perturbed-square", "perturbed-hexagon")


def regular_hexagon_norm():
    r3 = math.sqrt(3.0) / 2.0
    return polygon_norm([(1.0, 0.0), (0.5, r3), (-0.5, r3)])


def random_polygon_norm(rng, k_min=8, k_max=32):
    """Random polygon norm with between k_min and k_max half-list vertices."""
    for _ in range(64):
        k = int(rng.integers(k_min, k_max + 1))
        ang = np.sort(rng.uniform(0.0, math.pi, k))
        radii = rng.uniform(0.5, 1.5, k)
        pts = radii[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        try:
            return polygon_norm_hull(pts)
        except StructureError:
            continue
    raise StructureError("could not draw a valid random polygon")


def _boundary_sample(n, count=12):
    """Points on the unit sphere of n, including flat-edge interiors, so a
    perturbation can leave the linear orbit of the base body (perturbing
    extreme vertices alone maps parallelograms to parallelograms)."""
    dirs = unit_vectors(count, half=True)
    return dirs / n.gauge(dirs)[:, None]


def _perturbed(base_pts, rng, sigma):
    for _ in range(64):
        pts = base_pts + rng.normal(0.0, sigma, base_pts.shape)
        try:
            return polygon_norm_hull(pts)
        except StructureError:
            continue
    return polygon_norm_hull(base_pts)


def norm_family(name, budget, seed, k_min=8, k_max=32):
    """Yield (label, norm) pairs; exactly ``budget`` of them."""
    rng = np.random.default_rng(seed)
    if name == "random-polygons":
        specials = [("square", sup_norm()), ("hexagon", regular_hexagon_norm())]
        for i in range(budget):
            if i < len(specials):
                yield specials[i]
            else:
                yield (f"poly-{i}", random_polygon_norm(rng, k_min, k_max))
    elif name == "lp":
        ps = [1.0, math.inf, 2.0]
        if budget > 3:
            ps = ps + list(np.geomspace(1.05, 48.0, budget - 3))
        for p in ps[:budget]:
            yield (f"p={p:g}", lp_norm(p))
    elif name == "perturbed-square":
        base = sup_norm()
        pts = _boundary_sample(base)
        for i in range(budget):
            if i == 0:
                yield ("sigma=0", polygon_norm(base.half_vertices()))
            else:
                sigma = 0.25 * i / budget
                yield (f"sigma={sigma:.4g}", _perturbed(pts, rng, sigma))
    elif name == "perturbed-hexagon":
        base = regular_hexagon_norm()
        pts = _boundary_sample(base)
        for i in range(budget):
            if i == 0:
                yield ("sigma=0", polygon_norm(base.half_vertices()))
            else:
                sigma = 0.25 * i / budget
                yield (f"sigma={sigma:.4g}", _perturbed(pts, rng, sigma))
    else:
        raise StructureError(f"unknown family {name!r}; choose from {FAMILY_NAMES}")
