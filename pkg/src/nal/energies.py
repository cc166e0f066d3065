"""Quadratic energy densities on seminorms.

Two base energies satisfy the monotone / 2-homogeneous / rotation-invariant
axioms: the circle average

    dirichlet(s) = (1/pi) * integral_{S^1} s(v)^2 dv

and the squared sup

    reshetnyak(s) = max_{S^1} s(v)^2,

plus nonnegative combinations a*dirichlet + b*reshetnyak + c*jacobian with
a + b > 0 (the jacobian term alone is not proper).  On the round norm the
circle average evaluates to 2 and the sup to 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .norms import Norm2, StructureError, golden_max, unit_vectors

__all__ = [
    "EnergyDef",
    "dirichlet",
    "reshetnyak",
    "combo",
    "energy",
    "comparability_constant",
    "energy_from_spec",
]


@dataclass(frozen=True)
class EnergyDef:
    """Descriptor of an energy functional on seminorms."""

    kind: str
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    area: Any = None

    def label(self):
        if self.kind != "combo":
            return self.kind
        tail = self.area.label() if self.area is not None else ""
        return f"combo:{self.a:g},{self.b:g},{self.c:g},{tail}"


def dirichlet():
    """The circle-average quadratic energy."""
    return EnergyDef("dirichlet")


def reshetnyak():
    """The squared sup energy."""
    return EnergyDef("reshetnyak")


def combo(a, b, c=0.0, area=None):
    """a*dirichlet + b*reshetnyak + c*jacobian(area)."""
    a, b, c = float(a), float(b), float(c)
    if a < 0 or b < 0 or c < 0:
        raise StructureError("combination weights must be nonnegative")
    if not a + b > 0:
        raise StructureError("energy needs a + b > 0 to be proper")
    if c > 0 and area is None:
        raise StructureError("a jacobian term needs an area definition")
    return EnergyDef("combo", a=a, b=b, c=c, area=area if c > 0 else None)


def circle_average_sq(n, resolution=4096):
    """(1/pi) * integral of the squared gauge over the unit circle.

    Exact for polygon (per-sector closed form), ellipse (trace) and
    degenerate kinds; adaptive quadrature for the analytic lp-based kinds.
    """
    if n.kind == "zero":
        return 0.0
    if n.kind == "degenerate":
        return float(n._functional @ n._functional)
    if n.kind == "ellipse":
        return float(np.trace(n._spd))
    if n.kind == "polygon":
        prims, duals = n.polygon_data()
        out = _kernels.orbit_grid(prims, duals, np.zeros(1), np.ones(1))
        return float(out[0, 0])
    if n.kind == "scaled":
        return n._factor ** 2 * circle_average_sq(n._base, resolution)

    def integrand(t):
        return n.gauge(np.array([math.cos(t), math.sin(t)])) ** 2

    val, _ = quad(integrand, 0.0, math.pi, epsabs=1e-12, epsrel=1e-12, limit=200)
    return 2.0 * val / math.pi


def sup_sq(n, resolution=4096):
    """Squared maximum of the gauge over the unit circle.

    Exact for the convex-geometry kinds; sampled with golden-section
    refinement for the analytic kinds.
    """
    if n.kind == "zero":
        return 0.0
    if n.kind == "degenerate":
        return float(n._functional @ n._functional)
    if n.kind == "ellipse":
        return float(np.linalg.eigvalsh(n._spd)[1])
    if n.kind == "polygon":
        return float((n._duals ** 2).sum(axis=1).max())
    if n.kind == "scaled":
        return n._factor ** 2 * sup_sq(n._base, resolution)
    dirs = unit_vectors(resolution, half=True)
    vals = n.gauge(dirs)
    j = int(np.argmax(vals))
    h = math.pi / resolution
    _, refined = golden_max(
        lambda t: n.gauge(np.array([math.cos(t), math.sin(t)])),
        j * h - h,
        j * h + h,
    )
    return float(max(vals[j], refined)) ** 2


def energy(e, n, resolution=4096):
    """Evaluate the energy descriptor on a seminorm."""
    if e.kind == "dirichlet":
        return circle_average_sq(n, resolution)
    if e.kind == "reshetnyak":
        return sup_sq(n, resolution)
    if e.kind == "combo":
        val = 0.0
        if e.a:
            val += e.a * circle_average_sq(n, resolution)
        if e.b:
            val += e.b * sup_sq(n, resolution)
        if e.c:
            from .areas import jacobian

            val += e.c * jacobian(e.area, n)
        return val
    raise StructureError(f"unknown energy kind {e.kind!r}")


def properness_constant(e):
    """c0 > 0 with energy(e, s) >= c0 * sup_sq(s) (the sup bounds the circle
    average from below on seminorms)."""
    if e.kind == "dirichlet":
        return 1.0
    if e.kind == "reshetnyak":
        return 1.0
    return e.a + e.b


def comparability_constant(e, norms):
    """Smallest k >= 1 with (1/k) energy <= sup_sq <= k * energy over the
    sample of seminorms."""
    k = 1.0
    for n in norms:
        ev = energy(e, n)
        sv = sup_sq(n)
        if ev <= 0.0 or sv <= 0.0:
            if ev == sv:
                continue
            raise StructureError("zero seminorm mixed with nonzero energies")
        k = max(k, ev / sv, sv / ev)
    return k


def energy_from_spec(text):
    """Parse ``dirichlet`` | ``reshetnyak`` | ``combo:<a>,<b>,<c>,<area-spec>``."""
    text = text.strip()
    if text == "dirichlet":
        return dirichlet()
    if text == "reshetnyak":
        return reshetnyak()
    if text.startswith("combo:"):
        from .areas import area_from_spec

        body = text[6:]
        parts = body.split(",", 3)
        if len(parts) < 3:
            raise StructureError(f"bad energy spec {text!r}")
        a, b, c = (float(x) for x in parts[:3])
        area = None
        if len(parts) == 4 and parts[3].strip():
            area = area_from_spec(parts[3])
        return combo(a, b, c, area)
    raise StructureError(f"unknown energy spec {text!r}")
