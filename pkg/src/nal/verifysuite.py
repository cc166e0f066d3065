"""Named numerical checks for the package's core constants.

Each check states a mathematical claim, the expected value, the computed
value, a tolerance, and its runtime.  ``run_checks`` executes them (with
an optional name filter) and returns a ``VerifyReport``; the CLI renders
the table and sets its exit code from the ``passed`` flag.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import convex
from .areas import (
    busemann,
    holmes_thompson,
    inscribed_riemannian,
    jacobian,
    mass_star,
    q_ratio,
    q_search,
)
from .energies import dirichlet, energy, reshetnyak
from .families import norm_family, random_polygon_norm, regular_hexagon_norm
from .norms import euclidean, lp_norm, quasiconformality, sup_norm
from .orbit import (
    induced_jacobian,
    is_minimal,
    isotropy_check,
    normalizer,
    orbit_minimize,
)

__all__ = ["CheckResult", "VerifyReport", "run_checks", "jd_sup_enclosure"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    claim: str
    expected: float
    computed: float
    tolerance: float
    passed: bool
    runtime: float
    kind: str = "abs"  # abs: |computed-expected| <= tol; ge / le: one-sided
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VerifyReport:
    checks: list
    runtime: float

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_dict(self):
        return {
            "passed": self.passed,
            "runtime": self.runtime,
            "checks": [
                {
                    "name": c.name,
                    "claim": c.claim,
                    "expected": c.expected,
                    "computed": c.computed,
                    "tolerance": c.tolerance,
                    "kind": c.kind,
                    "passed": c.passed,
                    "runtime": c.runtime,
                    **({"detail": c.detail} if c.detail else {}),
                }
                for c in self.checks
            ],
        }


def _close(expected, computed, tol, kind):
    if kind == "ge":
        return computed >= expected - tol
    if kind == "le":
        return computed <= expected + tol
    return abs(computed - expected) <= tol


def _areas():
    return {
        "busemann": busemann(),
        "holmes-thompson": holmes_thompson(),
        "mass-star": mass_star(),
        "inscribed": inscribed_riemannian(),
    }


# ---------------------------------------------------------------------------
# certified enclosure for the dirichlet-induced jacobian of the sup plane


def jd_sup_enclosure(step=1.5e-4, t_max=0.55):
    """Certified enclosure for the dirichlet-induced jacobian of s_inf.

    The orbit functional F(theta, t) = (1/2) I2(s o R(theta) diag(e^t, e^-t))
    is evaluated on a full grid by the exact per-sector formula.  The grid
    minimum m gives the enclosure [m - w, m]:

    - m is a true upper bound: every grid value is F at a concrete point.
    - On the slab 0 <= t <= t_max, |F(p) - F(q)| <= L (|dtheta| + |dt|)
      with L = 2 e^{2 t_max}: the sup gauge is 1-Lipschitz against the
      euclidean norm, and both the transform and its parameter derivatives
      have spectral norm <= e^{t_max}; hence w = L * step covers the
      worst-case offset of half a grid cell per axis.
    - Off the slab F cannot compete: the gauge is bounded below by the
      euclidean norm over sqrt(2), so F(theta, t) >= cosh(2t)/2, which
      exceeds m + w for t > t_max (asserted); t < 0 is conjugate to t > 0
      by quarter-turn rotations absorbed into theta, and theta has period
      pi by central symmetry.

    Returns (lo, hi) with the orbit infimum certified inside.
    """
    n = sup_norm()
    prims, duals = n.polygon_data()
    import nal._kernels as _kernels

    n_t = int(math.ceil(t_max / step)) + 1
    ts = np.linspace(0.0, t_max, n_t)
    n_theta = int(math.ceil(math.pi / step))
    best = math.inf
    block = max(1, 400000 // n_t)
    for start in range(0, n_theta, block):
        th = np.arange(start, min(start + block, n_theta)) * (math.pi / n_theta)
        tt, tl = np.meshgrid(th, ts, indexing="ij")
        out = _kernels.orbit_grid(prims, duals, tt.ravel(), np.exp(tl.ravel()))
        best = min(best, 0.5 * float(out[:, 0].min()))
    width = 2.0 * math.exp(2.0 * t_max) * step
    floor = 0.5 * math.cosh(2.0 * t_max)
    if floor <= best + width:
        raise ArithmeticError("slab too small to certify the enclosure")
    return best - width, best


def _check_jd_sup(budget):
    out = []
    t0 = time.time()
    res = orbit_minimize(dirichlet(), sup_norm(), resolution=192)
    lo, hi = jd_sup_enclosure(step=2e-4 if budget < 1.0 else 1.5e-4)
    width = hi - lo
    value = res.induced
    detail = {"lower": lo, "upper": hi, "bracket": width}
    out.append(
        CheckResult(
            name="jd-sup-value",
            claim="dirichlet-induced jacobian of the sup plane "
            "(certified grid enclosure, value = (1 + 2/pi)/2)",
            expected=0.5 * (1.0 + 2.0 / math.pi),
            computed=value,
            tolerance=max(width, 1e-9),
            passed=lo - 1e-12 <= value <= hi + 1e-12
            and abs(value - 0.5 * (1.0 + 2.0 / math.pi)) <= max(width, 1e-9),
            runtime=time.time() - t0,
            detail=detail,
        )
    )
    t0 = time.time()
    margin = min(abs(value - math.pi / 4.0), abs(value - 2.0 / math.pi))
    out.append(
        CheckResult(
            name="jd-sup-distinct",
            claim="dirichlet-induced jacobian of the sup plane differs from "
            "pi/4 and 2/pi by more than 10x its certified bracket",
            expected=10.0,
            computed=margin / width,
            tolerance=0.0,
            passed=margin > 10.0 * width,
            runtime=time.time() - t0,
            kind="ge",
            detail={"value": value, "bracket": width,
                    "dist_busemann": abs(value - math.pi / 4.0),
                    "dist_holmes_thompson": abs(value - 2.0 / math.pi)},
        )
    )
    return out


# ---------------------------------------------------------------------------
# check groups


def _check_jacobian_constants(budget):
    sup = sup_norm()
    cases = [
        ("jacobian-busemann-sup", "busemann jacobian of the sup plane is pi/4",
         busemann(), sup, math.pi / 4.0, 1e-9),
        ("jacobian-holmes-thompson-sup",
         "holmes-thompson jacobian of the sup plane is 2/pi",
         holmes_thompson(), sup, 2.0 / math.pi, 1e-9),
        ("jacobian-mass-star-sup",
         "mass-star jacobian of the sup plane is 1 (the ball is its own "
         "minimal parallelogram)", mass_star(), sup, 1.0, 1e-9),
        ("jacobian-inscribed-sup",
         "inscribed-riemannian jacobian of the sup plane is 1 (the inscribed "
         "ellipse is the unit disc)", inscribed_riemannian(), sup, 1.0, 1e-6),
        ("jacobian-euclid-normalized",
         "all four jacobians equal 1 on the euclidean plane",
         None, euclidean(), 1.0, 1e-6),
    ]
    out = []
    for name, claim, area, n, expect, tol in cases:
        t0 = time.time()
        if area is None:
            vals = [jacobian(a, n) for a in _areas().values()]
            computed = float(max(vals, key=lambda v: abs(v - expect)))
        else:
            computed = jacobian(area, n)
        out.append(CheckResult(name, claim, expect, computed, tol,
                               _close(expect, computed, tol, "abs"),
                               time.time() - t0))
    return out


def _check_energy_constants(budget):
    cases = [
        ("energy-dirichlet-euclid", "circle-average energy of the euclidean "
         "norm is 2", dirichlet(), euclidean(), 2.0),
        ("energy-reshetnyak-euclid", "sup energy of the euclidean norm is 1",
         reshetnyak(), euclidean(), 1.0),
        ("energy-dirichlet-sup", "circle-average energy of the sup norm is "
         "1 + 2/pi", dirichlet(), sup_norm(), 1.0 + 2.0 / math.pi),
        ("energy-reshetnyak-sup", "sup energy of the sup norm is 1",
         reshetnyak(), sup_norm(), 1.0),
        ("energy-dirichlet-l1", "circle-average energy of the l1 norm is "
         "2 + 4/pi", dirichlet(), lp_norm(1.0), 2.0 + 4.0 / math.pi),
        ("energy-reshetnyak-l1", "sup energy of the l1 norm is 2",
         reshetnyak(), lp_norm(1.0), 2.0),
    ]
    out = []
    for name, claim, e, n, expect in cases:
        t0 = time.time()
        computed = energy(e, n)
        out.append(CheckResult(name, claim, expect, computed, 1e-9,
                               _close(expect, computed, 1e-9, "abs"),
                               time.time() - t0))
    return out


def _check_normalizers(budget):
    out = []
    t0 = time.time()
    lam = normalizer(dirichlet())
    out.append(CheckResult(
        "lambda-dirichlet", "normalizer of the circle-average energy is 1/2",
        0.5, lam, 1e-6, _close(0.5, lam, 1e-6, "abs"), time.time() - t0))
    t0 = time.time()
    lam = normalizer(reshetnyak())
    out.append(CheckResult(
        "lambda-reshetnyak", "normalizer of the sup energy is 1",
        1.0, lam, 1e-9, _close(1.0, lam, 1e-9, "abs"), time.time() - t0))
    return out


def _check_q_constants(budget):
    count = max(60, int(300 * budget))
    cases = [
        ("q-busemann-square", "q of the busemann area is pi/4, attained at "
         "the square", busemann(), "perturbed-square", math.pi / 4.0, 1e-6),
        ("q-holmes-thompson-square", "q of the holmes-thompson area is 2/pi, "
         "attained at the square", holmes_thompson(), "perturbed-square",
         2.0 / math.pi, 1e-4),
        ("q-mass-star-hexagon", "q of the mass-star area is sqrt(3)/2, "
         "attained at the regular hexagon", mass_star(), "perturbed-hexagon",
         math.sqrt(3.0) / 2.0, 1e-4),
    ]
    out = []
    for name, claim, area, family, expect, tol in cases:
        t0 = time.time()
        witness = sup_norm() if family == "perturbed-square" else regular_hexagon_norm()
        at_witness = q_ratio(area, witness)
        sweep = q_search(area, family=family, budget=count, seed=11)
        computed = min(at_witness, sweep.best_ratio)
        passed = (abs(at_witness - expect) <= tol
                  and sweep.best_ratio >= expect - 1e-3)
        out.append(CheckResult(name, claim, expect, computed, tol, passed,
                               time.time() - t0,
                               detail={"witness": at_witness,
                                       "sweep_min": sweep.best_ratio,
                                       "sweep_size": count}))
    t0 = time.time()
    rmin, rmax = math.inf, -math.inf
    for label, area in _areas().items():
        sweep = q_search(area, family="random-polygons",
                         budget=count, seed=23, refine=False)
        ratios = [r for _, r in sweep.rows]
        rmin = min(rmin, min(ratios))
        rmax = max(rmax, max(ratios))
    out.append(CheckResult(
        "q-range", "every ratio to the inscribed-riemannian area lies in "
        "[1/2, 1] (inscribed-ellipse area bounds)", 0.5, rmin, 0.0,
        rmin >= 0.5 and rmax <= 1.0 + 1e-9, time.time() - t0, kind="ge",
        detail={"min_ratio": rmin, "max_ratio": rmax}))
    t0 = time.time()
    vals = [q_ratio(inscribed_riemannian(), n)
            for _, n in norm_family("random-polygons", 24, seed=3)]
    worst = float(max(vals, key=lambda v: abs(v - 1.0)))
    out.append(CheckResult(
        "q-inscribed-one", "the inscribed-riemannian area has ratio "
        "identically 1 against itself", 1.0, worst, 1e-9,
        _close(1.0, worst, 1e-9, "abs"), time.time() - t0))
    return out


def _check_induced(budget):
    count = max(20, int(40 * budget))
    rng = np.random.default_rng(7)
    t0 = time.time()
    worst = 0.0
    for _ in range(count):
        n = random_polygon_norm(rng)
        ji = jacobian(inscribed_riemannian(), n)
        jr = induced_jacobian(reshetnyak(), n)
        worst = max(worst, abs(jr - ji) / max(1.0, ji))
    out = [CheckResult(
        "induced-reshetnyak-inscribed", "the jacobian induced by the sup "
        "energy is the inscribed-riemannian jacobian", 0.0, worst, 2e-4,
        worst <= 2e-4, time.time() - t0, detail={"count": count})]

    count = max(30, int(60 * budget))
    rng = np.random.default_rng(13)
    t0 = time.time()
    disagree = 0
    borderline = 0
    for _ in range(count):
        n = random_polygon_norm(rng)
        mrep = is_minimal(reshetnyak(), n)
        irep = isotropy_check(n)
        if mrep.minimal != irep.isotropic:
            if abs(irep.aspect - 1.0) <= 1e-4 or mrep.gap <= 1e-4 * mrep.value:
                borderline += 1
            else:
                disagree += 1
    out.append(CheckResult(
        "minimal-iff-isotropic", "a norm minimizes the sup energy over its "
        "orbit exactly when its inscribed ellipse is a disc", 0.0,
        float(disagree), 0.0, disagree == 0, time.time() - t0,
        detail={"count": count, "borderline": borderline}))

    count = max(60, int(120 * budget))
    rng = np.random.default_rng(29)
    t0 = time.time()
    qc_worst = 0.0
    for _ in range(count):
        n = random_polygon_norm(rng)
        res = orbit_minimize(reshetnyak(), n, resolution=48)
        qc_worst = max(qc_worst, quasiconformality(res.minimal_norm))
    qc_square = quasiconformality(orbit_minimize(
        reshetnyak(), sup_norm(), resolution=48).minimal_norm)
    out.append(CheckResult(
        "qc-bound-minimal", "sup-energy-minimal norms are sqrt(2)-"
        "quasiconformal, with the square attaining the bound",
        math.sqrt(2.0), qc_worst, 1e-3,
        qc_worst <= math.sqrt(2.0) + 1e-3
        and qc_square >= math.sqrt(2.0) - 1e-2,
        time.time() - t0, kind="le",
        detail={"count": count, "square": qc_square}))

    count = max(200, int(1500 * budget))
    rng = np.random.default_rng(31)
    t0 = time.time()
    viol = 0.0
    eq_mismatch = 0
    energies = [dirichlet(), reshetnyak()]
    for k in range(count):
        n = random_polygon_norm(rng)
        e = energies[k % 2]
        lam = normalizer(e)
        ind = induced_jacobian(e, n)
        en = energy(e, n)
        viol = max(viol, ind - lam * en)
        equal = abs(ind - lam * en) <= 1e-6 * max(1.0, abs(lam * en))
        if equal != is_minimal(e, n).minimal:
            eq_mismatch += 1
    out.append(CheckResult(
        "induced-le-normalized-energy", "the induced jacobian never exceeds "
        "the normalized energy, with equality exactly at orbit minimizers",
        0.0, viol, 1e-9,
        viol <= 1e-9 and eq_mismatch == 0, time.time() - t0, kind="le",
        detail={"count": count, "equality_mismatches": eq_mismatch}))
    return out


def _check_oracles(budget):
    count = max(30, int(100 * budget))
    rng = np.random.default_rng(41)
    out = []
    t0 = time.time()
    worst = 0.0
    for _ in range(count):
        n = random_polygon_norm(rng)
        half = n.half_vertices()
        a = convex.loewner_ellipse(half)
        b = convex.loewner_via_mvee(half)
        worst = max(worst, abs(a.det - b.det))
    out.append(CheckResult(
        "loewner-barrier-vs-polar", "the barrier solver and the "
        "enclosing-ellipse polar oracle agree on the inscribed ellipse",
        0.0, worst, 1e-6, worst <= 1e-6, time.time() - t0,
        detail={"count": count}))

    t0 = time.time()
    rng = np.random.default_rng(43)
    worst = 0.0
    for _ in range(count):
        n = random_polygon_norm(rng)
        half = n.half_vertices()
        a = convex.min_enclosing_parallelogram(half).area
        b = convex.min_parallelogram_rotation_grid(half)
        worst = max(worst, abs(a - b) / a)
    out.append(CheckResult(
        "parallelogram-vs-rotation-grid", "the caliper minimal parallelogram "
        "agrees with a 3600-step rotation-grid oracle", 0.0, worst, 1e-6,
        worst <= 1e-6, time.time() - t0, detail={"count": count}))
    return out


_check_jacobian_constants.names = (
    "jacobian-busemann-sup", "jacobian-holmes-thompson-sup",
    "jacobian-mass-star-sup", "jacobian-inscribed-sup",
    "jacobian-euclid-normalized")
_check_energy_constants.names = (
    "energy-dirichlet-euclid", "energy-reshetnyak-euclid",
    "energy-dirichlet-sup", "energy-reshetnyak-sup",
    "energy-dirichlet-l1", "energy-reshetnyak-l1")
_check_normalizers.names = ("lambda-dirichlet", "lambda-reshetnyak")
_check_q_constants.names = (
    "q-busemann-square", "q-holmes-thompson-square", "q-mass-star-hexagon",
    "q-range", "q-inscribed-one")
_check_induced.names = (
    "induced-reshetnyak-inscribed", "minimal-iff-isotropic",
    "qc-bound-minimal", "induced-le-normalized-energy")
_check_jd_sup.names = ("jd-sup-value", "jd-sup-distinct")
_check_oracles.names = (
    "loewner-barrier-vs-polar", "parallelogram-vs-rotation-grid")

_GROUPS = (
    _check_jacobian_constants,
    _check_energy_constants,
    _check_normalizers,
    _check_q_constants,
    _check_induced,
    _check_jd_sup,
    _check_oracles,
)


def run_checks(only=None, budget=1.0):
    """Run named checks; ``only`` keeps checks whose name contains it,
    ``budget`` scales sample counts (1.0 = defaults)."""
    t0 = time.time()
    checks = []
    for group in _GROUPS:
        if only and not any(only in name for name in group.names):
            continue
        checks.extend(group(budget))
    if only:
        checks = [c for c in checks if only in c.name]
    return VerifyReport(checks=checks, runtime=time.time() - t0)
