"""Command-line interface.

One subcommand per computation; JSON is the only machine format (floats
serialized at 12 significant digits, keys sorted, so identical commands
with identical seeds produce byte-identical output).  Human tables are
rendered from the same dictionaries.

Exit codes: 0 success, 1 usage or parse error, 2 numerical
non-convergence, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .areas import area_from_spec, busemann, holmes_thompson, inscribed_riemannian, \
    jacobian, mass_star, q_search
from .energies import energy_from_spec
from .mesh import build_mesh
from .norms import ConvergenceError, StructureError, norm_from_spec
from .orbit import orbit_minimize
from .plateau import (
    circle_curve,
    curve_from_file,
    initial_map,
    inner_variation_test,
    map_area,
    minimize_energy,
    square_curve,
    target_from_spec,
    verify_main_lemma,
)
from .verifysuite import run_checks

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code pinned to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def _round12(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_round12(v) for v in obj]
    return obj


def _emit(obj):
    sys.stdout.write(json.dumps(_round12(obj), sort_keys=True,
                                separators=(",", ":")) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_jacobian(args):
    n = norm_from_spec(args.norm)
    area = area_from_spec(args.area)
    value = jacobian(area, n, resolution=args.resolution)
    if args.svg:
        from . import svgout

        svgout.write_svg(args.svg, svgout.norm_figure(n))
    _emit({"norm": n.to_spec(), "area": area.label(), "jacobian": value,
           "resolution": args.resolution})
    return 0


def _cmd_induced(args):
    n = norm_from_spec(args.norm)
    e = energy_from_spec(args.energy)
    res = orbit_minimize(e, n, resolution=args.resolution)
    _emit({
        "norm": n.to_spec(),
        "energy": e.label(),
        "induced": res.induced,
        "lambda": res.normalizer,
        "orbit_value": res.value,
        "theta": res.theta,
        "lam": res.lam,
        "minimizer": res.minimizer.matrix.tolist(),
        "minimal_norm": res.minimal_norm.to_spec(),
        "diagnostics": {
            "resolution": res.diagnostics.resolution,
            "refine_iterations": res.diagnostics.refine_iterations,
            "certified_bracket": res.diagnostics.certified_bracket,
        },
    })
    return 0


def _cmd_qmu(args):
    area = area_from_spec(args.area)
    res = q_search(area, family=args.family, budget=args.budget,
                   seed=args.seed)
    summary = {
        "area": area.label(),
        "family": args.family,
        "budget": args.budget,
        "seed": args.seed,
        "count": len(res.rows),
        "min_ratio": res.best_ratio,
        "best_label": res.best_label,
        "refined_ratio": res.refined_ratio,
    }
    if args.json:
        summary["rows"] = [[label, ratio] for label, ratio in res.rows]
        _emit(summary)
    else:
        sys.stdout.write("label,ratio\n")
        for label, ratio in res.rows:
            sys.stdout.write(f"{label},{_round12(ratio)}\n")
        _emit(summary)
    return 0


def _cmd_plateau(args):
    target = target_from_spec(args.norm)
    e = energy_from_spec(args.energy)
    if args.boundary == "square":
        curve = square_curve()
    elif args.boundary == "circle":
        curve = circle_curve()
    else:
        curve = curve_from_file(args.boundary)
    mesh = build_mesh(args.mesh_level)
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    init = initial_map(mesh, target, curve, rng=rng,
                       jitter=0.3 if args.seed is not None else 0.0)
    u, info = minimize_energy(target, curve, e, mesh, init=init,
                              maxiter=args.budget)
    lemma = verify_main_lemma(u, e)
    iv = inner_variation_test(u, e, trials=32, seed=args.seed or 0)
    area_by_def = {
        "busemann": map_area(u, busemann()),
        "holmes-thompson": map_area(u, holmes_thompson()),
        "mass-star": map_area(u, mass_star()),
        "inscribed": map_area(u, inscribed_riemannian()),
        "induced": lemma.area,
    }
    if args.svg:
        from . import svgout

        svgout.write_svg(args.svg, svgout.plateau_figure(u))
    _emit({
        "energy_def": e.label(),
        "target": target.label(),
        "mesh_level": args.mesh_level,
        "energy": lemma.energy,
        "area_by_def": area_by_def,
        "gap": lemma.gap,
        "isotropy_fraction": lemma.isotropy_fraction,
        "qc_max": lemma.qc_max,
        "seed": args.seed,
        "converged": info.converged,
        "inner_variation": {
            "worst_decrease": iv.worst_decrease,
            "admissible": iv.admissible,
            "trials": iv.trials,
        },
    })
    return 0 if info.converged else 2


def _cmd_verify(args):
    report = run_checks(only=args.only, budget=args.budget)
    data = report.as_dict()
    if args.json:
        _emit(data)
    else:
        width = max((len(c["name"]) for c in data["checks"]), default=4)
        sys.stdout.write(
            f"{'check':{width}}  {'status':6}  {'expected':>14}  "
            f"{'computed':>14}  {'tolerance':>9}  {'time':>7}\n")
        for c in data["checks"]:
            status = "pass" if c["passed"] else "FAIL"
            rel = {"abs": "", "ge": ">=", "le": "<="}[c["kind"]]
            sys.stdout.write(
                f"{c['name']:{width}}  {status:6}  {rel}{c['expected']:>{14 - len(rel)}.8g}  "
                f"{c['computed']:>14.8g}  {c['tolerance']:>9.2g}  "
                f"{c['runtime']:>6.2f}s\n")
        total = sum(1 for c in data["checks"] if c["passed"])
        sys.stdout.write(
            f"{total}/{len(data['checks'])} checks passed "
            f"in {data['runtime']:.1f}s\n")
    return 0 if data["passed"] else 3


def _build_parser():
    parser = _Parser(prog="nal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jacobian", help="jacobian of an area on a norm",
                       parents=[], description="Evaluate one area "
                       "definition's jacobian on one norm.")
    p.add_argument("--norm", required=True, help="norm spec, e.g. sup, "
                   "euclid, lp:1.5, ellipse:a,b,c, polygon:x1,y1;x2,y2;...")
    p.add_argument("--area", required=True, help="area spec: busemann, "
                   "holmes-thompson, mass-star, inscribed, induced:<energy>, "
                   "mix:w1,a1;w2,a2")
    p.add_argument("--resolution", type=int, default=256)
    p.add_argument("--svg", help="write the ball/ellipse/parallelogram/dual "
                   "figure to this path")
    p.add_argument("--json", action="store_true",
                   help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=_cmd_jacobian)

    p = sub.add_parser("induced", help="orbit minimization and the induced "
                       "jacobian")
    p.add_argument("--norm", required=True)
    p.add_argument("--energy", required=True, help="dirichlet, reshetnyak, "
                   "or combo:a,b,c,<area>")
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--json", action="store_true",
                   help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=_cmd_induced)

    p = sub.add_parser("qmu", help="search a norm family for small "
                       "area-to-inscribed ratios")
    p.add_argument("--area", required=True)
    p.add_argument("--family", default="random-polygons",
                   help="random-polygons, lp, perturbed-square, "
                   "perturbed-hexagon")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true",
                   help="emit one JSON object instead of CSV + summary")
    p.set_defaults(func=_cmd_qmu)

    p = sub.add_parser("plateau", help="minimize energy over disc maps "
                       "spanning a boundary curve")
    p.add_argument("--norm", default="sup", help="target space spec: sup, "
                   "euclid, euclid:<dim>, lp:<p>[:dim], polyhedral:...")
    p.add_argument("--energy", default="reshetnyak")
    p.add_argument("--boundary", default="square", help="'square', 'circle', "
                   "or a file with one point per line (closed polygon)")
    p.add_argument("--mesh-level", type=int, default=3)
    p.add_argument("--seed", type=int, default=None,
                   help="jitter the initial map with this seed")
    p.add_argument("--budget", type=int, default=2000,
                   help="optimizer iteration budget per smoothing stage")
    p.add_argument("--svg", help="write the QC-colored mesh and image-mesh "
                   "figure to this path")
    p.add_argument("--json", action="store_true",
                   help="accepted for symmetry; output is always JSON")
    p.set_defaults(func=_cmd_plateau)

    p = sub.add_parser("verify", help="run the named numerical checks")
    p.add_argument("--only", help="run only checks whose name contains this")
    p.add_argument("--budget", type=float, default=1.0,
                   help="sample-count scale (1.0 = defaults)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StructureError, ValueError) as exc:
        sys.stderr.write(f"nal {args.command}: error: {exc}\n")
        return 1
    except ConvergenceError as exc:
        sys.stderr.write(f"nal {args.command}: did not converge: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
