"""Areas, energies, and induced relationships on 2-dimensional normed
planes, with a discrete Plateau solver for disc-type surfaces.

Set NAL_THREADS to cap the BLAS/OpenMP thread pools (it seeds the
standard environment variables before numpy loads).
"""
import os as _os

_threads = _os.environ.get("NAL_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .norms import (  # noqa: E402
    ConvergenceError,
    LinearMap2,
    Norm2,
    StructureError,
    ellipse_norm,
    euclidean,
    lp_norm,
    norm_from_spec,
    polygon_norm,
    quasiconformality,
    seminorm_distance,
    sup_norm,
)
from .convex import (  # noqa: E402
    EllipseBody,
    Parallelogram,
    loewner_ellipse,
    min_enclosing_parallelogram,
    polar_dual,
    polygon_area,
)
from .areas import (  # noqa: E402
    AreaDef,
    area_from_spec,
    busemann,
    holmes_thompson,
    induced_area,
    inscribed_riemannian,
    jacobian,
    mass_star,
    mix_area,
    q_ratio,
    q_search,
)
from .energies import (  # noqa: E402
    EnergyDef,
    combo,
    comparability_constant,
    dirichlet,
    energy,
    energy_from_spec,
    reshetnyak,
)
from .families import norm_family, random_polygon_norm  # noqa: E402
from .orbit import (  # noqa: E402
    OrbitResult,
    estimate_QI,
    induced_jacobian,
    is_minimal,
    isotropy_check,
    normalizer,
    orbit_minimize,
)
from .mesh import DiscMesh, build_mesh  # noqa: E402
from .plateau import (  # noqa: E402
    BoundaryCurve,
    DiscMap,
    NormedTarget,
    circle_curve,
    compare_energy_vs_area_minimizer,
    curve_from_file,
    euclid_target,
    initial_map,
    inner_variation_test,
    lp_target,
    map_area,
    map_energy,
    minimize_area,
    minimize_energy,
    polyhedral_target,
    square_curve,
    sup_plane,
    target_from_spec,
    verify_main_lemma,
)
from .verifysuite import VerifyReport, run_checks  # noqa: E402

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "LinearMap2",
    "Norm2",
    "StructureError",
    "ellipse_norm",
    "euclidean",
    "lp_norm",
    "norm_from_spec",
    "polygon_norm",
    "quasiconformality",
    "seminorm_distance",
    "sup_norm",
    "EllipseBody",
    "Parallelogram",
    "loewner_ellipse",
    "min_enclosing_parallelogram",
    "polar_dual",
    "polygon_area",
    "AreaDef",
    "area_from_spec",
    "busemann",
    "holmes_thompson",
    "induced_area",
    "inscribed_riemannian",
    "jacobian",
    "mass_star",
    "mix_area",
    "q_ratio",
    "q_search",
    "EnergyDef",
    "combo",
    "comparability_constant",
    "dirichlet",
    "energy",
    "energy_from_spec",
    "reshetnyak",
    "norm_family",
    "random_polygon_norm",
    "OrbitResult",
    "estimate_QI",
    "induced_jacobian",
    "is_minimal",
    "isotropy_check",
    "normalizer",
    "orbit_minimize",
    "DiscMesh",
    "build_mesh",
    "BoundaryCurve",
    "DiscMap",
    "NormedTarget",
    "circle_curve",
    "compare_energy_vs_area_minimizer",
    "curve_from_file",
    "euclid_target",
    "initial_map",
    "inner_variation_test",
    "lp_target",
    "map_area",
    "map_energy",
    "minimize_area",
    "minimize_energy",
    "polyhedral_target",
    "square_curve",
    "sup_plane",
    "target_from_spec",
    "verify_main_lemma",
    "VerifyReport",
    "run_checks",
    "__version__",
]
