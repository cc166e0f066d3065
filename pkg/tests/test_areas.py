"""Area definitions: jacobians, ratios to the inscribed area, searches."""
import math

import numpy as np
import pytest

from nal.areas import (
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
from nal.energies import dirichlet, reshetnyak
from nal.families import random_polygon_norm, regular_hexagon_norm
from nal.norms import (
    LinearMap2,
    StructureError,
    ellipse_norm,
    euclidean,
    lp_norm,
    sup_norm,
    zero_seminorm,
)

AREAS = (busemann(), holmes_thompson(), mass_star(), inscribed_riemannian())

# J = pi/|B|, |B*|/pi, 4/|P|, pi/|L| at the square and diamond unit balls
FROZEN = {
    ("busemann", "sup"): math.pi / 4.0,
    ("holmes-thompson", "sup"): 2.0 / math.pi,
    ("mass-star", "sup"): 1.0,
    ("inscribed", "sup"): 1.0,
    ("busemann", "l1"): math.pi / 2.0,
    ("holmes-thompson", "l1"): 4.0 / math.pi,
    ("mass-star", "l1"): 2.0,
    ("inscribed", "l1"): 2.0,
}


@pytest.mark.parametrize("area", AREAS, ids=lambda a: a.label())
def test_frozen_square_and_diamond(area):
    assert jacobian(area, sup_norm()) == pytest.approx(
        FROZEN[(area.kind, "sup")], abs=1e-7)
    assert jacobian(area, lp_norm(1)) == pytest.approx(
        FROZEN[(area.kind, "l1")], abs=1e-7)


@pytest.mark.parametrize("area", AREAS, ids=lambda a: a.label())
def test_all_agree_on_ellipse_norms(area):
    # exact sqrt(det M) path, no polygonization
    assert jacobian(area, euclidean()) == 1.0
    n = ellipse_norm(4.0, 1.0, 2.0)
    assert jacobian(area, n) == pytest.approx(math.sqrt(7.0), rel=1e-14)


def test_lp4_against_gamma_function_oracle():
    # |B_p| = 4 Gamma(1+1/p)^2 / Gamma(1+2/p); the dual of l4 is l4/3
    n = lp_norm(4)
    ball = 4.0 * math.gamma(1.25) ** 2 / math.gamma(1.5)
    dual_ball = 4.0 * math.gamma(1.75) ** 2 / math.gamma(2.5)
    assert jacobian(busemann(), n, 512) == pytest.approx(
        math.pi / ball, abs=1e-5)
    assert jacobian(holmes_thompson(), n, 512) == pytest.approx(
        dual_ball / math.pi, abs=1e-5)
    # the inscribed disc and the axis square are optimal by symmetry
    assert jacobian(mass_star(), n, 512) == pytest.approx(1.0, abs=1e-9)
    assert jacobian(inscribed_riemannian(), n, 512) == pytest.approx(
        1.0, abs=1e-8)


def test_polygonization_error_quadratic():
    n = lp_norm(4)
    exact = math.pi / (4.0 * math.gamma(1.25) ** 2 / math.gamma(1.5))
    e128 = abs(jacobian(busemann(), n, 128) - exact)
    e512 = abs(jacobian(busemann(), n, 512) - exact)
    assert e512 < e128 / 8.0


def test_two_homogeneous_in_the_norm():
    rng = np.random.default_rng(1)
    for _ in range(5):
        n = random_polygon_norm(rng)
        c = rng.uniform(0.4, 2.5)
        for area in AREAS:
            assert jacobian(area, n.scale(c)) == pytest.approx(
                c * c * jacobian(area, n), rel=1e-8)


def test_covariant_under_linear_maps():
    rng = np.random.default_rng(2)
    for _ in range(5):
        n = random_polygon_norm(rng)
        T = LinearMap2.from_matrix(rng.uniform(-1.0, 1.0, (2, 2)))
        if abs(T.det) < 0.2:
            continue
        for area in AREAS:
            assert jacobian(area, n.compose(T)) == pytest.approx(
                abs(T.det) * jacobian(area, n), rel=2e-4)


def test_zero_on_non_norms():
    assert jacobian(busemann(), zero_seminorm()) == 0.0


def test_q_ratio_witness_values():
    assert q_ratio(busemann(), sup_norm()) == pytest.approx(
        math.pi / 4.0, abs=1e-7)
    assert q_ratio(holmes_thompson(), sup_norm()) == pytest.approx(
        2.0 / math.pi, abs=1e-7)
    assert q_ratio(mass_star(), regular_hexagon_norm()) == pytest.approx(
        math.sqrt(3.0) / 2.0, abs=1e-7)


def test_q_ratio_bounds_on_random_norms():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = random_polygon_norm(rng)
        for area in AREAS:
            r = q_ratio(area, n)
            assert 0.5 - 1e-9 <= r <= 1.0 + 1e-7
    assert q_ratio(inscribed_riemannian(), random_polygon_norm(rng)) == (
        pytest.approx(1.0, abs=1e-12))


def test_q_ratio_rejects_seminorms():
    with pytest.raises(StructureError):
        q_ratio(busemann(), zero_seminorm())


def test_q_search_never_beats_the_square():
    res = q_search(busemann(), family="perturbed-square", budget=60, seed=4,
                   refine=False)
    assert res.area_label == "busemann"
    assert len(res.rows) >= 60
    assert res.best_ratio >= math.pi / 4.0 - 1e-3
    assert all(0.5 - 1e-9 <= r <= 1.0 + 1e-7 for _, r in res.rows)


def test_q_search_never_beats_the_hexagon():
    res = q_search(mass_star(), family="perturbed-hexagon", budget=60, seed=5,
                   refine=False)
    assert res.best_ratio >= math.sqrt(3.0) / 2.0 - 1e-3


def test_q_search_refine_only_improves():
    res = q_search(busemann(), family="random-polygons", budget=12, seed=6,
                   refine=True)
    assert res.refined_ratio <= res.best_ratio + 1e-12
    assert res.refined_ratio >= 0.5 - 1e-9


def test_mix_area_is_linear():
    m = mix_area([(0.3, busemann()), (0.7, mass_star())])
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = random_polygon_norm(rng)
        want = 0.3 * jacobian(busemann(), n) + 0.7 * jacobian(mass_star(), n)
        assert jacobian(m, n) == pytest.approx(want, rel=1e-12)


def test_mix_area_validates_weights():
    with pytest.raises(StructureError):
        mix_area([(0.5, busemann()), (0.6, mass_star())])
    with pytest.raises(StructureError):
        mix_area([(-0.1, busemann()), (1.1, mass_star())])
    with pytest.raises(StructureError):
        mix_area([])


def test_induced_area_wiring():
    ia = induced_area(reshetnyak())
    assert ia.label() == "induced:reshetnyak"
    assert jacobian(ia, euclidean()) == pytest.approx(1.0, abs=1e-9)
    n = ellipse_norm(4.0, 1.0, 2.0)
    assert jacobian(ia, n) == pytest.approx(math.sqrt(7.0), rel=1e-9)
    assert jacobian(induced_area(dirichlet()), euclidean()) == pytest.approx(
        1.0, abs=1e-9)


def test_area_spec_round_trips():
    for text in ("busemann", "holmes-thompson", "mass-star", "inscribed",
                 "mix:0.5,busemann;0.5,mass-star", "induced:reshetnyak"):
        assert area_from_spec(text).label() == text
    assert area_from_spec("ht").label() == "holmes-thompson"
    with pytest.raises(StructureError):
        area_from_spec("hausdorff")
