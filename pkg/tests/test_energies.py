"""Quadratic energies: closed forms against quadrature, axioms, specs."""
import math

import numpy as np
import pytest

from nal.energies import (
    circle_average_sq,
    combo,
    comparability_constant,
    dirichlet,
    energy,
    energy_from_spec,
    properness_constant,
    reshetnyak,
    sup_sq,
)
from nal.areas import busemann, jacobian
from nal.families import random_polygon_norm
from nal.norms import (
    LinearMap2,
    StructureError,
    degenerate_norm,
    ellipse_norm,
    euclidean,
    lp_norm,
    sup_norm,
    zero_seminorm,
)

# circle average 2 and squared sup 1 on the round norm; 1 + 2/pi and 1 on
# the square ball; 2 + 4/pi and 2 on the diamond
FROZEN = (
    (euclidean(), 2.0, 1.0),
    (sup_norm(), 1.0 + 2.0 / math.pi, 1.0),
    (lp_norm(1), 2.0 + 4.0 / math.pi, 2.0),
)


def _circle_samples(count=1 << 17):
    t = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
    return np.stack([np.cos(t), np.sin(t)], axis=1)


@pytest.mark.parametrize("n,avg,sup", FROZEN,
                         ids=("euclid", "square", "diamond"))
def test_frozen_values(n, avg, sup):
    assert energy(dirichlet(), n) == pytest.approx(avg, abs=1e-12)
    assert energy(reshetnyak(), n) == pytest.approx(sup, abs=1e-12)


def test_closed_forms_match_quadrature():
    dirs = _circle_samples()
    rng = np.random.default_rng(11)
    zoo = [random_polygon_norm(rng) for _ in range(6)]
    zoo += [ellipse_norm(3.0, 0.7, 1.2), lp_norm(3), lp_norm(1.5)]
    for n in zoo:
        g = n.gauge(dirs)
        assert circle_average_sq(n) == pytest.approx(
            2.0 * float(np.mean(g ** 2)), abs=1e-8)
        assert sup_sq(n) == pytest.approx(float(np.max(g)) ** 2, abs=1e-8)


def test_rotation_invariant():
    rng = np.random.default_rng(13)
    for _ in range(5):
        n = random_polygon_norm(rng)
        R = LinearMap2.rotation(rng.uniform(0.0, math.pi))
        for e in (dirichlet(), reshetnyak()):
            assert energy(e, n.compose(R)) == pytest.approx(
                energy(e, n), rel=1e-12)


def test_not_linearly_invariant():
    # a special-linear stretch changes the circle average: the energies see
    # the norm itself, not just its jacobian
    T = LinearMap2.diagonal(2.0, 0.5)
    assert T.is_special
    assert energy(dirichlet(), euclidean().compose(T)) == pytest.approx(
        4.25, abs=1e-12)


def test_two_homogeneous():
    rng = np.random.default_rng(17)
    n = random_polygon_norm(rng)
    for e in (dirichlet(), reshetnyak(), combo(1.0, 2.0)):
        assert energy(e, n.scale(1.3)) == pytest.approx(
            1.69 * energy(e, n), rel=1e-12)


def test_seminorm_values():
    assert energy(dirichlet(), zero_seminorm()) == 0.0
    assert energy(reshetnyak(), zero_seminorm()) == 0.0
    d = degenerate_norm((0.6, 0.8))
    assert energy(dirichlet(), d) == pytest.approx(1.0, abs=1e-12)
    assert energy(reshetnyak(), d) == pytest.approx(1.0, abs=1e-12)


def test_combo_linearity():
    rng = np.random.default_rng(19)
    n = random_polygon_norm(rng)
    e = combo(0.4, 1.1, 0.7, busemann())
    want = (0.4 * circle_average_sq(n) + 1.1 * sup_sq(n)
            + 0.7 * jacobian(busemann(), n))
    assert energy(e, n) == pytest.approx(want, rel=1e-12)


def test_combo_validation():
    with pytest.raises(StructureError):
        combo(-1.0, 2.0)
    with pytest.raises(StructureError):
        combo(0.0, 0.0, 1.0, busemann())
    with pytest.raises(StructureError):
        combo(1.0, 0.0, 1.0)  # jacobian term without an area


def test_proper_and_comparable():
    rng = np.random.default_rng(23)
    zoo = [random_polygon_norm(rng) for _ in range(10)]
    zoo += [euclidean(), sup_norm(), ellipse_norm(9.0, 0.0, 1.0)]
    for e in (dirichlet(), reshetnyak(), combo(0.5, 0.5)):
        c0 = properness_constant(e)
        assert c0 > 0.0
        for n in zoo:
            assert energy(e, n) >= c0 * sup_sq(n) - 1e-9
    # circle average within a factor 2 of the squared sup on seminorms
    k = comparability_constant(dirichlet(), zoo)
    assert 1.0 <= k <= 2.0 + 1e-9
    assert comparability_constant(reshetnyak(), zoo) == 1.0


def test_comparability_tolerates_matching_zeros():
    assert comparability_constant(dirichlet(), [zero_seminorm()]) == 1.0


def test_energy_spec_round_trips():
    for text in ("dirichlet", "reshetnyak", "combo:1,2,0,",
                 "combo:0.5,0.5,1,busemann"):
        e = energy_from_spec(text)
        assert energy_from_spec(e.label()).label() == e.label()
    assert energy_from_spec("combo:1,2,0,").label() == "combo:1,2,0,"
    with pytest.raises(StructureError):
        energy_from_spec("sobolev")
    with pytest.raises(StructureError):
        energy_from_spec("combo:1,2")
