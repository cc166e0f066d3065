"""Gauge evaluation, canonical polygon data, and the linear action."""
import math

import numpy as np
import pytest

from nal.norms import (
    LinearMap2,
    Norm2,
    StructureError,
    degenerate_norm,
    ellipse_norm,
    euclidean,
    lp_norm,
    norm_from_spec,
    polygon_norm,
    polygon_norm_hull,
    quasiconformality,
    seminorm_distance,
    sup_norm,
    unit_vectors,
    zero_seminorm,
)

# frozen gauge values at x = (3, 4)
GAUGE_34 = {
    "euclid": 5.0,
    "sup": 4.0,
    "l1": 7.0,
    "ellipse-identity": 5.0,
}


def _samples(seed, count=64):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(count, 2)) * rng.uniform(0.2, 3.0, (count, 1))


def _norm_zoo():
    return [
        euclidean(),
        sup_norm(),
        lp_norm(1.0),
        lp_norm(3.0),
        lp_norm(1.4),
        ellipse_norm(2.0, 0.3, 1.0),
        polygon_norm([(1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0),
                      (-0.5, math.sqrt(3.0) / 2.0)]),
        polygon_norm_hull(_samples(5, 24)),
    ]


def test_frozen_gauge_values():
    x = np.array([3.0, 4.0])
    assert euclidean().gauge(x) == pytest.approx(GAUGE_34["euclid"], abs=1e-12)
    assert sup_norm().gauge(x) == pytest.approx(GAUGE_34["sup"], abs=1e-12)
    assert lp_norm(1.0).gauge(x) == pytest.approx(GAUGE_34["l1"], abs=1e-12)
    assert ellipse_norm(1.0, 0.0, 1.0).gauge(x) == pytest.approx(
        GAUGE_34["ellipse-identity"], abs=1e-12)
    assert lp_norm(3.0).gauge(np.array([1.0, 1.0])) == pytest.approx(
        2.0 ** (1.0 / 3.0), abs=1e-12)


@pytest.mark.parametrize("n", _norm_zoo(), ids=lambda n: n.kind)
def test_gauge_axioms(n):
    pts = _samples(11)
    g = n.gauge(pts)
    assert np.all(g > 0.0)
    # 1-homogeneity and central symmetry
    assert np.allclose(n.gauge(2.5 * pts), 2.5 * g, rtol=1e-12)
    assert np.allclose(n.gauge(-pts), g, rtol=1e-12)
    # subadditivity on random pairs
    q = _samples(12)
    assert np.all(n.gauge(pts + q) <= g + n.gauge(q) + 1e-9)
    # points scaled to the unit sphere have gauge 1
    assert np.allclose(n.gauge(pts / g[:, None]), 1.0, atol=1e-12)


@pytest.mark.parametrize("n", _norm_zoo(), ids=lambda n: n.kind)
def test_compose_matches_pullback(n):
    T = LinearMap2.from_matrix([[1.3, -0.4], [0.2, 0.8]])
    pts = _samples(13)
    assert np.allclose(n.compose(T).gauge(pts), n.gauge(T.apply(pts)),
                       rtol=1e-10)


@pytest.mark.parametrize("n", _norm_zoo(), ids=lambda n: n.kind)
def test_scale_multiplies_gauge(n):
    pts = _samples(17)
    assert np.allclose(n.scale(3.0).gauge(pts), 3.0 * n.gauge(pts),
                       rtol=1e-12)


def test_quasiconformality_frozen():
    assert quasiconformality(euclidean()) == pytest.approx(1.0, abs=1e-9)
    assert quasiconformality(sup_norm()) == pytest.approx(math.sqrt(2.0),
                                                          abs=1e-9)
    assert quasiconformality(lp_norm(1.0)) == pytest.approx(math.sqrt(2.0),
                                                            abs=1e-9)
    # axis ratio of the quadratic form (4, 0, 1) is 4, so qc is 2
    assert quasiconformality(ellipse_norm(4.0, 0.0, 1.0)) == pytest.approx(
        2.0, abs=1e-9)


def test_quasiconformality_rotation_invariant():
    n = polygon_norm_hull(_samples(23, 16))
    q0 = quasiconformality(n)
    for theta in (0.3, 1.1, 2.0):
        q = quasiconformality(n.compose(LinearMap2.rotation(theta)))
        assert q == pytest.approx(q0, rel=1e-6)


def test_spec_round_trip():
    for n in _norm_zoo():
        m = norm_from_spec(n.to_spec())
        assert seminorm_distance(n, m) <= 1e-9


def test_spec_parse_errors():
    for bad in ("bogus:1", "lp:0.5", "ellipse:1,0", "polygon:", ""):
        with pytest.raises((StructureError, ValueError)):
            norm_from_spec(bad)


def test_polygon_canonicalization():
    # the same body from shuffled generators gives identical data
    hexa = [(1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0),
            (-0.5, math.sqrt(3.0) / 2.0)]
    n1 = polygon_norm(hexa)
    n2 = polygon_norm_hull(np.vstack([hexa, [(-1.0, 0.0)], hexa[::-1]]))
    assert seminorm_distance(n1, n2) <= 1e-12
    assert n1.half_vertices().shape == n2.half_vertices().shape


def test_polygon_rejects_degenerate_input():
    with pytest.raises(StructureError):
        polygon_norm([(1.0, 0.0)])  # a segment has empty interior
    with pytest.raises(StructureError):
        polygon_norm_hull(np.array([[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0]]))


def test_degenerate_seminorm():
    s = degenerate_norm(np.array([1.0, 2.0]))
    assert not s.is_norm
    assert s.gauge(np.array([2.0, -1.0])) == pytest.approx(0.0, abs=1e-15)
    assert s.gauge(np.array([1.0, 2.0])) == pytest.approx(5.0, abs=1e-12)
    z = zero_seminorm()
    assert not z.is_norm
    assert z.gauge(np.array([4.0, 4.0])) == 0.0


def test_linear_map_basics():
    T = LinearMap2.from_matrix([[2.0, 1.0], [0.5, 1.0]])
    I = T.compose(T.inverse())
    assert np.allclose(I.matrix, np.eye(2), atol=1e-12)
    R = LinearMap2.rotation(0.7)
    assert R.det == pytest.approx(1.0, abs=1e-12)
    assert R.is_special
    D = LinearMap2.diagonal(2.0, 0.5)
    assert D.det == pytest.approx(1.0, abs=1e-12)
    assert T.operator_distance(T) == pytest.approx(0.0, abs=1e-15)


def test_unit_vectors():
    full = unit_vectors(8)
    half = unit_vectors(8, half=True)
    assert full.shape == (8, 2) and half.shape == (8, 2)
    assert np.allclose(np.linalg.norm(full, axis=1), 1.0, atol=1e-12)
    ang = np.arctan2(half[:, 1], half[:, 0])
    assert np.all(ang >= -1e-12) and np.all(ang < math.pi)


def test_seminorm_distance_metric():
    a, b = euclidean(), sup_norm()
    assert seminorm_distance(a, a) == pytest.approx(0.0, abs=1e-15)
    assert seminorm_distance(a, b) == pytest.approx(seminorm_distance(b, a),
                                                    abs=1e-12)
    assert seminorm_distance(a, b) > 0.2
