"""Inscribed ellipses, enclosing parallelograms, and polar duals."""
import math

import numpy as np
import pytest

from nal import convex
from nal.families import random_polygon_norm, regular_hexagon_norm
from nal.norms import LinearMap2, sup_norm

SQUARE = np.array([[1.0, 1.0], [-1.0, 1.0]])
HEXAGON = regular_hexagon_norm().half_vertices()


def test_loewner_square_is_unit_disc():
    body = convex.loewner_ellipse(SQUARE)
    assert body.det == pytest.approx(1.0, abs=1e-8)
    assert body.aspect == pytest.approx(1.0, abs=1e-8)
    assert body.area == pytest.approx(math.pi, abs=1e-7)


def test_loewner_hexagon_is_inradius_disc():
    # six-fold symmetry forces a disc; the inradius is sqrt(3)/2
    body = convex.loewner_ellipse(HEXAGON)
    assert body.det == pytest.approx(0.75, abs=1e-8)
    assert body.aspect == pytest.approx(1.0, abs=1e-6)


def test_loewner_of_parallelogram_tracks_the_map():
    T = np.array([[1.7, 0.6], [-0.2, 0.9]])
    body = convex.loewner_ellipse(SQUARE @ T.T)
    assert body.det == pytest.approx(abs(np.linalg.det(T)), rel=1e-8)


def test_loewner_inscribed_and_maximal():
    rng = np.random.default_rng(2)
    for _ in range(25):
        n = random_polygon_norm(rng)
        half = n.half_vertices()
        body = convex.loewner_ellipse(half)
        # inscribed: the ellipse boundary stays inside the body
        assert np.all(n.gauge(body.boundary_points(256)) <= 1.0 + 1e-7)
        # sqrt(2) * ellipse covers the body
        assert convex.contains_scaled_ellipse(half, body,
                                              factor=math.sqrt(2.0))
        g = body.gauge(half)
        assert np.all(g >= 1.0 - 1e-7)


def test_loewner_barrier_matches_enclosing_polar_oracle():
    rng = np.random.default_rng(3)
    for _ in range(40):
        half = random_polygon_norm(rng).half_vertices()
        a = convex.loewner_ellipse(half)
        b = convex.loewner_via_mvee(half)
        assert a.det == pytest.approx(b.det, abs=1e-6)


def test_parallelogram_square_and_hexagon():
    assert convex.min_enclosing_parallelogram(SQUARE).area == pytest.approx(
        4.0, abs=1e-9)
    assert convex.min_enclosing_parallelogram(HEXAGON).area == pytest.approx(
        2.0 * math.sqrt(3.0), abs=1e-9)


def test_parallelogram_matches_rotation_grid():
    rng = np.random.default_rng(5)
    for _ in range(40):
        half = random_polygon_norm(rng).half_vertices()
        a = convex.min_enclosing_parallelogram(half).area
        b = convex.min_parallelogram_rotation_grid(half)
        assert a == pytest.approx(b, rel=1e-6)


def test_parallelogram_encloses_flush():
    rng = np.random.default_rng(7)
    for _ in range(25):
        half = random_polygon_norm(rng).half_vertices()
        par = convex.min_enclosing_parallelogram(half)
        p = np.asarray(par.p)
        q = np.asarray(par.q)
        sp = np.abs(half @ p)
        sq = np.abs(half @ q)
        assert np.all(sp <= 1.0 + 1e-9) and np.all(sq <= 1.0 + 1e-9)
        # each slab is flush against the body
        assert sp.max() == pytest.approx(1.0, abs=1e-9)
        assert sq.max() == pytest.approx(1.0, abs=1e-9)


def test_special_linear_equivariance():
    rng = np.random.default_rng(9)
    for _ in range(15):
        half = random_polygon_norm(rng).half_vertices()
        theta, t = rng.uniform(0.0, math.pi), rng.uniform(-0.6, 0.6)
        T = LinearMap2.rotation(theta).compose(
            LinearMap2.diagonal(math.exp(t), math.exp(-t))).matrix
        moved = convex._canonical_half_list(half @ T.T, strict=True)
        assert convex.loewner_ellipse(moved).det == pytest.approx(
            convex.loewner_ellipse(half).det, rel=1e-7)
        assert convex.min_enclosing_parallelogram(moved).area == pytest.approx(
            convex.min_enclosing_parallelogram(half).area, rel=1e-7)
        assert convex.polygon_area(moved) == pytest.approx(
            convex.polygon_area(half), rel=1e-9)


def test_polar_dual_involution():
    assert np.allclose(convex.polar_dual(convex.polar_dual(SQUARE)), SQUARE,
                       atol=1e-12)
    rng = np.random.default_rng(13)
    for _ in range(20):
        half = random_polygon_norm(rng).half_vertices()
        again = convex.polar_dual(convex.polar_dual(half))
        assert np.allclose(np.sort(again, axis=0), np.sort(half, axis=0),
                           atol=1e-9)


def test_polar_dual_square_is_diamond():
    dual = convex.polar_dual(SQUARE)
    assert convex.polygon_area(dual) == pytest.approx(2.0, abs=1e-12)
    assert convex.polygon_area(SQUARE) == pytest.approx(4.0, abs=1e-12)


def test_polygon_area_shoelace():
    assert convex.polygon_area(SQUARE) == pytest.approx(4.0, abs=1e-12)
    assert convex.polygon_area(HEXAGON) == pytest.approx(
        1.5 * math.sqrt(3.0), abs=1e-12)


def test_mvee_matrix_covers_points():
    rng = np.random.default_rng(17)
    pts = rng.normal(size=(40, 2))
    m = convex.mvee_matrix(pts)
    vals = np.einsum("ij,jk,ik->i", pts, m, pts)
    assert np.all(vals <= 1.0 + 1e-6)
    assert vals.max() == pytest.approx(1.0, abs=1e-5)
