"""Discrete Plateau problem: maps, energies, minimizers, audits."""
import math

import numpy as np
import pytest

from nal.areas import busemann, inscribed_riemannian, induced_area, jacobian
from nal.energies import dirichlet, reshetnyak
from nal.mesh import build_mesh
from nal.norms import StructureError, seminorm_distance, sup_norm
from nal.plateau import (
    BoundaryCurve,
    DiscMap,
    circle_curve,
    compare_energy_vs_area_minimizer,
    curve_from_file,
    euclid_target,
    initial_map,
    inner_variation_decrease,
    inner_variation_test,
    lp_target,
    map_area,
    map_energy,
    minimize_area,
    minimize_energy,
    mobius_points,
    polyhedral_target,
    resample,
    square_curve,
    sup_plane,
    target_from_spec,
    triangle_norm,
    triangle_norms,
    verify_main_lemma,
)
from nal.plateau import _pav, _project_monotone


@pytest.fixture(scope="module")
def mesh2():
    return build_mesh(2)


@pytest.fixture(scope="module")
def mesh3():
    return build_mesh(3)


def _linear_map(mesh, A, target=None):
    """DiscMap z -> A z with the trace polygon as its own boundary curve."""
    A = np.asarray(A, dtype=np.float64)
    curve = BoundaryCurve(mesh.vertices[mesh.boundary] @ A.T)
    params = curve.cum[: len(mesh.boundary)].copy()
    u = DiscMap(mesh, target or euclid_target(), curve,
                mesh.vertices @ A.T, params, params[mesh.anchors])
    u.validate()
    return u


# -- targets and curves ------------------------------------------------------


def test_target_specs_round_trip():
    assert sup_plane().label() == "polyhedral:1,0;0,1"
    for text in ("euclid", "euclid:3", "lp:3", "lp:2.5:3",
                 "polyhedral:1,0;0,1;0.5,0.5"):
        assert target_from_spec(text).label() == text
    assert target_from_spec("sup").label() == sup_plane().label()


def test_target_gauges():
    p = np.array([[1.0, 2.0]])
    assert sup_plane().gauge(p)[0] == pytest.approx(2.0)
    assert euclid_target().gauge(p)[0] == pytest.approx(math.sqrt(5.0))
    assert lp_target(1).gauge(p)[0] == pytest.approx(3.0)
    assert lp_target(3, dim=3).gauge([[1.0, 1.0, 1.0]])[0] == pytest.approx(
        3.0 ** (1.0 / 3.0))


def test_target_plane_norms():
    assert seminorm_distance(sup_plane().plane_norm(), sup_norm()) <= 1e-12
    with pytest.raises(StructureError):
        euclid_target(3).plane_norm()


def test_target_validation():
    with pytest.raises(StructureError):
        euclid_target(1)
    with pytest.raises(StructureError):
        polyhedral_target([[1.0, 0.0], [2.0, 0.0]])  # rank 1
    with pytest.raises(StructureError):
        lp_target(0.5)
    with pytest.raises(StructureError):
        target_from_spec("banach")
    with pytest.raises(StructureError):
        target_from_spec("lp:abc")


def test_square_curve_geometry():
    c = square_curve()
    assert c.total == pytest.approx(8.0)
    assert c.eval(0.0) == pytest.approx([1.0, 1.0])
    assert c.eval([1.0])[0] == pytest.approx([0.0, 1.0])
    assert c.eval([c.total + 1.0])[0] == pytest.approx([0.0, 1.0])
    assert c.tangent(0.0) == pytest.approx([-1.0, 0.0])
    # right-continuous at the corner
    assert c.tangent(2.0) == pytest.approx([0.0, -1.0])


def test_circle_curve_total():
    c = circle_curve(segments=720)
    assert c.total == pytest.approx(1440.0 * math.sin(math.pi / 720.0),
                                    rel=1e-12)
    r = np.linalg.norm(c.points, axis=1)
    assert np.allclose(r, 1.0, atol=1e-12)


def test_curve_from_file(tmp_path):
    path = tmp_path / "diamond.txt"
    path.write_text("1 0\n0 1\n-1 0\n0 -1\n")
    c = curve_from_file(path)
    assert c.dim == 2
    assert c.total == pytest.approx(4.0 * math.sqrt(2.0))


def test_curve_validation():
    with pytest.raises(StructureError):
        BoundaryCurve([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(StructureError):
        BoundaryCurve([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])


# -- maps ---------------------------------------------------------------------


def test_initial_map_valid(mesh2):
    u = initial_map(mesh2, sup_plane(), BoundaryCurve(
        [[1, 1], [-1, 1], [-1, -1], [1, -1]]))
    u.validate()
    assert u.images.shape == (len(mesh2.vertices), 2)
    lifted = np.diff(u.params[np.argsort(u.params)])
    assert np.all(lifted >= -1e-12)


def test_initial_map_jitter_stays_valid(mesh2):
    curve = circle_curve()
    for seed in range(5):
        u = initial_map(mesh2, euclid_target(), curve,
                        rng=np.random.default_rng(seed), jitter=0.3)
        u.validate()


def test_validate_catches_broken_maps(mesh2):
    u = initial_map(mesh2, euclid_target(), circle_curve())
    bad = u.copy()
    bad.images[mesh2.boundary[1]] += 1.0
    with pytest.raises(StructureError):
        bad.validate()
    bad2 = u.copy()
    bad2.params[mesh2.anchors[1]] += 0.5
    with pytest.raises(StructureError):
        bad2.validate()


def test_monotone_projection():
    y = np.array([0.0, 2.0, 1.0, 3.0])
    z = _pav(y.copy())
    assert np.all(np.diff(z) >= 0.0)
    assert z == pytest.approx([0.0, 1.5, 1.5, 3.0])
    # projection preserves anchors and monotonicity on the lifted cycle
    total = 8.0
    anchors = np.array([0, 2, 4])
    anchor_params = np.array([0.0, total / 3.0, 2.0 * total / 3.0])
    params = np.array([0.0, 2.2, total / 3.0, 2.1, 2.0 * total / 3.0, 7.0])
    out = _project_monotone(params, anchors, anchor_params, total)
    assert out[anchors] == pytest.approx(anchor_params)
    lifted = out.copy()
    lifted[lifted < out[0] - 1e-12] += total
    assert np.all(np.diff(lifted) >= -1e-9)


def test_mobius_points_are_disc_automorphisms():
    t = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
    circle = np.stack([np.cos(t), np.sin(t)], axis=1)
    out = mobius_points(circle, a=0.3 - 0.2j, phi=1.1)
    assert np.allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)
    inner = mobius_points(0.5 * circle, a=0.3 - 0.2j, phi=1.1)
    assert np.all(np.linalg.norm(inner, axis=1) < 1.0)


# -- exact energies and areas on linear maps ---------------------------------


def test_linear_map_energies(mesh3):
    disc = float(mesh3.signed_areas.sum())
    u = _linear_map(mesh3, np.diag([2.0, 0.5]))
    assert map_energy(u, dirichlet()) == pytest.approx(4.25 * disc, rel=1e-12)
    assert map_energy(u, reshetnyak()) == pytest.approx(4.0 * disc, rel=1e-12)
    # unit determinant: every area definition sees the disc area
    assert map_area(u, busemann()) == pytest.approx(disc, rel=1e-12)
    ident = _linear_map(mesh3, np.eye(2), target=sup_plane())
    assert map_energy(ident, dirichlet()) == pytest.approx(
        (1.0 + 2.0 / math.pi) * disc, rel=1e-12)
    assert map_energy(ident, reshetnyak()) == pytest.approx(disc, rel=1e-12)


def test_area_methods_agree(mesh3):
    u = _linear_map(mesh3, [[1.3, 0.4], [-0.2, 0.9]])
    for area in (busemann(), inscribed_riemannian()):
        a1 = map_area(u, area, method="planar")
        a2 = map_area(u, area, method="polygon")
        assert a1 == pytest.approx(a2, rel=1e-3)


def test_triangle_norm_kinds(mesh2):
    n = triangle_norm(sup_plane(), np.eye(2))
    assert seminorm_distance(n, sup_norm()) <= 1e-12
    d = triangle_norm(euclid_target(), np.array([[2.0, 0.0], [0.0, 0.0]]))
    assert d.kind == "degenerate"
    assert d.gauge(np.array([1.0, 5.0])) == pytest.approx(2.0)
    z = triangle_norm(euclid_target(), np.zeros((2, 2)))
    assert not z.is_norm
    u = _linear_map(mesh2, np.eye(2))
    assert len(triangle_norms(u)) == len(mesh2.triangles)


def test_resample_reproduces_pl_maps(mesh2):
    u = _linear_map(mesh2, [[1.2, -0.3], [0.5, 0.8]])
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.5, 0.5, (30, 2))
    want = pts @ np.array([[1.2, -0.3], [0.5, 0.8]]).T
    assert np.allclose(resample(u, pts), want, atol=1e-12)


# -- inner variations ---------------------------------------------------------


def test_inner_variation_identity_is_exact_zero(mesh2):
    u = _linear_map(mesh2, np.eye(2))
    dec, ok = inner_variation_decrease(u, dirichlet(), (0.1, 0.0), 0.2, 0.3,
                                       1.0)
    assert ok and dec == 0.0


def test_inner_variation_improves_stretched_map(mesh3):
    u = _linear_map(mesh3, np.diag([2.0, 0.5]))
    dec, ok = inner_variation_decrease(u, dirichlet(), (0.0, 0.0), 0.3,
                                       math.pi / 2.0, 2.0)
    assert ok and dec > 0.1
    rep = inner_variation_test(u, dirichlet(), trials=48, seed=1)
    assert rep.worst_decrease > 0.0
    assert rep.trials == 48
    assert rep.admissible + rep.skipped == 48


def test_inner_variation_rejects_escaping_balls(mesh2):
    u = _linear_map(mesh2, np.eye(2))
    dec, ok = inner_variation_decrease(u, dirichlet(), (0.9, 0.0), 0.2, 0.0,
                                       2.0)
    assert not ok and dec == 0.0


# -- minimization -------------------------------------------------------------


def test_minimize_euclid_circle(mesh3):
    u, info = minimize_energy(euclid_target(), circle_curve(), dirichlet(),
                              mesh3)
    assert info.converged
    assert info.iterations > 0
    # near-conformal: the energy is close to twice the inscribed area
    area = map_area(u, busemann())
    assert info.energy == pytest.approx(2.0 * area, rel=2e-2)
    rep = inner_variation_test(u, dirichlet(), trials=32, seed=0)
    assert rep.worst_decrease <= 1e-3 * rep.energy


def test_minimize_reports_non_convergence_on_tiny_budgets(mesh2):
    _, info = minimize_energy(sup_plane(), BoundaryCurve(
        [[1, 1], [-1, 1], [-1, -1], [1, -1]]), reshetnyak(), mesh2,
        maxiter=30)
    assert not info.converged


def test_main_lemma_audit_euclid(mesh3):
    u, _ = minimize_energy(euclid_target(), circle_curve(), dirichlet(),
                           mesh3)
    lem = verify_main_lemma(u, dirichlet())
    assert lem.lam == pytest.approx(0.5, abs=1e-9)
    scale = lem.lam * lem.energy
    assert lem.gap >= -1e-3 * scale
    assert lem.gap <= 5e-2 * scale
    # the conformal solution is isotropic and nearly round everywhere
    assert lem.minimal_fraction >= 0.95
    assert lem.isotropy_fraction >= 0.95
    assert lem.qc_max_all <= math.sqrt(2.0) + 5e-2
    assert lem.degenerate_weight <= 1e-9
    assert lem.mesh_level == 3


def test_main_lemma_area_matches_map_area(mesh2):
    curve = BoundaryCurve([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    u, info = minimize_energy(sup_plane(), curve, reshetnyak(), mesh2)
    assert info.converged
    lem = verify_main_lemma(u, reshetnyak())
    # the induced area of the sup energy is the inscribed-ellipse area
    planar = map_area(u, inscribed_riemannian(), method="planar")
    assert lem.area == pytest.approx(planar, rel=1e-5)
    assert lem.gap >= -1e-6 * lem.lam * lem.energy


def test_reparametrization_energy_budget(mesh3):
    u, _ = minimize_energy(euclid_target(), circle_curve(), dirichlet(),
                           mesh3)
    shrink = math.cos(math.pi / len(mesh3.boundary))
    pulled = shrink * mobius_points(mesh3.vertices, a=0.25 + 0.1j, phi=0.4)
    v = DiscMap(mesh3, u.target, u.curve, resample(u, pulled),
                u.params.copy(), u.anchor_params)
    drift = map_energy(v, dirichlet()) / map_energy(u, dirichlet()) - 1.0
    assert abs(drift) <= 5e-2


def test_minimize_area_descends_to_trace_polygon(mesh2):
    init = initial_map(mesh2, euclid_target(), circle_curve())
    ua, info = minimize_area(euclid_target(), circle_curve(), busemann(),
                             mesh2, init=init, presolve=False)
    assert info.converged
    # boundary correspondence is frozen: pure interior rearrangement
    assert np.allclose(ua.params, init.params, atol=1e-12)
    trace = ua.images[mesh2.boundary]
    shoelace = 0.5 * abs(float(
        np.sum(trace[:, 0] * np.roll(trace[:, 1], -1)
               - trace[:, 1] * np.roll(trace[:, 0], -1))))
    area = map_area(ua, busemann())
    assert area == pytest.approx(shoelace, rel=1e-9)
    # the level-2 correspondence traces a regular 12-gon
    assert shoelace == pytest.approx(6.0 * math.sin(math.pi / 6.0), rel=1e-9)


def test_compare_energy_vs_area_minimizer(mesh2):
    curve = BoundaryCurve([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    for e in (dirichlet(), reshetnyak()):
        rep = compare_energy_vs_area_minimizer(sup_plane(), curve, e, mesh2)
        assert rep.converged
        assert rep.area_area_min <= rep.area_energy_min + 1e-9
        assert 0.0 <= rep.relative <= 5e-3
        assert rep.mesh_level == 2
