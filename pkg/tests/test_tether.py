import math

import numpy as np
import pytest

from tethersim import catenary, tether
from tethersim.environment import GRAVITY, RHO_WATER
from tethersim.errors import BadInitShape, InvalidParams, Unstable
from tethersim.tether import TetherParams


def line(n, length, direction=(1.0, 0.0, 0.0)):
    d = np.asarray(direction, float)
    return np.outer(np.linspace(0.0, length, n + 1), d / np.linalg.norm(d))


def test_default_segments():
    assert tether.default_segments(2.0) == 8
    assert tether.default_segments(10.0) == 20
    assert tether.default_segments(15.0) == 30
    assert TetherParams(10.0).segments == 20


def test_build_straight_line():
    p = TetherParams(5.0, segments=10)
    s = tether.build(p, line(10, 5.0))
    np.testing.assert_allclose(s.link_lengths, 0.5, rtol=0, atol=1e-12)
    assert np.array_equal(s.velocities, np.zeros((11, 3)))


def test_build_from_catenary_sample():
    p = TetherParams(12.0, segments=24)
    sol = catenary.solve(catenary.CatenaryProblem(10.0, -1.0, 12.0))
    pts = catenary.sample_equal_arc(sol, 24)
    pre = np.abs(np.linalg.norm(np.diff(pts, axis=0), axis=1) / p.rest_length - 1).max()
    assert pre < 0.01
    s = tether.build(p, pts)
    assert np.abs(s.link_lengths / p.rest_length - 1).max() < 1e-6
    np.testing.assert_array_equal(s.positions[0], pts[0])
    np.testing.assert_array_equal(s.positions[-1], pts[-1])


def test_build_rejects_bad_shapes():
    p = TetherParams(5.0, segments=10)
    with pytest.raises(BadInitShape):
        tether.build(p, line(9, 5.0))
    with pytest.raises(BadInitShape):
        tether.build(p, line(10, 4.0))


def test_conform_shape_fixes_slack_sample():
    p = TetherParams(10.0, segments=20)
    sol = catenary.solve(catenary.CatenaryProblem(2.0, -1.0, 10.0))
    pts = tether.conform_shape(catenary.sample_equal_arc(sol, 20), p)
    assert np.abs(np.linalg.norm(np.diff(pts, axis=0), axis=1) / p.rest_length - 1).max() < 1e-9


def test_neutral_buoyancy_gives_zero_force():
    p = TetherParams(5.0, segments=10, density=RHO_WATER)
    s = tether.build(p, line(10, 5.0))
    np.testing.assert_allclose(tether.external_forces(s, p), 0.0, atol=1e-12)


def test_heavy_cable_net_weight():
    rho_seg = 2.0 * RHO_WATER
    p = TetherParams(5.0, segments=10, density=rho_seg)
    s = tether.build(p, line(10, 5.0))
    f = tether.external_forces(s, p)
    m_s = rho_seg * 4.0 / 3.0 * math.pi * p.radius**3
    expected = -m_s * GRAVITY * (1 - RHO_WATER / rho_seg)
    np.testing.assert_allclose(f[1:-1, 2], expected, rtol=1e-12)
    np.testing.assert_allclose(f[1:-1, :2], 0.0, atol=1e-15)


def test_cross_flow_drag_per_node():
    p = TetherParams(5.0, segments=10, density=RHO_WATER)
    s = tether.build(p, line(10, 5.0))
    f = tether.external_forces(s, p, flow=np.array([0.0, 1.0, 0.0]))
    expected = 0.5 * RHO_WATER * p.drag_normal * math.pi * p.radius**2
    interior = f[1:-1, 1]
    assert np.ptp(interior) < 1e-12
    assert interior[0] == pytest.approx(expected, rel=1e-12)


def test_tangential_drag_is_small():
    p = TetherParams(5.0, segments=10, density=RHO_WATER)
    s = tether.build(p, line(10, 5.0))
    f = tether.external_forces(s, p, flow=np.array([1.0, 0.0, 0.0]))
    expected = 0.5 * RHO_WATER * p.drag_tangential * 2 * p.radius * p.rest_length
    np.testing.assert_allclose(f[1:-1, 0], expected, rtol=1e-12)


def test_straight_cable_has_no_joint_load():
    p = TetherParams(5.0, segments=10)
    s = tether.build(p, line(10, 5.0))
    assert np.array_equal(tether.joint_torques(s, p), np.zeros((11, 3)))


def hinge(theta, p):
    pts = np.array([[-p.rest_length, 0, 0], [0, 0, 0],
                    [p.rest_length * math.cos(theta), p.rest_length * math.sin(theta), 0]])
    return tether.TetherState(pts, np.zeros((3, 3)), np.ones(3), 0.0)


def test_hinge_beyond_limit_restoring_moment():
    p = TetherParams(1.0, segments=2, limit_stiffness=50.0, angle_limit=1.5)
    s = hinge(1.6, p)
    assert tether.bend_angles(s)[0] == pytest.approx(1.6)
    f = tether.joint_torques(s, p)
    moment_about_hinge = np.cross(s.positions[2] - s.positions[1], f[2])
    assert np.linalg.norm(moment_about_hinge) == pytest.approx(50.0 * 0.1, rel=1e-9)
    # the moment straightens the joint and the node forces balance
    assert moment_about_hinge[2] < 0
    np.testing.assert_allclose(f.sum(axis=0), 0.0, atol=1e-12)


def test_hinge_at_limit_has_no_penalty():
    p = TetherParams(1.0, segments=2, angle_limit=1.5)
    s = hinge(1.5, p)
    np.testing.assert_allclose(tether.joint_torques(s, p), 0.0, atol=1e-12)


def test_step_keeps_links_and_momentum_bookkeeping():
    p = TetherParams(6.0, segments=12, density=1.5 * RHO_WATER)
    sol = catenary.solve(catenary.CatenaryProblem(5.0, -1.0, 6.0))
    s = tether.build(p, catenary.sample_equal_arc(sol, 12))
    start, end = s.positions[0].copy(), s.positions[-1].copy()
    flow = np.array([0.3, 0.2, 0.0])
    dt = 0.005
    for _ in range(50):
        ext = tether.external_forces(s, p, flow)
        jnt = tether.joint_torques(s, p)
        new, coupling = tether.step(s, p, start, end, flow=flow, dt=dt)
        dp = (new.momentum() - s.momentum()) / dt
        expected = (ext[1:-1] + jnt[1:-1]).sum(axis=0) - (coupling.asv_force + coupling.auv_force)
        np.testing.assert_allclose(dp, expected, atol=1e-9)
        assert coupling.max_link_deviation < 1e-3
        s = new


def test_hanging_cable_pulls_ends_down_and_inward():
    p = TetherParams(12.0, segments=24, density=2 * RHO_WATER)
    sol = catenary.solve(catenary.CatenaryProblem(10.0, 0.0, 12.0))
    s = tether.build(p, catenary.sample_equal_arc(sol, 24))
    for _ in range(400):
        s, c = tether.step(s, p, [0, 0, 0], [10, 0, 0])
    assert c.asv_force[2] < 0 and c.auv_force[2] < 0
    assert c.asv_force[0] > 0 and c.auv_force[0] < 0
    # both ends together carry the submerged weight of the free (interior) nodes
    wet = p.sphere_mass * GRAVITY * 0.5 * (p.segments - 1)
    assert -(c.asv_force[2] + c.auv_force[2]) == pytest.approx(wet, rel=0.02)


def test_unstable_on_violent_endpoint_jump():
    p = TetherParams(5.0, segments=10)
    s = tether.build(p, line(10, 5.0))
    with pytest.raises(Unstable):
        tether.step(s, p, [0, 0, 0], [500.0, 0, 0])


def test_step_validates_dt():
    p = TetherParams(5.0, segments=10)
    s = tether.build(p, line(10, 5.0))
    with pytest.raises(InvalidParams):
        tether.step(s, p, [0, 0, 0], [5, 0, 0], dt=0.03)


def test_params_validation():
    with pytest.raises(InvalidParams):
        TetherParams(5.0, segments=1)
    with pytest.raises(InvalidParams):
        TetherParams(-1.0)
    with pytest.raises(InvalidParams):
        TetherParams(5.0, joint_damping=-0.1)


def test_matched_end_velocities_do_not_stretch_links():
    p = TetherParams(6.0, segments=12)
    sol = catenary.solve(catenary.CatenaryProblem(4.0, -1.0, 6.0))
    s = tether.build(p, catenary.sample_equal_arc(sol, 12))
    tether.match_end_velocities(s, [0, 0, -3.0], [0.2, 0, 0])
    d = np.diff(s.positions, axis=0)
    rates = np.einsum("ij,ij->i", np.diff(s.velocities, axis=0), d)
    np.testing.assert_allclose(rates, 0.0, atol=1e-9)
    np.testing.assert_array_equal(s.velocities[0], [0, 0, -3.0])
