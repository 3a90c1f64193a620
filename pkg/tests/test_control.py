import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tendonhand.analytic import driven_angle_from_servo, forward_ideal
from tendonhand.compensation import forward_compensated
from tendonhand.control import (
    clip_to_workspace,
    driven_angle_bounds,
    inverse_map,
    plan_to_pose,
    servo_range,
    target_bias,
)
from tendonhand.geometry import DEFAULT_WORKSPACE, TransmissionParams
from tendonhand.poses import find_pose, load_pose_library

from conftest import random_servo


def _objective(s, target, b, A, w):
    return np.sum(w * (target + b - A * s) ** 2)


def test_clip():
    q = np.full(15, 0.5)
    np.testing.assert_array_equal(clip_to_workspace(DEFAULT_WORKSPACE, q), q)
    q[3] = 2.0
    q[0] = -0.3
    c = clip_to_workspace(DEFAULT_WORKSPACE, q)
    assert c[3] == 1.61
    assert c[0] == 0.0
    np.testing.assert_array_equal(clip_to_workspace(DEFAULT_WORKSPACE, c), c)


def test_zero_target_zero_command(g):
    assert np.all(inverse_map(g, np.zeros(15)) == 0.0)


def test_roundtrip_random_commands(g, rng):
    U = random_servo(g, rng, 1000)
    back = inverse_map(g, forward_compensated(g, U))
    assert np.max(np.abs(back - U)) < 1e-9


def test_roundtrip_single_call(g, rng):
    for u in random_servo(g, rng, 25):
        np.testing.assert_allclose(inverse_map(g, forward_compensated(g, u)), u, atol=1e-9, rtol=0)


def test_off_manifold_least_squares_against_grid(g):
    """index DIP = 1.0, PIP = MCP = 0: closed-form s vs a 1e6-point grid over [0, alpha]."""
    target = np.zeros(15)
    target[2] = 1.0
    u = inverse_map(g, target)
    d = g.digit("index")
    b = target_bias(g, target)[2:5]
    s_closed = driven_angle_from_servo(d.guide, d.servo_pulley_radius, u[1])
    A = np.array([1.0, 1.25, 1.0])
    w = np.ones(3)
    t = target[2:5]
    grid = np.linspace(0.0, d.guide.alpha, 1_000_000)
    vals = ((t[None, :] + b[None, :] - grid[:, None] * A[None, :]) ** 2).sum(axis=1)
    assert _objective(s_closed, t, b, A, w) == pytest.approx(vals.min(), abs=1e-6)
    assert abs(grid[np.argmin(vals)] - s_closed) < 2 * d.guide.alpha / 1e6
    # other digits untouched
    assert np.all(np.delete(u, 1) == 0.0)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_least_squares_optimality(g, data):
    """Perturbing s by +-1e-4 never lowers the objective with b held at the solution."""
    k = data.draw(st.integers(0, 4))
    d = g.digits[k]
    idx = [j - 1 for j in d.joints]
    _, s_hi = driven_angle_bounds(g, k)
    q = np.zeros(15)
    q[idx] = [data.draw(st.floats(0.05, 0.9)) * s_hi for _ in idx]
    w = np.ones(15)
    w[idx] = [data.draw(st.floats(0.1, 10.0)) for _ in idx]
    u = inverse_map(g, q, w)
    s = driven_angle_from_servo(d.guide, d.servo_pulley_radius, u[d.servo - 1])
    b = target_bias(g, q, w)[idx]
    A = np.array([d.driven_radius / r for r in d.joint_radii])
    f0 = _objective(s, q[idx], b, A, w[idx])
    for ds in (-1e-4, 1e-4):
        if 0.0 <= s + ds <= s_hi:
            assert _objective(s + ds, q[idx], b, A, w[idx]) >= f0


def test_weight_scale_invariance(g, rng):
    q = clip_to_workspace(g.workspace, rng.uniform(0, 1.6, size=15))
    w = rng.uniform(0.1, 3.0, size=15)
    np.testing.assert_allclose(inverse_map(g, q, w), inverse_map(g, q, 7.5 * w), rtol=1e-13, atol=1e-15)


def test_zero_weights_extend_digit(g):
    q = np.full(15, 0.5)
    w = np.ones(15)
    w[2:5] = 0.0
    u = inverse_map(g, q, w)
    assert u[1] == 0.0
    assert u[2] > 0


def test_negative_weights_rejected(g):
    with pytest.raises(ValueError):
        inverse_map(g, np.zeros(15), -np.ones(15))


def test_plan_reachable_pose(g, rng):
    u = random_servo(g, rng, 1)[0]
    plan = plan_to_pose(g, forward_compensated(g, u))
    assert np.max(np.abs(plan.residual)) < 1e-9
    assert plan.clipped_joints == []


def test_plan_opposition_preset(g):
    preset = find_pose(load_pose_library(), "thumb-index-opposition")
    plan = plan_to_pose(g, preset.q_d)
    assert np.all(np.isfinite(plan.u))
    assert np.all(plan.achieved >= g.workspace.lower - 1e-12)
    assert np.all(plan.achieved <= g.workspace.upper + 1e-12)


def test_plan_all_max_pose_within_sweep_range(g):
    plan = plan_to_pose(g, np.asarray(g.workspace.q_max))
    for j in range(1, 7):
        lo, hi = servo_range(g, j)
        assert lo - 1e-12 <= plan.u[j - 1] <= hi + 1e-12
    assert np.all(plan.achieved <= g.workspace.upper + 1e-12)


def test_plan_reports_clipped_joints(g):
    q = np.zeros(15)
    q[3] = 2.0
    plan = plan_to_pose(g, q)
    assert plan.clipped_joints == [4]
    assert plan.clipped[3] == 1.61


def test_workspace_safety_random(g, rng):
    Q = rng.uniform(-1.0, 3.0, size=(5000, 15))
    plan = plan_to_pose(g, Q)
    assert np.all(plan.achieved >= g.workspace.lower - 1e-12)
    assert np.all(plan.achieved <= g.workspace.upper + 1e-12)


def test_safety_holds_without_compensation(g, rng):
    # with a rigid tendon the thumb IP limit, not MP, bounds the thumb
    rigid = g.with_transmission(TransmissionParams(0.0, 800.0))
    assert driven_angle_bounds(rigid, 0)[1] == pytest.approx(0.99 / 0.8)
    Q = rng.uniform(-1.0, 3.0, size=(2000, 15))
    plan = plan_to_pose(rigid, Q)
    assert np.all(plan.achieved <= rigid.workspace.upper + 1e-12)


def test_ideal_pseudo_inverse_on_ideal_manifold(g, rng):
    """With no spring the law reduces to inverting the ideal map."""
    rigid = g.with_transmission(TransmissionParams(0.0, 800.0))
    U = random_servo(rigid, rng, 100)
    np.testing.assert_allclose(inverse_map(rigid, forward_ideal(rigid, U)), U, atol=1e-9, rtol=0)


def test_cmc_direct(g):
    q = np.zeros(15)
    q[14] = 1.0
    u = inverse_map(g, q)
    np.testing.assert_array_equal(u, [0, 0, 0, 0, 0, 1.0])
    assert math.isclose(plan_to_pose(g, q).achieved[14], 1.0)
