"""Feedforward control law: clip, add compensation bias, invert the sparse map.

Inversion is done digit by digit. A digit has one free parameter, its driven
angle ``s``; given a (possibly unreachable) target, ``s`` is the weighted
least-squares fit of ``q_target + b - A s`` with ``b`` evaluated at the
solution itself. That fixed point has the closed form

    s = sum(w A q) / sum(w A v),   v = M^-1 A  (compensated gains)

which reproduces ``s`` exactly for any reachable target and reduces to the
plain pseudo-inverse when the tendon is rigid. ``s`` is then limited to the
interval whose compensated posture stays inside the workspace, and mapped to
a servo angle through the closed-form guide inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analytic
from .compensation import bias_from_driven, compensated_gains, forward_compensated
from .errors import GeometryInfeasible
from .geometry import CMC_JOINT, CMC_SERVO, N_JOINTS, N_SERVOS, HandGeometry, Workspace


def clip_to_workspace(w: Workspace, q_d) -> np.ndarray:
    return np.clip(np.asarray(q_d, dtype=float), w.lower, w.upper)


def driven_angle_bounds(g: HandGeometry, digit_index: int) -> tuple[float, float]:
    """Range of the driven angle whose compensated posture lies in the workspace."""
    d = g.digits[digit_index]
    v = compensated_gains(d, g.transmission[digit_index])
    idx = [j - 1 for j in d.joints]
    lo_q, hi_q = g.workspace.lower[idx], g.workspace.upper[idx]
    pos = v > 0
    s_lo = max(0.0, float(np.max(lo_q[pos] / v[pos], initial=0.0)))
    s_hi = float(np.min(hi_q[pos] / v[pos]))
    if s_lo > s_hi:
        raise GeometryInfeasible(f"no posture of the {d.name} fits inside the workspace", d.servo)
    return s_lo, s_hi


def servo_range(g: HandGeometry, servo: int) -> tuple[float, float]:
    """Safe (workspace-respecting) command interval for a 1-based servo index."""
    if servo == CMC_SERVO:
        k = CMC_JOINT - 1
        return g.workspace.q_min[k] / g.cmc_gain, g.workspace.q_max[k] / g.cmc_gain
    k = servo - 1
    d = g.digits[k]
    s_lo, s_hi = driven_angle_bounds(g, k)
    s_hi = min(s_hi, d.guide.alpha)
    return (
        analytic.servo_from_driven_angle(d.guide, d.servo_pulley_radius, s_lo, servo),
        analytic.servo_from_driven_angle(d.guide, d.servo_pulley_radius, s_hi, servo),
    )


def _least_squares_driven(g: HandGeometry, q, w) -> np.ndarray:
    """Per-digit driven angles (..., 5), before workspace limiting."""
    out = np.zeros(q.shape[:-1] + (len(g.digits),))
    for k, (d, t) in enumerate(zip(g.digits, g.transmission)):
        idx = [j - 1 for j in d.joints]
        A = analytic.coupling_gains(d)
        v = compensated_gains(d, t)
        wk = w[..., idx]
        num = np.sum(wk * A * q[..., idx], axis=-1)
        den = np.sum(wk * A * v, axis=-1)
        safe = den > 0
        # all-zero weights: full extension
        out[..., k] = np.where(safe, num / np.where(safe, den, 1.0), 0.0)
    return out


def _servo_commands(g: HandGeometry, q, weights) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != N_JOINTS:
        raise ValueError(f"expected {N_JOINTS} joint angles, got shape {q.shape}")
    w = np.ones(N_JOINTS) if weights is None else np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    w = np.broadcast_to(w, q.shape)

    s = _least_squares_driven(g, q, w)
    u = np.zeros(q.shape[:-1] + (N_SERVOS,))
    for k, d in enumerate(g.digits):
        s_lo, s_hi = driven_angle_bounds(g, k)
        sk = np.clip(s[..., k], s_lo, s_hi)
        if np.any(sk > d.guide.alpha):
            raise GeometryInfeasible(
                f"required driven angle exceeds the geometric limit alpha={d.guide.alpha:.6g} rad", d.servo
            )
        s[..., k] = sk
        u[..., d.servo - 1] = analytic.servo_from_driven_angle(d.guide, d.servo_pulley_radius, sk, d.servo)
    u[..., CMC_SERVO - 1] = q[..., CMC_JOINT - 1] / g.cmc_gain
    return u, s


def inverse_map(g: HandGeometry, q_target, weights=None) -> np.ndarray:
    """Servo command ``u* = H^+(q + b(q))`` for a clipped target posture.

    ``weights`` (15 non-negative values, default ones) weight each joint in
    the per-digit least-squares fit. Broadcasts over leading axes.
    """
    u, _ = _servo_commands(g, q_target, weights)
    return u


def target_bias(g: HandGeometry, q_target, weights=None) -> np.ndarray:
    """The bias b(q) the control law adds to ``q_target``."""
    _, s = _servo_commands(g, q_target, weights)
    return bias_from_driven(g, s)


@dataclass(frozen=True)
class PlanResult:
    target: np.ndarray  # q_d as requested
    clipped: np.ndarray  # q~_d
    u: np.ndarray
    achieved: np.ndarray  # model (compensated) posture under u
    residual: np.ndarray  # clipped - achieved

    @property
    def clipped_joints(self) -> list[int]:
        """1-based labels of joints whose target was clipped (1-D plans only)."""
        return [int(k) + 1 for k in np.flatnonzero(self.target != self.clipped)]


def plan_to_pose(g: HandGeometry, pose, weights=None) -> PlanResult:
    q_d = np.asarray(pose, dtype=float)
    q_clip = clip_to_workspace(g.workspace, q_d)
    u = inverse_map(g, q_clip, weights)
    achieved = forward_compensated(g, u)
    return PlanResult(target=q_d, clipped=q_clip, u=u, achieved=achieved, residual=q_clip - achieved)
