"""Ideal (rigid-tendon) forward mapping from servo angles to joint angles.

Each flexion digit has one driven joint (finger MCP, thumb MP) whose angle
follows from the guide triangle: the servo pulls in ``r_j * u_j`` of tendon,
shortening the chord between the guides, and the cosine law returns the new
included angle. The remaining joints of the digit follow by tendon-length
conservation, ``R_i q_i = R_driven q_driven``. The thumb CMC is direct drive.

Functions accept scalars or arrays; vector arguments broadcast over leading
axes (``u`` of shape ``(..., 6)`` maps to ``q`` of shape ``(..., 15)``).
"""

from __future__ import annotations

import numpy as np

from .errors import GeometryInfeasible
from .geometry import (
    CMC_JOINT,
    CMC_SERVO,
    N_JOINTS,
    N_SERVOS,
    DigitGeometry,
    GuideGeometry,
    HandGeometry,
)

# Slack on the arccos argument before a configuration is declared infeasible;
# covers rounding at the exact geometric limits only.
_ACOS_SLACK = 1e-12


def _cos_included(guide: GuideGeometry, L):
    return (guide.d1**2 + guide.d2**2 - L**2) / (2.0 * guide.d1 * guide.d2)


def driven_angle_from_servo(guide: GuideGeometry, r_j: float, u_j, servo_index: int | None = None):
    """Flexion of the directly driven joint for servo angle ``u_j`` (rad).

    Raises GeometryInfeasible when the shortened chord no longer closes the
    guide triangle (over-retraction, or slack beyond ``d1 + d2``).
    """
    u = np.asarray(u_j, dtype=float)
    L = guide.L0 - r_j * u
    c = _cos_included(guide, L)
    bad = (np.abs(c) > 1.0 + _ACOS_SLACK) | (L < 0.0)
    if np.any(bad):
        worst = float(np.ravel(u)[np.argmax(np.ravel(bad))])
        raise GeometryInfeasible(
            f"u={worst:.6g} rad gives a chord outside the guide triangle "
            f"[{abs(guide.d1 - guide.d2):.6g}, {guide.d1 + guide.d2:.6g}] m",
            servo_index,
        )
    q = guide.alpha - np.arccos(np.clip(c, -1.0, 1.0))
    q = np.where(u == 0.0, 0.0, q)
    return float(q) if q.ndim == 0 else q


def servo_from_driven_angle(guide: GuideGeometry, r_j: float, q_driven, servo_index: int | None = None):
    """Exact inverse of :func:`driven_angle_from_servo` on ``0 <= q <= alpha``."""
    q = np.asarray(q_driven, dtype=float)
    if np.any((q < 0.0) | (q > guide.alpha)) or not np.all(np.isfinite(q)):
        raise GeometryInfeasible(
            f"driven angle must lie in [0, alpha={guide.alpha:.6g}] rad", servo_index
        )
    L = np.sqrt(guide.d1**2 + guide.d2**2 - 2.0 * guide.d1 * guide.d2 * np.cos(guide.alpha - q))
    u = (guide.L0 - L) / r_j
    u = np.where(q == 0.0, 0.0, u)
    return float(u) if u.ndim == 0 else u


def driven_gain_at_zero(guide: GuideGeometry, r_j: float) -> float:
    """d(q_driven)/du at u = 0, the limit of q/u used for H at zero command."""
    return guide.L0 * r_j / (guide.d1 * guide.d2 * np.sin(guide.alpha))


def coupling_gains(digit: DigitGeometry) -> np.ndarray:
    """R_driven / R_i for every joint of the digit, distal -> proximal."""
    radii = np.asarray(digit.joint_radii, dtype=float)
    return digit.driven_radius / radii


def couple_digit(digit: DigitGeometry, q_driven):
    """All joint angles of the digit (distal -> proximal) for a driven angle."""
    q = np.asarray(q_driven, dtype=float)
    return q[..., None] * coupling_gains(digit)


def forward_ideal(g: HandGeometry, u) -> np.ndarray:
    """Ideal joint angles ``q_ideal = H(u) u``, computed from the closed forms."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != N_SERVOS:
        raise ValueError(f"expected {N_SERVOS} servo angles, got shape {u.shape}")
    q = np.zeros(u.shape[:-1] + (N_JOINTS,))
    for d in g.digits:
        s = driven_angle_from_servo(d.guide, d.servo_pulley_radius, u[..., d.servo - 1], d.servo)
        q[..., [j - 1 for j in d.joints]] = couple_digit(d, s)
    q[..., CMC_JOINT - 1] = g.cmc_gain * u[..., CMC_SERVO - 1]
    return q


def sparsity_pattern(g: HandGeometry) -> np.ndarray:
    """Boolean 15x6 mask of the structurally non-zero entries of H."""
    mask = np.zeros((N_JOINTS, N_SERVOS), dtype=bool)
    for d in g.digits:
        for j in d.joints:
            mask[j - 1, d.servo - 1] = True
    mask[CMC_JOINT - 1, CMC_SERVO - 1] = True
    return mask


def assemble_H(g: HandGeometry, u) -> np.ndarray:
    """Block-sparse 15x6 mapping matrix evaluated at ``u``.

    Entries are q_i/u_j; at u_j = 0 the analytic limit gain is used so that
    H stays finite and continuous.
    """
    u = np.asarray(u, dtype=float)
    H = np.zeros((N_JOINTS, N_SERVOS))
    for d in g.digits:
        uj = u[d.servo - 1]
        if uj == 0.0:
            gain = driven_gain_at_zero(d.guide, d.servo_pulley_radius)
        else:
            gain = driven_angle_from_servo(d.guide, d.servo_pulley_radius, uj, d.servo) / uj
        H[[j - 1 for j in d.joints], d.servo - 1] = gain * coupling_gains(d)
    H[CMC_JOINT - 1, CMC_SERVO - 1] = g.cmc_gain
    return H
