"""Spring counter-tension and tendon elasticity compensation.

The return spring loads the tendon with ``T = k_s * sum(R_i q_i)``. Each
coupling segment stretches by ``T L / EA``, so a distal joint loses
``C_i * sum(R_m q_m)`` of rotation, where ``C_i = k_s * L_cum,i / (EA R_i)``
and ``L_cum,i`` is the tendon path from the driven joint out to joint i.
Collecting the deficits gives the small linear system

    M q_comp = A q_driven,   M = I + diag(C) R^T

ordered driven joint first, then distal outward (MCP, PIP, DIP for fingers;
MP, IP for the thumb). The driven row is the unit row since the short
servo-side cable is treated as rigid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import analytic
from .errors import ManifoldError
from .geometry import (
    CMC_JOINT,
    N_JOINTS,
    N_SERVOS,
    DigitGeometry,
    HandGeometry,
    TransmissionParams,
)


@dataclass(frozen=True)
class CouplingSystem:
    """Per-digit compensation system, all arrays in driven-first order."""

    digit: str
    M: np.ndarray
    A: np.ndarray
    C: np.ndarray  # 1/m, C[0] = 0 for the driven joint
    radii: np.ndarray  # m, driven-first


def spring_tension(digit: DigitGeometry, t: TransmissionParams, q) -> float:
    """Restoring spring force (N) for joint angles ``q`` given distal -> proximal."""
    q = np.asarray(q, dtype=float)
    return t.k_s * (q @ np.asarray(digit.joint_radii, dtype=float))


def compliance_coefficients(digit: DigitGeometry, t: TransmissionParams) -> np.ndarray:
    """C_i per joint, distal -> proximal; zero for the driven joint."""
    radii = np.asarray(digit.joint_radii, dtype=float)
    paths = np.asarray(digit.path_lengths, dtype=float)
    n = len(radii)
    C = np.zeros(n)
    for i in range(n - 1):
        # tendon between the driven joint and joint i
        C[i] = t.k_s * paths[i:].sum() / (t.EA * radii[i])
    return C


def build_coupling_system(digit: DigitGeometry, t: TransmissionParams) -> CouplingSystem:
    radii = np.asarray(digit.joint_radii, dtype=float)[::-1].copy()
    C = compliance_coefficients(digit, t)[::-1].copy()
    M = np.eye(len(radii)) + np.outer(C, radii)
    A = analytic.coupling_gains(digit)[::-1].copy()
    return CouplingSystem(digit=digit.name, M=M, A=A, C=C, radii=radii)


def solve_compensated(sys: CouplingSystem, q_driven):
    """Compensated joint angles (driven-first order) for a driven angle.

    Linear in ``q_driven``; broadcasts over array input.
    """
    try:
        v = np.linalg.solve(sys.M, sys.A)
    except np.linalg.LinAlgError as exc:  # unreachable for C >= 0
        raise RuntimeError(f"coupling matrix for {sys.digit} is singular") from exc
    q = np.asarray(q_driven, dtype=float)
    out = q[..., None] * v
    # the unit first row of M makes this exact; keep it bit-exact
    out[..., 0] = q
    return out


@lru_cache(maxsize=256)
def _compensated_gains(digit: DigitGeometry, t: TransmissionParams) -> np.ndarray:
    gains = solve_compensated(build_coupling_system(digit, t), 1.0)[::-1].copy()
    gains.setflags(write=False)
    return gains


def compensated_gains(digit: DigitGeometry, t: TransmissionParams) -> np.ndarray:
    """q_comp,i / q_driven for each joint, distal -> proximal (cached)."""
    return _compensated_gains(digit, t)


def forward_compensated(g: HandGeometry, u) -> np.ndarray:
    """Joint angles predicted with compensation, ``q_comp = H(u) u - b(q)``."""
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != N_SERVOS:
        raise ValueError(f"expected {N_SERVOS} servo angles, got shape {u.shape}")
    q = np.zeros(u.shape[:-1] + (N_JOINTS,))
    for d, t in zip(g.digits, g.transmission):
        s = analytic.driven_angle_from_servo(d.guide, d.servo_pulley_radius, u[..., d.servo - 1], d.servo)
        s = np.asarray(s)
        digit_q = s[..., None] * compensated_gains(d, t)
        digit_q[..., -1] = s
        q[..., [j - 1 for j in d.joints]] = digit_q
    # direct drive, no compensation
    q[..., CMC_JOINT - 1] = g.cmc_gain * u[..., N_SERVOS - 1]
    return q


def bias_from_driven(g: HandGeometry, driven) -> np.ndarray:
    """b for per-digit driven angles ``driven`` (5 values, thumb..pinky)."""
    driven = np.asarray(driven, dtype=float)
    b = np.zeros(driven.shape[:-1] + (N_JOINTS,))
    for k, (d, t) in enumerate(zip(g.digits, g.transmission)):
        s = driven[..., k]
        deficit = s[..., None] * (analytic.coupling_gains(d) - compensated_gains(d, t))
        deficit[..., -1] = 0.0
        b[..., [j - 1 for j in d.joints]] = deficit
    return b


def bias(g: HandGeometry, q_ideal, atol: float = 1e-9) -> np.ndarray:
    """Compensation bias ``b = q_ideal - q_comp`` for a posture on the ideal manifold.

    Raises ManifoldError naming each digit whose joints are not in the ideal
    coupling ratio (absolute tolerance ``atol`` rad).
    """
    q = np.asarray(q_ideal, dtype=float)
    if q.shape != (N_JOINTS,):
        raise ValueError(f"expected {N_JOINTS} joint angles, got shape {q.shape}")
    off = []
    driven = np.zeros(len(g.digits))
    for k, d in enumerate(g.digits):
        qd = q[[j - 1 for j in d.joints]]
        s = qd[-1]
        if np.max(np.abs(qd - s * analytic.coupling_gains(d))) > atol:
            off.append(d.name)
        driven[k] = s
    if off:
        raise ManifoldError(off)
    return bias_from_driven(g, driven)
