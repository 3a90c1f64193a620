from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.optimize import brentq

from tendonhand.control import servo_range
from tendonhand.geometry import N_SERVOS, default_geometry

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def g():
    return default_geometry()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# independent oracles (never call the code paths they check)
# ---------------------------------------------------------------------------

def chord_oracle(d1, d2, alpha):
    """Distance between the two guide points placed explicitly in the plane."""
    p1 = np.array([d1, 0.0])
    p2 = d2 * np.array([math.cos(alpha), math.sin(alpha)])
    return float(np.linalg.norm(p1 - p2))


def driven_angle_oracle(d1, d2, alpha, r, u):
    """Rotate the second guide point until the chord shrinks by r*u; flexion = alpha - angle."""
    target = chord_oracle(d1, d2, alpha) - r * u
    p1 = np.array([d1, 0.0])

    def f(phi):
        return np.linalg.norm(p1 - d2 * np.array([math.cos(phi), math.sin(phi)])) - target

    phi = brentq(f, 0.0, math.pi, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    return alpha - phi


def fixed_point_oracle(radii_dp, path_dp, k_s, EA, q_driven, tol=1e-15, max_iter=10_000):
    """Iterate the spring/elongation deficit directly.

    radii_dp/path_dp are distal -> proximal; returns joint angles in the same
    order. Distal joints: q_i = (R_drv/R_i) q_drv - k_s * L_cum,i * sum(R q) / (EA R_i).
    """
    radii = list(radii_dp)
    n = len(radii)
    r_drv = radii[-1]
    cum = [sum(path_dp[i:]) for i in range(n - 1)]
    q = [r_drv / radii[i] * q_driven for i in range(n - 1)] + [q_driven]
    for _ in range(max_iter):
        tension = k_s * sum(R * x for R, x in zip(radii, q))
        new = [r_drv / radii[i] * q_driven - tension * cum[i] / (EA * radii[i]) for i in range(n - 1)]
        new.append(q_driven)
        if max(abs(a - b) for a, b in zip(new, q)) < tol:
            return new
        q = new
    raise RuntimeError("fixed point did not converge")


def random_servo(g, rng, n):
    """n commands drawn uniformly inside each servo's safe range."""
    lo = np.array([servo_range(g, j)[0] for j in range(1, N_SERVOS + 1)])
    hi = np.array([servo_range(g, j)[1] for j in range(1, N_SERVOS + 1)])
    return lo + rng.random((n, N_SERVOS)) * (hi - lo)
