"""Synthetic plant and servo-sweep evaluation harness.

The plant stands in for the physical hand plus external joint measurement:
it produces "measured" joint angles from either physics model, optionally
with a first-order servo lag and additive Gaussian noise. A sweep drives one
servo monotonically over its safe range; the report compares ideal and
compensated predictions against the measurements (angular residuals and
MAE, reported in degrees).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import bisect

from .analytic import forward_ideal
from .compensation import forward_compensated
from .control import servo_range
from .errors import FitError
from .geometry import (
    CMC_SERVO,
    DIGIT_JOINTS,
    DIGIT_NAMES,
    JOINT_LABELS,
    N_JOINTS,
    N_SERVOS,
    HandGeometry,
    TransmissionParams,
    default_geometry,
)

PHYSICS = ("ideal", "compensated")
DEFAULT_K = 100

CSV_HEADER = (
    "servo_index",
    "u_rad",
    "joint_index",
    "q_meas_rad",
    "q_ideal_rad",
    "q_comp_rad",
    "residual_ideal_deg",
    "residual_comp_deg",
)


@dataclass(frozen=True)
class PlantConfig:
    physics: str = "compensated"
    noise_sigma: float = 0.0  # rad
    servo_lag: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.physics not in PHYSICS:
            raise ValueError(f"physics must be one of {PHYSICS}, got {self.physics!r}")
        if not self.noise_sigma >= 0:
            raise ValueError("noise_sigma must be non-negative")
        if not 0 <= self.servo_lag < 1:
            raise ValueError("servo_lag must lie in [0, 1)")


def _model(g: HandGeometry, physics: str, u) -> np.ndarray:
    return forward_ideal(g, u) if physics == "ideal" else forward_compensated(g, u)


def simulate_measurement(
    g: HandGeometry, p: PlantConfig, u, rng: np.random.Generator | None = None
) -> np.ndarray:
    """One plant reading for command ``u`` (or a batch, shape (..., 6)).

    Without an explicit ``rng`` the noise stream is seeded from ``p.seed``.
    """
    q = _model(g, p.physics, u)
    if p.noise_sigma > 0:
        if rng is None:
            rng = np.random.default_rng(p.seed)
        q = q + rng.normal(0.0, p.noise_sigma, size=q.shape)
    return q


@dataclass(frozen=True)
class SweepRecord:
    servo_index: int  # 1-based
    u: np.ndarray  # (K,) commanded angle of the swept servo
    q_meas: np.ndarray  # (K, 15)
    q_ideal: np.ndarray  # (K, 15)
    q_comp: np.ndarray  # (K, 15)

    def __post_init__(self):
        if len(self.u) < 2:
            raise ValueError("a sweep needs at least two samples")
        du = np.diff(self.u)
        if not (np.all(du > 0) or np.all(du < 0)):
            raise ValueError("sweep command must be strictly monotonic")

    @property
    def n_samples(self) -> int:
        return len(self.u)


def run_sweep(g: HandGeometry, p: PlantConfig, j: int, K: int = DEFAULT_K) -> SweepRecord:
    """Sweep servo ``j`` (1-based) from 0 to its safe maximum in ``K`` steps."""
    if not 1 <= j <= N_SERVOS:
        raise ValueError(f"servo index must be in 1..{N_SERVOS}, got {j}")
    if K < 2:
        raise ValueError("K must be at least 2")
    _, u_max = servo_range(g, j)
    uj = np.linspace(0.0, u_max, K)
    U = np.zeros((K, N_SERVOS))
    U[:, j - 1] = uj

    # actual servo position trails the command
    U_act = U.copy()
    if p.servo_lag > 0:
        for k in range(1, K):
            U_act[k] = p.servo_lag * U_act[k - 1] + (1.0 - p.servo_lag) * U[k]

    # one stream per (seed, servo): sweep order never changes results
    rng = np.random.default_rng([p.seed, j])
    q_meas = simulate_measurement(g, p, U_act, rng)
    return SweepRecord(
        servo_index=j,
        u=uj,
        q_meas=q_meas,
        q_ideal=forward_ideal(g, U),
        q_comp=forward_compensated(g, U),
    )


def target_joints(servo: int) -> tuple[int, ...]:
    """Interphalangeal joints (IP, PIP, DIP) moved by a servo, 1-based."""
    if servo == CMC_SERVO:
        return ()
    return DIGIT_JOINTS[DIGIT_NAMES[servo - 1]][:-1]


def digit_joints(servo: int) -> tuple[int, ...]:
    if servo == CMC_SERVO:
        return (15,)
    return DIGIT_JOINTS[DIGIT_NAMES[servo - 1]]


@dataclass(frozen=True)
class SweepReport:
    servo_index: int
    u: np.ndarray
    residual_ideal: np.ndarray  # (K, 15) rad
    residual_comp: np.ndarray  # (K, 15) rad
    joints: tuple[int, ...]  # 1-based joints summarised below
    mae_ideal_deg: dict[int, float] = field(default_factory=dict)
    mae_comp_deg: dict[int, float] = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.u)

    def to_dict(self) -> dict:
        return {
            "servo_index": self.servo_index,
            "joints": {
                JOINT_LABELS[j - 1]: {
                    "joint_index": j,
                    "mae_ideal_deg": self.mae_ideal_deg[j],
                    "mae_comp_deg": self.mae_comp_deg[j],
                    "n_samples": self.n_samples,
                }
                for j in self.joints
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def compute_report(rec: SweepRecord, joints=None) -> SweepReport:
    """Residuals ``q_meas - q_model`` and per-joint MAE for both models.

    ``joints`` defaults to the interphalangeal joints of the swept digit.
    """
    joints = target_joints(rec.servo_index) if joints is None else tuple(joints)
    r_ideal = rec.q_meas - rec.q_ideal
    r_comp = rec.q_meas - rec.q_comp
    mae_i = {j: math.degrees(float(np.mean(np.abs(r_ideal[:, j - 1])))) for j in joints}
    mae_c = {j: math.degrees(float(np.mean(np.abs(r_comp[:, j - 1])))) for j in joints}
    return SweepReport(
        servo_index=rec.servo_index,
        u=rec.u,
        residual_ideal=r_ideal,
        residual_comp=r_comp,
        joints=joints,
        mae_ideal_deg=mae_i,
        mae_comp_deg=mae_c,
    )


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def sweep_to_csv(rec: SweepRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for k in range(rec.n_samples):
        for j in range(N_JOINTS):
            qm, qi, qc = rec.q_meas[k, j], rec.q_ideal[k, j], rec.q_comp[k, j]
            w.writerow(
                [
                    rec.servo_index,
                    repr(float(rec.u[k])),
                    j + 1,
                    repr(float(qm)),
                    repr(float(qi)),
                    repr(float(qc)),
                    repr(math.degrees(qm - qi)),
                    repr(math.degrees(qm - qc)),
                ]
            )
    return buf.getvalue()


def write_sweep_csv(rec: SweepRecord, path: str | Path) -> None:
    Path(path).write_text(sweep_to_csv(rec))


def read_sweep_csv(path: str | Path) -> SweepRecord:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no samples")
    servos = {int(r["servo_index"]) for r in rows}
    if len(servos) != 1:
        raise ValueError(f"{path}: expected a single swept servo, found {sorted(servos)}")
    if len(rows) % N_JOINTS:
        raise ValueError(f"{path}: row count {len(rows)} is not a multiple of {N_JOINTS}")
    K = len(rows) // N_JOINTS
    u = np.zeros(K)
    q = np.zeros((3, K, N_JOINTS))
    for n, r in enumerate(rows):
        k, j = divmod(n, N_JOINTS)
        if int(r["joint_index"]) != j + 1:
            raise ValueError(f"{path}: row {n + 2} has joint_index {r['joint_index']}, expected {j + 1}")
        u[k] = float(r["u_rad"])
        q[0, k, j] = float(r["q_meas_rad"])
        q[1, k, j] = float(r["q_ideal_rad"])
        q[2, k, j] = float(r["q_comp_rad"])
    return SweepRecord(servo_index=servos.pop(), u=u, q_meas=q[0], q_ideal=q[1], q_comp=q[2])


def residuals_to_csv(rep: SweepReport) -> str:
    """Residual series of the reported joints (one row per sample and joint)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["servo_index", "u_rad", "joint_index", "residual_ideal_deg", "residual_comp_deg"])
    for k in range(rep.n_samples):
        for j in rep.joints:
            w.writerow(
                [
                    rep.servo_index,
                    repr(float(rep.u[k])),
                    j,
                    repr(math.degrees(rep.residual_ideal[k, j - 1])),
                    repr(math.degrees(rep.residual_comp[k, j - 1])),
                ]
            )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Parameter fit
# ---------------------------------------------------------------------------

FIT_SERVO = 2  # index finger
FIT_JOINT = 3  # index DIP


def index_dip_ideal_mae(g: HandGeometry, K: int = DEFAULT_K) -> float:
    """Ideal-model index-DIP MAE (deg) on a noise-free compensated-plant sweep."""
    rec = run_sweep(g, PlantConfig(physics="compensated"), FIT_SERVO, K)
    return compute_report(rec, joints=(FIT_JOINT,)).mae_ideal_deg[FIT_JOINT]


def fit_default_params(
    target_mae_deg: float,
    g: HandGeometry | None = None,
    K: int = DEFAULT_K,
    max_ratio: float = 2.0,
) -> TransmissionParams:
    """Spring stiffness reproducing a target ideal-model index-DIP MAE.

    Only the ratio k_s/EA enters the model; EA is kept from the index digit
    of ``g`` and k_s is found by bisection on k_s/EA in [0, max_ratio] (1/m).
    The result applies to every digit.
    """
    if g is None:
        g = default_geometry()
    if not target_mae_deg >= 0:
        raise FitError(f"target MAE must be non-negative, got {target_mae_deg}")
    EA = g.transmission_for("index").EA
    if target_mae_deg == 0:
        return TransmissionParams(k_s=0.0, EA=EA)

    def gap(k_s: float) -> float:
        return index_dip_ideal_mae(g.with_transmission(TransmissionParams(k_s, EA)), K) - target_mae_deg

    k_s_max = max_ratio * EA
    hi_gap = gap(k_s_max)
    if hi_gap < 0:
        raise FitError(
            f"target {target_mae_deg:.4g} deg unreachable: k_s <= {k_s_max:g} N/m (EA={EA:g} N) "
            f"gives at most {hi_gap + target_mae_deg:.4g} deg"
        )
    k_s = bisect(gap, 0.0, k_s_max, xtol=1e-12, rtol=1e-12, maxiter=200)
    fitted = TransmissionParams(k_s=float(k_s), EA=EA)
    achieved = gap(fitted.k_s) + target_mae_deg
    if abs(achieved - target_mae_deg) > 0.01 * target_mae_deg:
        raise FitError(f"fit did not converge: achieved {achieved:.6g} deg for target {target_mae_deg:.6g} deg")
    return fitted
