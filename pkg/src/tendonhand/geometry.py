"""Physical parameters of the hand and their JSON representation.

All quantities are SI: metres, radians, newtons. Joint indexing follows the
fixed 15-joint order below (1-based labels q1..q15, 0-based in arrays).

    q1  thumb IP     q6  middle DIP    q11 ring MCP
    q2  thumb MP     q7  middle PIP    q12 pinky DIP
    q3  index DIP    q8  middle MCP    q13 pinky PIP
    q4  index PIP    q9  ring DIP      q14 pinky MCP
    q5  index MCP    q10 ring PIP      q15 thumb CMC

Servo u1 flexes the thumb (IP/MP), u2..u5 flex index..pinky, u6 drives the
thumb CMC directly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .errors import GeometryConfigError

N_JOINTS = 15
N_SERVOS = 6

DIGIT_NAMES = ("thumb", "index", "middle", "ring", "pinky")

# 1-based joint labels per digit, distal -> proximal (same order as joint_radii).
DIGIT_JOINTS: dict[str, tuple[int, ...]] = {
    "thumb": (1, 2),
    "index": (3, 4, 5),
    "middle": (6, 7, 8),
    "ring": (9, 10, 11),
    "pinky": (12, 13, 14),
}
CMC_JOINT = 15
CMC_SERVO = 6

# 1-based servo driving each flexion digit.
DIGIT_SERVO: dict[str, int] = {"thumb": 1, "index": 2, "middle": 3, "ring": 4, "pinky": 5}

JOINT_LABELS = (
    "thumb_ip", "thumb_mp",
    "index_dip", "index_pip", "index_mcp",
    "middle_dip", "middle_pip", "middle_mcp",
    "ring_dip", "ring_pip", "ring_mcp",
    "pinky_dip", "pinky_pip", "pinky_mcp",
    "thumb_cmc",
)

FINGER_RATIO = (5.0, 4.0, 5.0)  # DIP:PIP:MCP radii
THUMB_RATIO = (5.0, 4.0)  # IP:MP radii

_RATIO_RTOL = 1e-9


def joint_index_map() -> dict[tuple[str, str], int]:
    """(digit, joint) -> 1-based joint label, e.g. ("index", "pip") -> 4."""
    out: dict[tuple[str, str], int] = {}
    for label, name in enumerate(JOINT_LABELS, start=1):
        digit, joint = name.split("_")
        out[(digit, joint)] = label
    return out


@dataclass(frozen=True)
class GuideGeometry:
    d1: float
    d2: float
    alpha: float

    @property
    def L0(self) -> float:
        """Initial chord length between the two tendon guides."""
        return math.sqrt(self.d1**2 + self.d2**2 - 2.0 * self.d1 * self.d2 * math.cos(self.alpha))


@dataclass(frozen=True)
class DigitGeometry:
    name: str
    joint_radii: tuple[float, ...]  # distal -> proximal
    path_lengths: tuple[float, ...]  # path_lengths[k] spans joint k and joint k+1
    guide: GuideGeometry
    servo_pulley_radius: float
    radius_ratio: tuple[float, ...]

    @property
    def n_joints(self) -> int:
        return len(self.joint_radii)

    @property
    def driven_joint_index(self) -> int:
        # MCP for fingers, MP for the thumb: always the most proximal entry.
        return len(self.joint_radii) - 1

    @property
    def driven_radius(self) -> float:
        return self.joint_radii[self.driven_joint_index]

    @property
    def joints(self) -> tuple[int, ...]:
        return DIGIT_JOINTS[self.name]

    @property
    def servo(self) -> int:
        return DIGIT_SERVO[self.name]


@dataclass(frozen=True)
class TransmissionParams:
    k_s: float  # N/m
    EA: float  # N


@dataclass(frozen=True)
class Workspace:
    q_min: tuple[float, ...]
    q_max: tuple[float, ...]

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.q_min, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.asarray(self.q_max, dtype=float)


# Admissible joint ranges in rad, q1..q15.
DEFAULT_WORKSPACE = Workspace(
    q_min=(0.0,) * N_JOINTS,
    q_max=(0.99, 1.25, 1.31, 1.61, 1.27, 1.28, 1.58, 1.24, 1.29, 1.59, 1.25, 1.25, 1.55, 1.23, 1.57),
)


@dataclass(frozen=True)
class HandGeometry:
    digits: tuple[DigitGeometry, ...]  # thumb, index, middle, ring, pinky
    transmission: tuple[TransmissionParams, ...]  # one per digit, same order
    cmc_gain: float
    workspace: Workspace

    def digit(self, name: str) -> DigitGeometry:
        return self.digits[DIGIT_NAMES.index(name)]

    def transmission_for(self, name: str) -> TransmissionParams:
        return self.transmission[DIGIT_NAMES.index(name)]

    def with_transmission(self, t: TransmissionParams) -> HandGeometry:
        """Copy with the same transmission parameters applied to every digit."""
        return replace(self, transmission=(t,) * len(self.digits))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _finite(x: Any) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def validate_geometry(g: HandGeometry) -> list[str]:
    """Return every violated invariant as ``"<field path>: <rule>"``; empty when valid."""
    v: list[str] = []
    names = tuple(d.name for d in g.digits)
    if names != DIGIT_NAMES:
        v.append(f"digits: expected digits {list(DIGIT_NAMES)} in order, got {list(names)}")
    if len(g.transmission) != len(g.digits):
        v.append(f"transmission: expected {len(g.digits)} entries, got {len(g.transmission)}")

    for i, d in enumerate(g.digits):
        p = f"digits[{i}]"
        expected_n = 2 if d.name == "thumb" else 3
        if len(d.joint_radii) != expected_n:
            v.append(f"{p}.joint_radii: expected {expected_n} radii, got {len(d.joint_radii)}")
        for k, r in enumerate(d.joint_radii):
            if not (_finite(r) and r > 0):
                v.append(f"{p}.joint_radii[{k}]: radius must be positive")
        if len(d.path_lengths) != len(d.joint_radii) - 1:
            v.append(f"{p}.path_lengths: expected {len(d.joint_radii) - 1} lengths, got {len(d.path_lengths)}")
        for k, ln in enumerate(d.path_lengths):
            if not (_finite(ln) and ln > 0):
                v.append(f"{p}.path_lengths[{k}]: path length must be positive")

        gd = d.guide
        if not (_finite(gd.d1) and gd.d1 > 0):
            v.append(f"{p}.guide.d1: d1 must be positive")
        if not (_finite(gd.d2) and gd.d2 > 0):
            v.append(f"{p}.guide.d2: d2 must be positive")
        if not (_finite(gd.alpha) and 0.0 < gd.alpha < math.pi):
            v.append(f"{p}.guide.alpha: alpha must lie in (0, pi)")
        if not (_finite(d.servo_pulley_radius) and d.servo_pulley_radius > 0):
            v.append(f"{p}.servo_pulley_radius: radius must be positive")

        if len(d.radius_ratio) != len(d.joint_radii):
            v.append(f"{p}.radius_ratio: expected {len(d.joint_radii)} entries, got {len(d.radius_ratio)}")
        elif all(_finite(x) and x > 0 for x in d.radius_ratio) and all(
            _finite(r) and r > 0 for r in d.joint_radii
        ):
            scale = [r / x for r, x in zip(d.joint_radii, d.radius_ratio)]
            if max(scale) - min(scale) > _RATIO_RTOL * max(scale):
                ratio = ":".join(f"{x:g}" for x in d.radius_ratio)
                v.append(f"{p}.joint_radii: radii do not satisfy the declared ratio {ratio}")
        else:
            v.append(f"{p}.radius_ratio: ratio entries must be positive")

        if i < len(g.transmission):
            t = g.transmission[i]
            if not (_finite(t.k_s) and t.k_s >= 0):
                v.append(f"{p}.transmission.k_s: k_s must be non-negative")
            if not (_finite(t.EA) and t.EA > 0):
                v.append(f"{p}.transmission.ea: EA must be positive")

    if not (_finite(g.cmc_gain) and g.cmc_gain > 0):
        v.append("cmc_gain: gain must be positive")

    w = g.workspace
    if len(w.q_min) != N_JOINTS or len(w.q_max) != N_JOINTS:
        v.append(f"workspace: q_min and q_max must each have {N_JOINTS} entries")
    else:
        for k, (lo, hi) in enumerate(zip(w.q_min, w.q_max)):
            if not (_finite(lo) and _finite(hi)):
                v.append(f"workspace.q{k + 1}: bounds must be finite")
            elif lo > hi:
                v.append(f"workspace.q{k + 1} ({JOINT_LABELS[k]}): q_min {lo} exceeds q_max {hi}")
    return v


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------

def _get(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise GeometryConfigError(f"{path}: expected an object")
    if key not in obj:
        raise GeometryConfigError(f"{path}.{key}: missing required field".lstrip("."))
    return obj[key]


def _num(x: Any, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise GeometryConfigError(f"{path}: expected a number")
    return float(x)


def _nums(x: Any, path: str) -> tuple[float, ...]:
    if not isinstance(x, list):
        raise GeometryConfigError(f"{path}: expected an array of numbers")
    return tuple(_num(e, f"{path}[{k}]") for k, e in enumerate(x))


def geometry_from_dict(doc: dict[str, Any]) -> HandGeometry:
    """Parse (schema-check) a configuration document without validating invariants."""
    raw_digits = _get(doc, "digits", "")
    if not isinstance(raw_digits, list):
        raise GeometryConfigError("digits: expected an array")
    digits = []
    trans = []
    for i, rd in enumerate(raw_digits):
        p = f"digits[{i}]"
        name = _get(rd, "name", p)
        if not isinstance(name, str):
            raise GeometryConfigError(f"{p}.name: expected a string")
        radii = _nums(_get(rd, "joint_radii_m", p), f"{p}.joint_radii_m")
        default_ratio = THUMB_RATIO if name == "thumb" else FINGER_RATIO
        ratio = _nums(rd["radius_ratio"], f"{p}.radius_ratio") if "radius_ratio" in rd else default_ratio
        rg = _get(rd, "guide", p)
        guide = GuideGeometry(
            d1=_num(_get(rg, "d1_m", f"{p}.guide"), f"{p}.guide.d1_m"),
            d2=_num(_get(rg, "d2_m", f"{p}.guide"), f"{p}.guide.d2_m"),
            alpha=_num(_get(rg, "alpha_rad", f"{p}.guide"), f"{p}.guide.alpha_rad"),
        )
        rt = _get(rd, "transmission", p)
        trans.append(
            TransmissionParams(
                k_s=_num(_get(rt, "k_s_n_per_m", f"{p}.transmission"), f"{p}.transmission.k_s_n_per_m"),
                EA=_num(_get(rt, "ea_n", f"{p}.transmission"), f"{p}.transmission.ea_n"),
            )
        )
        digits.append(
            DigitGeometry(
                name=name,
                joint_radii=radii,
                path_lengths=_nums(_get(rd, "path_lengths_m", p), f"{p}.path_lengths_m"),
                guide=guide,
                servo_pulley_radius=_num(_get(rd, "servo_pulley_radius_m", p), f"{p}.servo_pulley_radius_m"),
                radius_ratio=ratio,
            )
        )
    ws = _get(doc, "workspace", "")
    workspace = Workspace(
        q_min=_nums(_get(ws, "q_min_rad", "workspace"), "workspace.q_min_rad"),
        q_max=_nums(_get(ws, "q_max_rad", "workspace"), "workspace.q_max_rad"),
    )
    return HandGeometry(
        digits=tuple(digits),
        transmission=tuple(trans),
        cmc_gain=_num(doc.get("cmc_gain", 1.0), "cmc_gain"),
        workspace=workspace,
    )


def geometry_to_dict(g: HandGeometry) -> dict[str, Any]:
    digits = []
    for d, t in zip(g.digits, g.transmission):
        digits.append(
            {
                "name": d.name,
                "joint_radii_m": list(d.joint_radii),
                "radius_ratio": list(d.radius_ratio),
                "path_lengths_m": list(d.path_lengths),
                "guide": {"d1_m": d.guide.d1, "d2_m": d.guide.d2, "alpha_rad": d.guide.alpha},
                "servo_pulley_radius_m": d.servo_pulley_radius,
                "transmission": {"k_s_n_per_m": t.k_s, "ea_n": t.EA},
            }
        )
    return {
        "digits": digits,
        "cmc_gain": g.cmc_gain,
        "workspace": {"q_min_rad": list(g.workspace.q_min), "q_max_rad": list(g.workspace.q_max)},
    }


def load_geometry(path: str | Path) -> HandGeometry:
    """Load and validate a hand configuration; raises GeometryConfigError on any problem."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise GeometryConfigError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise GeometryConfigError(f"{path}: JSON parse error: {exc}") from None
    g = geometry_from_dict(doc)
    violations = validate_geometry(g)
    if violations:
        raise GeometryConfigError(violations)
    return g


def save_geometry(g: HandGeometry, path: str | Path) -> None:
    Path(path).write_text(json.dumps(geometry_to_dict(g), indent=2) + "\n")


def default_config_path() -> Path:
    return Path(str(resources.files("tendonhand") / "data" / "default_hand.json"))


def default_geometry() -> HandGeometry:
    return load_geometry(default_config_path())
