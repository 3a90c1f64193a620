"""Named joint-space presets (gestures and grasp pre-shapes).

Library file format: a JSON array of
``{"name", "category", "q_d_rad": [15 numbers], "description"}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .compensation import compensated_gains
from .control import PlanResult, driven_angle_bounds, plan_to_pose
from .errors import PoseLibraryError
from .geometry import CMC_JOINT, JOINT_LABELS, N_JOINTS, HandGeometry, Workspace

CATEGORIES = ("opposition", "gesture", "digit", "power-grasp", "precision-grasp", "tool-grasp")
GESTURE_CATEGORIES = ("opposition", "gesture", "digit")
GRASP_CATEGORIES = ("power-grasp", "precision-grasp", "tool-grasp")


@dataclass(frozen=True)
class PosePreset:
    name: str
    category: str
    q_d: tuple[float, ...]
    description: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "category": self.category, "q_d_rad": list(self.q_d), "description": self.description}


def default_library_path() -> Path:
    return Path(str(resources.files("tendonhand") / "data" / "poses.json"))


def _parse_preset(raw, n: int) -> PosePreset:
    where = f"preset[{n}]"
    if not isinstance(raw, dict):
        raise PoseLibraryError(f"{where}: expected an object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise PoseLibraryError(f"{where}.name: expected a non-empty string")
    where = f"preset {name!r}"
    category = raw.get("category")
    if category not in CATEGORIES:
        raise PoseLibraryError(f"{where}.category: expected one of {list(CATEGORIES)}, got {category!r}")
    q = raw.get("q_d_rad")
    if not isinstance(q, list) or len(q) != N_JOINTS:
        raise PoseLibraryError(f"{where}.q_d_rad: expected an array of {N_JOINTS} numbers")
    for k, x in enumerate(q):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not np.isfinite(x):
            raise PoseLibraryError(f"{where}.q_d_rad[{k}]: expected a finite number")
    description = raw.get("description", "")
    if not isinstance(description, str):
        raise PoseLibraryError(f"{where}.description: expected a string")
    return PosePreset(name=name, category=category, q_d=tuple(float(x) for x in q), description=description)


def parse_pose_library(text: str) -> list[PosePreset]:
    if not text.strip():
        return []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PoseLibraryError(f"JSON parse error: {exc}") from None
    if not isinstance(doc, list):
        raise PoseLibraryError("pose library must be a JSON array")
    presets = [_parse_preset(raw, n) for n, raw in enumerate(doc)]
    seen: set[str] = set()
    for p in presets:
        if p.name in seen:
            raise PoseLibraryError(f"preset {p.name!r}: duplicate name")
        seen.add(p.name)
    return presets


def load_pose_library(path: str | Path | None = None) -> list[PosePreset]:
    path = default_library_path() if path is None else Path(path)
    return parse_pose_library(Path(path).read_text())


def save_pose_library(presets, path: str | Path) -> None:
    Path(path).write_text(json.dumps([p.to_dict() for p in presets], indent=2) + "\n")


def validate_pose(preset: PosePreset, w: Workspace) -> list[str]:
    """Workspace violations of one preset, e.g. ``"q4 (index_pip): 3 outside [0, 1.61]"``."""
    out = []
    for k, x in enumerate(preset.q_d):
        lo, hi = w.q_min[k], w.q_max[k]
        if not lo <= x <= hi:
            out.append(f"q{k + 1} ({JOINT_LABELS[k]}): {x:g} outside [{lo:g}, {hi:g}]")
    return out


def validate_library(presets, w: Workspace) -> dict[str, list[str]]:
    """Violations per preset name; presets without violations are omitted."""
    report = {}
    for p in presets:
        v = validate_pose(p, w)
        if v:
            report[p.name] = v
    return report


def find_pose(presets, name: str) -> PosePreset:
    for p in presets:
        if p.name == name:
            return p
    raise KeyError(f"no preset named {name!r}")


def resolve_pose(g: HandGeometry, preset: PosePreset) -> PlanResult:
    return plan_to_pose(g, preset.q_d)


def manifold_pose(g: HandGeometry, flexion, cmc: float = 0.0) -> np.ndarray:
    """Reachable posture from per-digit flexion fractions (thumb..pinky, 0..1).

    A fraction of 1 puts the digit at the largest driven angle whose
    compensated posture stays in the workspace.
    """
    q = np.zeros(N_JOINTS)
    for k, (d, t, f) in enumerate(zip(g.digits, g.transmission, flexion)):
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"{d.name}: flexion fraction {f} outside [0, 1]")
        s = f * driven_angle_bounds(g, k)[1]
        digit_q = s * compensated_gains(d, t)
        digit_q[-1] = s
        q[[j - 1 for j in d.joints]] = digit_q
    q[CMC_JOINT - 1] = cmc
    return q
