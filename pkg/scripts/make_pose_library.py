"""Regenerate src/tendonhand/data/poses.json from the authoring table below.

Presets are illustrative: each is a per-digit flexion fraction plus a CMC
angle, placed on the compensated reachable set of the default hand.
"""

from tendonhand.geometry import DEFAULT_WORKSPACE, default_geometry
from tendonhand.poses import PosePreset, default_library_path, manifold_pose, save_pose_library

# name, category, (thumb, index, middle, ring, pinky) flexion fraction, CMC rad, description
TABLE = [
    ("thumb-index-opposition", "opposition", (0.55, 0.45, 0.0, 0.0, 0.0), 1.20, "thumb tip meets index tip"),
    ("thumb-middle-opposition", "opposition", (0.60, 0.0, 0.50, 0.0, 0.0), 1.35, "thumb tip meets middle tip"),
    ("thumb-ring-opposition", "opposition", (0.65, 0.0, 0.0, 0.55, 0.0), 1.50, "thumb tip meets ring tip"),
    ("rock", "gesture", (0.80, 0.0, 1.0, 1.0, 0.0), 1.20, "index and pinky extended, thumb over middle and ring"),
    ("thumbs-up", "gesture", (0.0, 1.0, 1.0, 1.0, 1.0), 0.0, "fingers curled, thumb extended"),
    ("call-me", "gesture", (0.0, 1.0, 1.0, 1.0, 0.0), 0.0, "thumb and pinky extended"),
    ("claw", "gesture", (0.5, 0.5, 0.5, 0.5, 0.5), 0.80, "all digits half flexed"),
    ("one", "digit", (0.85, 0.0, 1.0, 1.0, 1.0), 1.00, "index extended"),
    ("two", "digit", (0.85, 0.0, 0.0, 1.0, 1.0), 1.10, "index and middle extended"),
    ("three", "digit", (0.85, 0.0, 0.0, 0.0, 1.0), 1.20, "index, middle and ring extended"),
    ("four", "digit", (0.90, 0.0, 0.0, 0.0, 0.0), 1.40, "fingers extended, thumb folded across the palm"),
    ("six", "digit", (0.0, 1.0, 1.0, 1.0, 0.0), 0.20, "thumb and pinky extended, thumb close to the palm plane"),
    ("eight", "digit", (0.0, 0.0, 1.0, 1.0, 1.0), 0.0, "thumb and index extended"),
    ("open", "gesture", (0.0, 0.0, 0.0, 0.0, 0.0), 0.0, "full extension"),
    ("cmc-abduct", "gesture", (0.0, 0.0, 0.0, 0.0, 0.0), 1.0, "thumb CMC abducted, all else extended"),
    ("large-cylinder", "power-grasp", (0.40, 0.45, 0.45, 0.45, 0.45), 1.20, "wrap around a large bottle"),
    ("small-cylinder", "power-grasp", (0.60, 0.75, 0.75, 0.75, 0.75), 1.30, "wrap around a narrow cylinder"),
    ("sphere", "power-grasp", (0.45, 0.50, 0.50, 0.50, 0.50), 1.40, "spherical envelope"),
    ("stick-handle", "power-grasp", (0.70, 0.90, 0.90, 0.90, 0.90), 0.90, "tool handle enclosed in the fist"),
    ("disk", "power-grasp", (0.30, 0.35, 0.35, 0.35, 0.35), 1.50, "flat round object held by the rim"),
    ("hook", "power-grasp", (0.0, 0.80, 0.80, 0.80, 0.80), 0.0, "bag handle hook, thumb idle"),
    ("tripod", "precision-grasp", (0.55, 0.45, 0.45, 0.30, 0.30), 1.30, "three-finger pinch"),
    ("tip-pinch", "precision-grasp", (0.60, 0.55, 0.10, 0.10, 0.10), 1.15, "fingertip pinch of a small part"),
    ("lateral-key-pinch", "precision-grasp", (0.50, 0.85, 0.85, 0.85, 0.85), 0.20, "key pressed against the index side"),
    ("wire-pinch", "precision-grasp", (0.58, 0.52, 0.20, 0.20, 0.20), 1.20, "thin wire held with minimal force"),
    ("quadpod", "precision-grasp", (0.55, 0.45, 0.45, 0.45, 0.30), 1.40, "four-finger pinch"),
    ("scissors", "tool-grasp", (0.30, 0.30, 0.60, 0.70, 0.70), 0.90, "scissor rings on thumb and middle"),
    ("screwdriver", "tool-grasp", (0.55, 0.85, 0.85, 0.85, 0.85), 1.10, "rod-like handle with thumb along the shaft"),
    ("tape-roll", "tool-grasp", (0.35, 0.40, 0.40, 0.40, 0.40), 1.50, "ring-like object held by the outer rim"),
    ("tweezers", "tool-grasp", (0.60, 0.55, 0.55, 0.80, 0.80), 1.20, "tweezers squeezed between thumb and two fingers"),
    ("press-trigger", "tool-grasp", (0.70, 0.35, 0.90, 0.90, 0.90), 0.90, "index on a press-type trigger"),
]


def main() -> None:
    g = default_geometry()
    presets = [
        PosePreset(name, cat, tuple(float(x) for x in manifold_pose(g, flex, cmc)), desc)
        for name, cat, flex, cmc, desc in TABLE
    ]
    fist = PosePreset(
        "fist", "gesture", DEFAULT_WORKSPACE.q_max, "every joint at its admissible maximum (not reachable exactly)"
    )
    presets.insert(presets.index(next(p for p in presets if p.name == "cmc-abduct")) + 1, fist)
    save_pose_library(presets, default_library_path())
    print(f"wrote {len(presets)} presets to {default_library_path()}")


if __name__ == "__main__":
    main()
