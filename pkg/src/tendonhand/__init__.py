"""Actuator-to-joint kinematics, elasticity compensation and sweep evaluation
for a 6-servo, 15-joint tendon-driven hand."""

from .analytic import assemble_H, couple_digit, driven_angle_from_servo, forward_ideal, servo_from_driven_angle
from .compensation import bias, build_coupling_system, forward_compensated, solve_compensated, spring_tension
from .control import clip_to_workspace, inverse_map, plan_to_pose
from .errors import FitError, GeometryConfigError, GeometryInfeasible, ManifoldError, PoseLibraryError
from .geometry import HandGeometry, default_geometry, load_geometry, save_geometry, validate_geometry

__all__ = [
    "FitError",
    "GeometryConfigError",
    "GeometryInfeasible",
    "HandGeometry",
    "ManifoldError",
    "PoseLibraryError",
    "assemble_H",
    "bias",
    "build_coupling_system",
    "clip_to_workspace",
    "couple_digit",
    "default_geometry",
    "driven_angle_from_servo",
    "forward_compensated",
    "forward_ideal",
    "inverse_map",
    "load_geometry",
    "plan_to_pose",
    "save_geometry",
    "servo_from_driven_angle",
    "solve_compensated",
    "spring_tension",
    "validate_geometry",
]
