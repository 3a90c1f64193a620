"""Command-line interface: ``tendonhand <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 validation failure, 3 infeasible
geometry. Angles are radians unless ``--deg`` is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analytic import forward_ideal
from .compensation import forward_compensated
from .control import plan_to_pose
from .errors import FitError, GeometryConfigError, GeometryInfeasible, PoseLibraryError
from .geometry import (
    JOINT_LABELS,
    N_JOINTS,
    N_SERVOS,
    default_config_path,
    load_geometry,
    save_geometry,
    validate_geometry,
)
from .plant import (
    DEFAULT_K,
    FIT_JOINT,
    PlantConfig,
    compute_report,
    digit_joints,
    fit_default_params,
    index_dip_ideal_mae,
    read_sweep_csv,
    residuals_to_csv,
    run_sweep,
    sweep_to_csv,
)
from .poses import find_pose, load_pose_library, resolve_pose

CONFIG_ENV = "TENDONHAND_CONFIG"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str, n: int, what: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"{what}: could not parse {text!r} as comma-separated numbers") from None
    if len(vals) != n:
        raise UsageError(f"{what}: expected {n} values, got {len(vals)}")
    return np.asarray(vals)


def _angle_in(x, deg: bool):
    return np.radians(x) if deg else x


def _angle_out(x, deg: bool):
    return np.degrees(x) if deg else x


def _emit_vector(name: str, labels, values, fmt: str, unit: str, out) -> None:
    values = [float(v) for v in values]
    if fmt == "json":
        out.write(json.dumps({f"{name}_{unit}": values}) + "\n")
    elif fmt == "csv":
        out.write(f"index,label,{name}_{unit}\n")
        for k, (lab, v) in enumerate(zip(labels, values), start=1):
            out.write(f"{k},{lab},{v!r}\n")
    else:
        for k, (lab, v) in enumerate(zip(labels, values), start=1):
            out.write(f"{name}{k:<3d} {lab:<12s} {v: .9f} {unit}\n")


SERVO_LABELS = ("thumb_flex", "index", "middle", "ring", "pinky", "thumb_cmc")


def _config_path(args) -> Path:
    if args.config:
        return Path(args.config)
    env = os.environ.get(CONFIG_ENV)
    return Path(env) if env else default_config_path()


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_fk(args, out) -> int:
    g = load_geometry(_config_path(args))
    u = _angle_in(_floats(args.u, N_SERVOS, "--u"), args.deg)
    q = forward_ideal(g, u) if args.model == "ideal" else forward_compensated(g, u)
    unit = "deg" if args.deg else "rad"
    _emit_vector("q", JOINT_LABELS, _angle_out(q, args.deg), args.format, unit, out)
    return EXIT_OK


def cmd_ik(args, out) -> int:
    g = load_geometry(_config_path(args))
    if (args.q is None) == (args.name is None):
        raise UsageError("ik: give exactly one of --q or --name (with optional --pose-file)")
    if args.q is not None:
        q_d = _angle_in(_floats(args.q, N_JOINTS, "--q"), args.deg)
    else:
        q_d = np.asarray(find_pose(load_pose_library(args.pose_file), args.name).q_d)
    weights = None if args.weights is None else _floats(args.weights, N_JOINTS, "--weights")
    plan = plan_to_pose(g, q_d, weights)
    _report_plan(plan, args, out)
    return EXIT_OK


def _report_plan(plan, args, out) -> None:
    unit = "deg" if args.deg else "rad"
    clipped = plan.clipped_joints
    if args.format == "json":
        doc = {
            f"u_{unit}": [float(x) for x in _angle_out(plan.u, args.deg)],
            f"achieved_{unit}": [float(x) for x in _angle_out(plan.achieved, args.deg)],
            f"residual_{unit}": [float(x) for x in _angle_out(plan.residual, args.deg)],
            "clipped_joints": clipped,
        }
        out.write(json.dumps(doc) + "\n")
        return
    if args.format == "csv":
        out.write(f"kind,index,label,value_{unit}\n")
        for k, v in enumerate(_angle_out(plan.u, args.deg), start=1):
            out.write(f"u,{k},{SERVO_LABELS[k - 1]},{float(v)!r}\n")
        for k, (a, r) in enumerate(zip(_angle_out(plan.achieved, args.deg), _angle_out(plan.residual, args.deg)), 1):
            out.write(f"achieved,{k},{JOINT_LABELS[k - 1]},{float(a)!r}\n")
            out.write(f"residual,{k},{JOINT_LABELS[k - 1]},{float(r)!r}\n")
        return
    _emit_vector("u", SERVO_LABELS, _angle_out(plan.u, args.deg), "table", unit, out)
    out.write(f"\n{'joint':<17s} {'achieved':>13s} {'residual':>13s}\n")
    for k in range(N_JOINTS):
        a, r = _angle_out(plan.achieved[k], args.deg), _angle_out(plan.residual[k], args.deg)
        flag = "  (clipped)" if k + 1 in clipped else ""
        out.write(f"q{k + 1:<3d} {JOINT_LABELS[k]:<12s} {a: .9f} {r: .3e}{flag}\n")
    if clipped:
        out.write("clipped to workspace: " + ", ".join(f"q{j} ({JOINT_LABELS[j - 1]})" for j in clipped) + "\n")
    out.write(f"max |residual| = {float(np.max(np.abs(_angle_out(plan.residual, args.deg)))):.3e} {unit}\n")


def cmd_sweep(args, out) -> int:
    g = load_geometry(_config_path(args))
    noise = math.radians(args.noise) if args.deg else args.noise
    try:
        p = PlantConfig(physics=args.plant, noise_sigma=noise, servo_lag=args.lag, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not 1 <= args.servo <= N_SERVOS:
        raise UsageError(f"--servo must be in 1..{N_SERVOS}")
    if args.k < 2:
        raise UsageError("--k must be at least 2")
    text = sweep_to_csv(run_sweep(g, p, args.servo, args.k))
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_report(args, out) -> int:
    rec = read_sweep_csv(args.csv)
    joints = digit_joints(rec.servo_index) if args.all_joints else None
    rep = compute_report(rec, joints)
    if args.residuals:
        Path(args.residuals).write_text(residuals_to_csv(rep))
    if args.format == "json":
        out.write(rep.to_json() + "\n")
    elif args.format == "csv":
        out.write("joint_index,label,mae_ideal_deg,mae_comp_deg,n_samples\n")
        for j in rep.joints:
            out.write(f"{j},{JOINT_LABELS[j - 1]},{rep.mae_ideal_deg[j]!r},{rep.mae_comp_deg[j]!r},{rep.n_samples}\n")
    else:
        out.write(f"servo u{rep.servo_index}, {rep.n_samples} samples\n")
        out.write(f"{'joint':<17s} {'MAE ideal (deg)':>16s} {'MAE comp (deg)':>16s}\n")
        for j in rep.joints:
            out.write(f"q{j:<3d} {JOINT_LABELS[j - 1]:<12s} {rep.mae_ideal_deg[j]:16.4f} {rep.mae_comp_deg[j]:16.4f}\n")
    return EXIT_OK


def cmd_validate(args, out) -> int:
    from .geometry import geometry_from_dict

    path = _config_path(args)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise GeometryConfigError(f"{path}: {exc}") from None
    violations = validate_geometry(geometry_from_dict(doc))
    if args.format == "json":
        out.write(json.dumps({"config": str(path), "violations": violations}) + "\n")
    else:
        for v in violations:
            out.write(v + "\n")
        out.write(f"{len(violations)} violations\n")
    return EXIT_INVALID if violations else EXIT_OK


def cmd_pose(args, out) -> int:
    presets = load_pose_library(args.library)
    if args.action == "list":
        if args.format == "json":
            out.write(json.dumps([{"name": p.name, "category": p.category} for p in presets]) + "\n")
        else:
            for p in presets:
                out.write(f"{p.name:<26s} {p.category:<16s} {p.description}\n")
        return EXIT_OK
    if not args.name:
        raise UsageError(f"pose {args.action}: a preset name is required")
    try:
        preset = find_pose(presets, args.name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    if args.action == "show":
        unit = "deg" if args.deg else "rad"
        if args.format == "json":
            out.write(json.dumps(preset.to_dict()) + "\n")
        else:
            out.write(f"{preset.name} [{preset.category}] {preset.description}\n")
            _emit_vector("q", JOINT_LABELS, _angle_out(np.asarray(preset.q_d), args.deg), args.format, unit, out)
        return EXIT_OK
    g = load_geometry(_config_path(args))
    _report_plan(resolve_pose(g, preset), args, out)
    return EXIT_OK


def cmd_fit(args, out) -> int:
    g = load_geometry(_config_path(args))
    t = fit_default_params(args.target_mae, g, args.k)
    fitted = g.with_transmission(t)
    mae = index_dip_ideal_mae(fitted, args.k)
    if args.write:
        save_geometry(fitted, args.write)
    if args.format == "json":
        out.write(json.dumps({"k_s_n_per_m": t.k_s, "ea_n": t.EA, "verify_index_dip_mae_ideal_deg": mae}) + "\n")
    else:
        out.write(f"k_s = {t.k_s:.9g} N/m\nEA  = {t.EA:.9g} N\n")
        out.write(f"verification: ideal-model q{FIT_JOINT} ({JOINT_LABELS[FIT_JOINT - 1]}) MAE = {mae:.6f} deg\n")
        if args.write:
            out.write(f"wrote {args.write}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help=f"hand configuration JSON (default: ${CONFIG_ENV} or the shipped default)")
    common.add_argument("--format", choices=("table", "json", "csv"), default="table")
    common.add_argument("--deg", action="store_true", help="angles in degrees at the command-line boundary")

    parser = _Parser(prog="tendonhand", description="Tendon-driven hand kinematics and compensation tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fk", parents=[common], help="forward map servo angles to joint angles")
    p.add_argument("--u", required=True, help="six comma-separated servo angles")
    p.add_argument("--model", choices=("ideal", "comp"), default="comp")
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("ik", parents=[common], help="servo command for a target posture")
    p.add_argument("--q", help="15 comma-separated target joint angles")
    p.add_argument("--pose-file", help="pose library JSON (default: shipped library)")
    p.add_argument("--name", help="preset name from the pose library")
    p.add_argument("--weights", help="15 comma-separated least-squares weights")
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("sweep", parents=[common], help="simulate a servo sweep, write CSV")
    p.add_argument("--servo", type=int, required=True)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--plant", choices=("ideal", "compensated"), default="compensated")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian measurement noise sigma")
    p.add_argument("--lag", type=float, default=0.0, help="first-order servo lag coefficient in [0, 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", parents=[common], help="MAE table and residuals from a sweep CSV")
    p.add_argument("csv")
    p.add_argument("--residuals", help="write the residual series CSV here")
    p.add_argument("--all-joints", action="store_true", help="include the driven joint")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", parents=[common], help="check a configuration file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("pose", parents=[common], help="list, show or run pose presets")
    p.add_argument("action", choices=("list", "show", "run"))
    p.add_argument("name", nargs="?")
    p.add_argument("--library", help="pose library JSON (default: shipped library)")
    p.set_defaults(func=cmd_pose)

    p = sub.add_parser("fit", parents=[common], help="fit k_s to a target ideal-model index-DIP MAE")
    p.add_argument("--target-mae", type=float, required=True, help="target MAE in degrees")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--write", help="save the fitted configuration to this path")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"tendonhand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GeometryInfeasible as exc:
        print(f"tendonhand: infeasible geometry: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GeometryConfigError, PoseLibraryError, FitError) as exc:
        print(f"tendonhand: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, ValueError) as exc:
        print(f"tendonhand: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
