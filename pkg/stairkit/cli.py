"""
StairKit - Command Line
Batch evaluation, measurement, loss-weight replay, overlays, simulation,
clustering, shape plans and the HTTP service

Exit codes: 0 success, 2 input/parse error, 3 degenerate geometry,
4 insufficient data.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from stairkit import __version__
from stairkit.config import settings
from stairkit.core.dependencies import get_cluster_params, get_measure_params
from stairkit.core.errors import EXIT_INPUT, EXIT_INSUFFICIENT, EXIT_OK, InputError, StairKitError
from stairkit.core.formats import (
    format_weight_trace,
    parse_error_trace,
    read_depth,
    read_grid,
    read_labels,
    ensure_dir,
    read_rig,
    write_depth,
    write_grid,
    write_labels,
    write_rig,
    write_text,
)
from stairkit.core.fusion_kernels import backbone_shape_plan, plan_summary
from stairkit.core.geom3d import measure_pipeline
from stairkit.core.grid_model import labels_to_grid, threshold_grid
from stairkit.core.line_cluster import cluster_grid
from stairkit.core.loss_metrics import detection_metrics, weight_schedule
from stairkit.core.overlay import render_overlay
from stairkit.core.synth_scene import simulate
from stairkit.models.geometry import CameraRig, Direction
from stairkit.models.loss import LossWeights, MetricReport
from stairkit.models.scene import SceneSpec, default_rig

logger = logging.getLogger("stairkit.cli")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        write_text(out, text)
        logger.info(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _json(document) -> str:
    return json.dumps(document, indent=2) + "\n"


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def cmd_eval(args: argparse.Namespace) -> int:
    """Cell metrics per (pred, gt) pair plus the micro-averaged aggregate"""
    if len(args.pred) != len(args.gt):
        raise InputError(f"{len(args.pred)} prediction file(s) vs {len(args.gt)} label file(s)")

    conf = settings.CONF_THRESHOLD if args.conf is None else args.conf
    aggregate = MetricReport.from_counts(0, 0, 0)
    files = []
    exit_code = EXIT_OK

    for pred_path, gt_path in zip(args.pred, args.gt):
        entry = {"pred": pred_path, "gt": gt_path}
        try:
            pred = read_grid(pred_path)
            labels = read_labels(gt_path, pred.image_dims)
            gt = labels_to_grid(labels, (pred.rows, pred.cols), pred.image_dims)
            report = detection_metrics(pred, gt, conf)
        except StairKitError as e:
            logger.error(f"{pred_path} / {gt_path}: {e}")
            entry["error"] = str(e)
            exit_code = exit_code or e.exit_code
        else:
            entry["metrics"] = report.model_dump()
            aggregate = aggregate + report
        files.append(entry)

    _emit(_json({"aggregate": aggregate.model_dump(), "conf": conf, "files": files}), args.out)
    return exit_code


def cmd_measure(args: argparse.Namespace) -> int:
    """Stair direction and nearest step sizes from a grid dump, a depth map and a rig"""
    grid = read_grid(args.grid)
    depth = read_depth(args.depth)
    rig = read_rig(args.rig)
    params = get_measure_params(args.conf, args.tau, args.epsilon, args.omega, args.steps)

    measurement = measure_pipeline(grid, depth, rig, params)
    document = measurement.to_output()
    document["diagnostics"] = measurement.diagnostics
    _emit(_json(document), args.out)

    if not measurement.edge_points:
        return EXIT_INSUFFICIENT
    return EXIT_OK


def cmd_loss_sched(args: argparse.Namespace) -> int:
    """Replay the alpha/beta update over an x_error,y_error CSV"""
    try:
        text = Path(args.trace).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {args.trace}: {e.strerror}")
    trace = parse_error_trace(text)
    try:
        initial = LossWeights(alpha=args.alpha0, beta=args.beta0, sigma=args.sigma)
    except ValidationError as e:
        raise InputError(e.errors()[0]["msg"])

    history = weight_schedule(trace, initial)
    _emit(format_weight_trace(trace, history), args.out)
    return EXIT_OK


def cmd_render_overlay(args: argparse.Namespace) -> int:
    """SVG of ground-truth labels and clustered predicted lines"""
    lines = []
    image_dims = (args.width, args.height)
    if args.grid:
        grid = read_grid(args.grid)
        image_dims = grid.image_dims
        conf = settings.CONF_THRESHOLD if args.conf is None else args.conf
        lines = cluster_grid(threshold_grid(grid, conf), get_cluster_params(args.tau, args.epsilon))
    labels = read_labels(args.labels, image_dims) if args.labels else []

    _emit(render_overlay(image_dims, lines, labels), args.out)
    return EXIT_OK


def _simulation_rig(args: argparse.Namespace) -> CameraRig:
    """Default 512x512 rig with any intrinsics given on the command line"""
    rig = default_rig()
    update = {name: getattr(args, name) for name in ("fx", "fy", "cx", "cy") if getattr(args, name) is not None}
    if args.image_size is not None:
        update["image_dims"] = tuple(args.image_size)
    return CameraRig(**{**rig.model_dump(), **update})


def cmd_simulate(args: argparse.Namespace) -> int:
    """Write labels, DPTH1 depth, rig JSON, grid dump and a manifest for one synthetic scene"""
    seed = settings.SEED if args.seed is None else args.seed
    try:
        spec = SceneSpec(
            n_steps=args.n_steps,
            step_width=args.step_width,
            step_height=args.step_height,
            step_span=args.span,
            camera_position=tuple(args.camera),
            camera_attitude=(math.radians(args.pitch), math.radians(args.roll), math.radians(args.yaw)),
            direction=Direction(args.direction),
            rig=_simulation_rig(args),
            depth_noise_sigma=args.noise,
            depth_quantization=args.quantum,
            rng_seed=seed,
        )
    except ValidationError as e:
        raise InputError(f"invalid scene: {e.errors()[0]['msg']}")

    frame = simulate(spec, args.jitter, args.drop_rate)

    out = ensure_dir(args.out or ".")
    write_labels(out / "labels.txt", frame.labels)
    write_depth(out / "depth.dpth", frame.depth)
    write_rig(out / "rig.json", frame.rig)
    write_grid(out / "grid.json", frame.grid)
    manifest = {
        "scene": json.loads(spec.model_dump_json()),
        "endpoint_noise_px": args.jitter,
        "drop_rate": args.drop_rate,
        "files": {"labels": "labels.txt", "depth": "depth.dpth", "rig": "rig.json", "grid": "grid.json"},
        "truth": {"step_width": spec.step_width, "step_height": spec.step_height, "direction": spec.direction.value},
    }
    write_text(out / "manifest.json", _json(manifest))
    logger.info(f"simulated scene written to {out}")
    return EXIT_OK


def cmd_cluster(args: argparse.Namespace) -> int:
    grid = read_grid(args.grid)
    conf = settings.CONF_THRESHOLD if args.conf is None else args.conf
    lines = cluster_grid(threshold_grid(grid, conf), get_cluster_params(args.tau, args.epsilon))
    _emit(_json([line.to_dict() for line in lines]), args.out)
    return EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    """Shape-plan summaries for one or more width factors"""
    plans = []
    for factor in args.width_factor:
        plan = backbone_shape_plan(tuple(args.input_size), factor)
        summary = plan_summary(plan)
        if args.rows:
            summary["rows"] = [
                {"name": r.name, "branch": r.branch, "shape": [r.height, r.width, r.channels]} for r in plan.rows
            ]
        plans.append(summary)
    _emit(_json(plans), args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("stairkit.main:app", host=args.host, port=args.port, log_level=settings.LOG.lower())
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--conf", type=float, help="confidence threshold (default STAIRKIT_CONF_THRESHOLD)")
    common.add_argument("--tau", type=float, help="line assignment tolerance, px")
    common.add_argument("--epsilon", type=float, help="duplicate-pair tolerance, px")
    common.add_argument("--omega", type=float, help="step component filter, m")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--steps", type=int, help="nearest steps to report (default 3)")
    common.add_argument("--out", help="output path (stdout when omitted; a directory for simulate)")

    parser = argparse.ArgumentParser(prog="stairkit", description="Stair perception postprocessing toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="cell-level accuracy/recall/IoU")
    p.add_argument("--pred", nargs="+", required=True, help="predicted grid dumps")
    p.add_argument("--gt", nargs="+", required=True, help="ground-truth label files, aligned with --pred")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("measure", parents=[common], help="measure steps from grid + depth + rig")
    p.add_argument("--grid", required=True)
    p.add_argument("--depth", required=True, help="DPTH1 depth map")
    p.add_argument("--rig", required=True, help="rig JSON with gravity")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("loss-sched", parents=[common], help="replay the dynamic loss-weight schedule")
    p.add_argument("--trace", required=True, help="CSV of x_error,y_error per epoch")
    p.add_argument("--alpha0", type=float, default=10.0)
    p.add_argument("--beta0", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=0.5)
    p.set_defaults(func=cmd_loss_sched)

    p = sub.add_parser("overlay", parents=[common], help="SVG overlay of labels and clustered lines")
    p.add_argument("--grid", help="predicted grid dump")
    p.add_argument("--labels", help="ground-truth label file")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.set_defaults(func=cmd_render_overlay)

    p = sub.add_parser("simulate", parents=[common], help="write a synthetic stair frame")
    p.add_argument("--direction", choices=[d.value for d in Direction], default="ascending")
    p.add_argument("--n-steps", type=int, default=4)
    p.add_argument("--step-width", type=float, default=0.30)
    p.add_argument("--step-height", type=float, default=0.15)
    p.add_argument("--span", type=float, default=4.0)
    p.add_argument("--camera", type=float, nargs=3, default=[0.0, 1.0, -1.5], metavar=("X", "Y", "Z"))
    p.add_argument("--pitch", type=float, default=15.0, help="degrees, positive looks down")
    p.add_argument("--roll", type=float, default=0.0, help="degrees")
    p.add_argument("--yaw", type=float, default=0.0, help="degrees")
    p.add_argument("--noise", type=float, default=0.005, help="depth noise sigma, m")
    p.add_argument("--quantum", type=float, default=0.001, help="depth quantization, m")
    p.add_argument("--jitter", type=float, default=0.0, help="grid endpoint jitter, px")
    p.add_argument("--drop-rate", type=float, default=0.0)
    p.add_argument("--fx", type=float, help="focal length, px (default 460)")
    p.add_argument("--fy", type=float, help="focal length, px (default 460)")
    p.add_argument("--cx", type=float, help="principal point, px (default 256)")
    p.add_argument("--cy", type=float, help="principal point, px (default 256)")
    p.add_argument("--image-size", type=int, nargs=2, metavar=("W", "H"), help="default 512 512")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("cluster", parents=[common], help="cluster a grid dump into stair lines")
    p.add_argument("--grid", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("plan", parents=[common], help="backbone shape plan")
    p.add_argument("--input-size", type=int, nargs=2, default=[512, 512], metavar=("H", "W"))
    p.add_argument("--width-factor", type=float, nargs="+", default=[1.0, 0.5, 0.25])
    p.add_argument("--rows", action="store_true", help="include every layer row")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=settings.log_level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StairKitError as e:
        stage = f" [{e.stage}]" if e.stage else ""
        print(f"stairkit {args.command}: {type(e).__name__}{stage}: {e.message}", file=sys.stderr)
        return e.exit_code
    except ValidationError as e:
        print(f"stairkit {args.command}: invalid value: {e.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
