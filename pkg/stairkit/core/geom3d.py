"""
StairKit - 3D Stair Geometry
From clustered 2-D stair lines, a depth map and the gravity vector to metric
step width/height: sampling, backprojection, 3-D line fitting and the
camera -> world -> stair frame chain
"""

import logging
import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from stairkit.core.errors import (
    DegenerateGeometryError,
    DepthHoleError,
    InputError,
    InsufficientDataError,
    StairKitError,
)
from stairkit.core.grid_model import DetectionGrid, threshold_grid
from stairkit.core.line_cluster import StairLine2D, cluster_grid
from stairkit.models.geometry import (
    STANDARD_GRAVITY,
    CameraRig,
    Direction,
    MeasureParams,
    StairMeasurement,
    StepError,
    StepMeasurement,
)
from stairkit.models.grid import StairClass

logger = logging.getLogger(__name__)

SAMPLES_PER_LINE = 9
PARALLEL_EPS = 1e-9


@dataclass(frozen=True)
class Attitude:
    pitch: float
    roll: float
    yaw: float = 0.0


@dataclass(frozen=True)
class Line3DParams:
    """x = k1 z + b1, y = k2 z + b2 (camera frame)"""
    k1: float
    b1: float
    k2: float
    b2: float
    residual: float = 0.0

    def point_at(self, z: float) -> np.ndarray:
        return np.array([self.k1 * z + self.b1, self.k2 * z + self.b2, z])


@dataclass(frozen=True, eq=False)
class Line3D:
    """Centroid plus unit direction from a total least-squares fit"""
    point: np.ndarray
    direction: np.ndarray
    residual: float = 0.0


class LineSamples(NamedTuple):
    points: np.ndarray  # (9, 2) pixel points
    fallback: bool  # line did not span the vertical middle axis


# ============================================================================
# SAMPLING & BACKPROJECTION
# ============================================================================

def sample_line_points(line: StairLine2D, image_width: float) -> LineSamples:
    """
    Nine samples on y = kx + b symmetric about the vertical middle axis

    d = min(w/2 - x1, x2 - w/2) / 4 and x = w/2 + m d for m = -4..4. A line that
    does not cross the axis is sampled at 9 equal intervals over [x1, x2].
    """
    mid = image_width / 2.0
    if line.x1 < mid < line.x2:
        d = min(mid - line.x1, line.x2 - mid) / 4.0
        xs = mid + d * np.arange(-4, 5)
        fallback = False
    else:
        xs = np.linspace(line.x1, line.x2, SAMPLES_PER_LINE)
        fallback = True
    return LineSamples(np.column_stack([xs, line.k * xs + line.b]), fallback)


def backproject(pixel: Tuple[float, float], depth: float, rig: CameraRig) -> np.ndarray:
    """Pinhole backprojection of pixel (u, v) at depth z into the camera frame"""
    if not (math.isfinite(depth) and depth > 0.0):
        raise DepthHoleError(f"no valid depth at pixel {tuple(pixel)}")
    u, v = pixel
    return np.array([(u - rig.cx) * depth / rig.fx, (v - rig.cy) * depth / rig.fy, depth])


def backproject_many(pixels: np.ndarray, depths: np.ndarray, rig: CameraRig) -> np.ndarray:
    pixels = np.asarray(pixels, dtype=np.float64).reshape(-1, 2)
    z = np.asarray(depths, dtype=np.float64).reshape(-1)
    return np.column_stack([(pixels[:, 0] - rig.cx) * z / rig.fx, (pixels[:, 1] - rig.cy) * z / rig.fy, z])


def project(point: Sequence[float], rig: CameraRig) -> Tuple[float, float]:
    x, y, z = point
    if z <= 0.0:
        raise DegenerateGeometryError("point behind the camera")
    return rig.fx * x / z + rig.cx, rig.fy * y / z + rig.cy


# ============================================================================
# DEPTH LOOKUP
# ============================================================================

WINDOW_HALF_U = 2
WINDOW_HALF_V = 3
SIDE_MARGIN_PX = 0.5
INLIER_RELATIVE = 0.03
AGREE_RELATIVE = 0.02


def _window(depth: np.ndarray, us: np.ndarray, vs: np.ndarray, half_u: int, half_v: int):
    """
    Pixel coordinates and depths of the windows around rounded (u, v)

    Returns (pu, pv, z, valid), each shaped (n, 2 half_v + 1, 2 half_u + 1);
    pixels outside the image are invalid.
    """
    h, w = depth.shape
    du = np.arange(-half_u, half_u + 1)
    dv = np.arange(-half_v, half_v + 1)
    pu = np.rint(us).astype(int)[:, None, None] + du[None, None, :]
    pv = np.rint(vs).astype(int)[:, None, None] + dv[None, :, None]
    pu, pv = np.broadcast_arrays(pu, pv)
    inside = (pu >= 0) & (pu < w) & (pv >= 0) & (pv < h)
    z = np.where(inside, depth[np.clip(pv, 0, h - 1), np.clip(pu, 0, w - 1)], 0.0)
    valid = inside & np.isfinite(z) & (z > 0.0)
    return pu, pv, z, valid


def nearest_valid_depths(depth: np.ndarray, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
    """Depth of the valid pixel nearest to each (u, v) inside its 3x3 window; nan when none"""
    us = np.asarray(us, dtype=np.float64).reshape(-1)
    vs = np.asarray(vs, dtype=np.float64).reshape(-1)
    pu, pv, z, valid = _window(depth, us, vs, 1, 1)
    n = len(us)
    d2 = np.where(valid, (pu - us[:, None, None]) ** 2 + (pv - vs[:, None, None]) ** 2, np.inf).reshape(n, -1)
    best = np.argmin(d2, axis=1)
    found = np.isfinite(d2[np.arange(n), best])
    return np.where(found, z.reshape(n, -1)[np.arange(n), best], np.nan)


def nearest_valid_depth(depth: np.ndarray, u: float, v: float) -> float:
    """Depth of the valid pixel nearest to (u, v) inside the 3x3 window; nan when none"""
    return float(nearest_valid_depths(depth, np.array([u]), np.array([v]))[0])


def _planar_side_depth(offsets: np.ndarray, inv_z: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """
    Inverse depth is affine in pixel coordinates on a plane: fit 1/z = a du + c dv + e
    per sample over the masked window pixels and return 1/e (nan where unusable)
    """
    n = mask.shape[0]
    out = np.full(n, np.nan)

    def solve(weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        a = np.einsum("nmi,nm,nmj->nij", offsets, weights, offsets)
        rhs = np.einsum("nmi,nm,nm->ni", offsets, weights, inv_z)
        ok = (weights.sum(axis=1) >= 3) & (np.abs(np.linalg.det(a)) > 1e-6)
        coef = np.zeros((n, 3))
        if ok.any():
            coef[ok] = np.linalg.solve(a[ok], rhs[ok][..., None])[..., 0]
        return coef, ok

    weights = mask.astype(np.float64)
    coef, ok = solve(weights)
    # one pass of outlier rejection for pixels that see a different surface
    predicted = np.einsum("nmi,ni->nm", offsets, coef)
    inliers = mask & (np.abs(inv_z - predicted) <= INLIER_RELATIVE * np.abs(predicted))
    refit = ok & (inliers.sum(axis=1) >= 3) & (inliers.sum(axis=1) < mask.sum(axis=1))
    if refit.any():
        coef_refit, ok_refit = solve(np.where(refit[:, None], inliers, mask).astype(np.float64))
        coef = np.where((refit & ok_refit)[:, None], coef_refit, coef)

    inv_at_sample = coef[:, 2]
    good = ok & (inv_at_sample > 0.0)
    out[good] = 1.0 / inv_at_sample[good]
    return out


def edge_depths(
    depth: np.ndarray,
    us: np.ndarray,
    vs: np.ndarray,
    k,
    b,
    mode: str = "planar",
) -> np.ndarray:
    """
    Depth at subpixel samples lying on the image line y = kx + b

    k and b are scalars or one value per sample, so samples of several lines
    can be looked up in one call.

    planar: extrapolate the face on each side of the line to the sample and take
    the nearer face (an edge belongs to the occluding surface); falls back to
    the nearest valid pixel in the 3x3 window. nearest: only the fallback.
    Missing depth is returned as nan.
    """
    us = np.asarray(us, dtype=np.float64).reshape(-1)
    vs = np.asarray(vs, dtype=np.float64).reshape(-1)
    result = np.full(us.shape, np.nan)

    if mode == "planar" and len(us):
        pu, pv, z, valid = _window(depth, us, vs, WINDOW_HALF_U, WINDOW_HALF_V)
        ks = np.broadcast_to(np.asarray(k, dtype=np.float64), us.shape)[:, None, None]
        bs = np.broadcast_to(np.asarray(b, dtype=np.float64), us.shape)[:, None, None]

        n = us.shape[0]
        signed = (pv - (ks * pu + bs)) / np.sqrt(1.0 + ks * ks)
        offsets = np.stack(
            [pu - us[:, None, None], pv - vs[:, None, None], np.ones(pu.shape)], axis=-1
        ).reshape(n, -1, 3)
        inv_z = np.where(valid, 1.0 / np.where(valid, z, 1.0), 0.0).reshape(n, -1)

        above = _planar_side_depth(offsets, inv_z, (valid & (signed < -SIDE_MARGIN_PX)).reshape(n, -1))
        below = _planar_side_depth(offsets, inv_z, (valid & (signed > SIDE_MARGIN_PX)).reshape(n, -1))

        both = np.isfinite(above) & np.isfinite(below)
        agree = both & (np.abs(above - below) <= AGREE_RELATIVE * np.minimum(above, below))
        result = np.where(agree, 0.5 * (above + below), np.fmin(above, below))

    missing = ~np.isfinite(result)
    if missing.any():
        result[missing] = nearest_valid_depths(depth, us[missing], vs[missing])
    return result


# ============================================================================
# 3-D LINES
# ============================================================================

def fit_line_3d(points: Sequence[Sequence[float]]) -> Line3DParams:
    """
    Least squares of x on z and of y on z (line as the intersection of two planes)

    Raises:
        DegenerateGeometryError: fewer than 2 points or constant z
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) < 2:
        raise DegenerateGeometryError(f"need at least 2 valid points for a 3-D line, got {len(pts)}")

    z = pts[:, 2]
    zc = z - z.mean()
    szz = float(zc @ zc)
    if float(np.ptp(z)) <= 1e-9 * max(1.0, float(np.abs(z).max())):
        raise DegenerateGeometryError("all points share the same z; two-plane fit undefined")

    k1 = float(zc @ (pts[:, 0] - pts[:, 0].mean())) / szz
    k2 = float(zc @ (pts[:, 1] - pts[:, 1].mean())) / szz
    b1 = float(pts[:, 0].mean() - k1 * z.mean())
    b2 = float(pts[:, 1].mean() - k2 * z.mean())
    residual = float(np.sum((pts[:, 0] - k1 * z - b1) ** 2) + np.sum((pts[:, 1] - k2 * z - b2) ** 2))
    return Line3DParams(k1, b1, k2, b2, residual)


def fit_line_3d_principal(points: Sequence[Sequence[float]]) -> Line3D:
    """Total least-squares 3-D line: centroid and principal direction of the points"""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) < 2:
        raise DegenerateGeometryError(f"need at least 2 valid points for a 3-D line, got {len(pts)}")

    centroid = pts.mean(axis=0)
    _, singular, vt = np.linalg.svd(pts - centroid, full_matrices=False)
    if singular[0] <= 0.0:
        raise DegenerateGeometryError("all points coincide")
    direction = vt[0]
    # orient toward +x so the direction is reproducible
    if direction[0] < 0.0:
        direction = -direction
    return Line3D(centroid, direction, float(np.sum(singular[1:] ** 2)))


def yoz_intersection(params: Line3DParams) -> np.ndarray:
    """Point where the two-plane line crosses the camera x = 0 plane"""
    if abs(params.k1) < PARALLEL_EPS:
        raise DegenerateGeometryError("line is parallel to the camera YOZ plane")
    return np.array([0.0, (params.k1 * params.b2 - params.k2 * params.b1) / params.k1, -params.b1 / params.k1])


def anchor_on_yoz(line: Line3D) -> np.ndarray:
    """Point where a principal-axis line crosses the camera x = 0 plane"""
    if abs(line.direction[0]) < PARALLEL_EPS:
        raise DegenerateGeometryError("line is parallel to the camera YOZ plane")
    t = -line.point[0] / line.direction[0]
    anchor = line.point + t * line.direction
    anchor[0] = 0.0
    return anchor


# ============================================================================
# FRAMES
# ============================================================================

def attitude_from_gravity(gravity: Sequence[float]) -> Tuple[float, float]:
    """(pitch, roll) from gravity in the camera frame: roll = asin(-gx/|g|), pitch = asin(gz/|g|)"""
    g = np.asarray(gravity, dtype=np.float64)
    norm = float(np.linalg.norm(g))
    if not norm > 0.0:
        raise DegenerateGeometryError("gravity vector is zero")
    roll = math.asin(float(np.clip(-g[0] / norm, -1.0, 1.0)))
    pitch = math.asin(float(np.clip(g[2] / norm, -1.0, 1.0)))
    return pitch, roll


def gravity_from_attitude(pitch: float, roll: float, magnitude: float = STANDARD_GRAVITY) -> np.ndarray:
    """Gravity in the camera frame for a (pitch, roll) attitude, camera upright (gy > 0)"""
    sp, sr = math.sin(pitch), math.sin(roll)
    rest = 1.0 - sp * sp - sr * sr
    if rest < -1e-12:
        raise DegenerateGeometryError(f"no attitude with pitch={pitch} and roll={roll}")
    return magnitude * np.array([-sr, math.sqrt(max(rest, 0.0)), sp])


def camera_to_world_rotation(pitch: float, roll: float) -> np.ndarray:
    """
    Rotation taking camera coordinates to the gravity-aligned world frame

    World Y points up (against gravity), world Z is the horizontal projection of
    the camera forward axis and X = Y x Z.
    """
    if abs(math.cos(pitch)) < PARALLEL_EPS:
        raise DegenerateGeometryError("camera forward axis is vertical (gimbal lock)")
    up = -gravity_from_attitude(pitch, roll, 1.0)
    forward = np.array([0.0, 0.0, 1.0])
    z_axis = forward - (forward @ up) * up
    z_axis /= np.linalg.norm(z_axis)
    x_axis = np.cross(up, z_axis)
    return np.vstack([x_axis, up, z_axis])


def camera_to_world(point, pitch: float, roll: float) -> np.ndarray:
    """Camera point(s), shape (3,) or (n, 3), in the world frame"""
    return np.asarray(point, dtype=np.float64) @ camera_to_world_rotation(pitch, roll).T


def _wrap_line_angle(angle: float) -> float:
    """Lines have no orientation: fold into (-pi/2, pi/2]"""
    while angle <= -math.pi / 2:
        angle += math.pi
    while angle > math.pi / 2:
        angle -= math.pi
    return angle


def yaw_from_line(p1: Sequence[float], p2: Sequence[float]) -> float:
    """Angle between the horizontal direction of a world line and world X"""
    d = np.asarray(p2, dtype=np.float64) - np.asarray(p1, dtype=np.float64)
    norm = float(np.linalg.norm(d))
    if norm == 0.0:
        raise DegenerateGeometryError("yaw needs two distinct points")
    if math.hypot(d[0], d[2]) <= 1e-12 * norm:
        raise DegenerateGeometryError("stair line is vertical in the world frame")
    return _wrap_line_angle(math.atan2(d[2], d[0]))


def mean_yaw(yaws: Sequence[float]) -> float:
    """Mean of line angles (axial mean, so 89 deg and -89 deg average to 90 deg)"""
    if len(yaws) == 0:
        raise InsufficientDataError("no yaw estimates to average")
    doubled = 2.0 * np.asarray(yaws, dtype=np.float64)
    return _wrap_line_angle(0.5 * math.atan2(np.sin(doubled).mean(), np.cos(doubled).mean()))


def world_to_stair(point, yaw: float) -> np.ndarray:
    """Rotate world point(s) about the shared vertical axis so stair lines run along X_s"""
    return Rotation.from_rotvec([0.0, yaw, 0.0]).apply(np.asarray(point, dtype=np.float64))


# ============================================================================
# STEPS
# ============================================================================

def classify_direction(
    classes: Sequence[StairClass], edge_points: Optional[Sequence[Sequence[float]]] = None
) -> Direction:
    """
    Any concave line means ascending; only convex lines means descending.
    Unclassified lines fall back to the height profile of the stair-frame edge
    points ordered near to far (rising = ascending).
    """
    if len(classes) == 0:
        raise InsufficientDataError("no stair lines to classify")
    if any(c == StairClass.CONCAVE for c in classes):
        return Direction.ASCENDING
    if all(c == StairClass.CONVEX for c in classes):
        return Direction.DESCENDING

    pts = np.asarray(edge_points if edge_points is not None else [], dtype=np.float64).reshape(-1, 3)
    if len(pts) < 2:
        raise InsufficientDataError("direction of unclassified lines needs at least 2 edge points")
    logger.debug("direction decided from the edge height profile")
    return Direction.ASCENDING if pts[-1, 1] - pts[0, 1] > 0.0 else Direction.DESCENDING


def measure_steps(edge_points: Sequence[Sequence[float]], omega: float = 0.05) -> List[StepMeasurement]:
    """
    Step widths/heights from consecutive stair-frame edge points (near to far)

    height = |dys|, width = |dzs|; components below omega are dropped. A height
    opens a step and the next width completes it; a difference with both
    components is a step on its own.
    """
    pts = np.asarray(edge_points, dtype=np.float64).reshape(-1, 3)
    if len(pts) < 2:
        raise InsufficientDataError(f"need at least 2 edge points, got {len(pts)}")

    steps: List[StepMeasurement] = []
    pending: Optional[StepMeasurement] = None
    for a, b in zip(pts[:-1], pts[1:]):
        height = float(abs(b[1] - a[1]))
        width = float(abs(b[2] - a[2]))
        h = height if height >= omega else None
        w = width if width >= omega else None

        if h is not None and w is not None:
            if pending is not None:
                steps.append(pending)
                pending = None
            steps.append(StepMeasurement(width_m=w, height_m=h))
        elif h is not None:
            if pending is not None:
                steps.append(pending)
            pending = StepMeasurement(height_m=h)
        elif w is not None:
            if pending is not None:
                pending.width_m = w
                steps.append(pending)
                pending = None
            else:
                steps.append(StepMeasurement(width_m=w))

    if pending is not None:
        steps.append(pending)
    return steps


def measurement_errors(measurement: StairMeasurement, true_width: float, true_height: float) -> List[StepError]:
    """Absolute and relative error of every measured step against the true size"""
    errors = []
    for n, step in enumerate(measurement.steps):
        err = StepError(index=n)
        if step.width_m is not None:
            err.width_abs_m = abs(step.width_m - true_width)
            err.width_rel = err.width_abs_m / true_width
        if step.height_m is not None:
            err.height_abs_m = abs(step.height_m - true_height)
            err.height_rel = err.height_abs_m / true_height
        errors.append(err)
    return errors


# ============================================================================
# PIPELINE
# ============================================================================

class _LineAnchor(NamedTuple):
    line: StairLine2D
    anchor: np.ndarray  # camera frame, x = 0
    second: np.ndarray  # another camera point on the fitted line


def _line_depths(
    lines: Sequence[StairLine2D], depth: np.ndarray, rig: CameraRig, params: MeasureParams, diagnostics: List[str]
) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Samples and their depths for every line, looked up in one batch"""
    samples = []
    for line in lines:
        points, fallback = sample_line_points(line, rig.image_dims[0])
        if fallback:
            logger.warning(f"line b={line.b:.1f} does not cross the middle axis; equal-interval sampling")
            diagnostics.append(f"fallback sampling for line b={line.b:.2f}")
        samples.append(points)

    stacked = np.concatenate(samples)
    ks = np.repeat([line.k for line in lines], SAMPLES_PER_LINE)
    bs = np.repeat([line.b for line in lines], SAMPLES_PER_LINE)
    try:
        z = edge_depths(depth, stacked[:, 0], stacked[:, 1], ks, bs, params.depth_mode)
    except StairKitError as e:
        raise e.with_stage("depth")
    return list(zip(samples, np.split(z, len(lines))))


def _anchor_line(
    line: StairLine2D,
    samples: np.ndarray,
    z: np.ndarray,
    rig: CameraRig,
    params: MeasureParams,
    diagnostics: List[str],
) -> Optional[_LineAnchor]:
    valid = np.isfinite(z) & (z > 0.0)
    holes = SAMPLES_PER_LINE - int(valid.sum())
    if int(valid.sum()) < params.min_valid_samples:
        logger.warning(f"line b={line.b:.1f} dropped: {holes} of {SAMPLES_PER_LINE} samples in depth holes")
        diagnostics.append(f"dropped line b={line.b:.2f}: {holes} depth holes")
        return None

    points = backproject_many(samples[valid], z[valid], rig)
    if params.line_fit == "two_plane":
        fitted = fit_line_3d(points)
        anchor = yoz_intersection(fitted)
        second = fitted.point_at(anchor[2] + 1.0)
    else:
        fitted = fit_line_3d_principal(points)
        anchor = anchor_on_yoz(fitted)
        second = anchor + fitted.direction
    return _LineAnchor(line, anchor, second)


def measure_pipeline(
    grid: DetectionGrid,
    depth: np.ndarray,
    rig: CameraRig,
    params: Optional[MeasureParams] = None,
) -> StairMeasurement:
    """
    Grid + depth map + gravity -> stair direction and per-step (width, height)

    Stages: threshold, cluster, sample, depth, fit3d, attitude, yaw,
    stair_frame, direction, steps. Errors are re-raised tagged with their stage.
    """
    params = params or MeasureParams()
    depth = np.asarray(depth, dtype=np.float64)
    width, height = rig.image_dims
    if depth.shape != (height, width):
        raise InputError(f"depth map {depth.shape[::-1]} does not match rig image dims {rig.image_dims}", stage="depth")

    try:
        pitch, roll = attitude_from_gravity(rig.gravity)
        rotation = camera_to_world_rotation(pitch, roll)
    except StairKitError as e:
        raise e.with_stage("attitude")

    measurement = StairMeasurement(pitch_deg=math.degrees(pitch), roll_deg=math.degrees(roll))

    try:
        lines = cluster_grid(threshold_grid(grid, params.conf_threshold), params.cluster)
    except StairKitError as e:
        raise e.with_stage("cluster")
    logger.debug(f"{len(lines)} stair line(s) clustered")
    if not lines:
        measurement.diagnostics.append("no stair lines detected")
        return measurement

    anchors: List[_LineAnchor] = []
    geometry_failure: Optional[StairKitError] = None
    per_line = _line_depths(lines, depth, rig, params, measurement.diagnostics)
    for line, (samples, z) in zip(lines, per_line):
        try:
            result = _anchor_line(line, samples, z, rig, params, measurement.diagnostics)
        except DegenerateGeometryError as e:
            geometry_failure = e.with_stage("fit3d")
            logger.warning(f"line b={line.b:.1f} dropped: {e.message}")
            measurement.diagnostics.append(f"dropped line b={line.b:.2f}: {e.message}")
            continue
        if result is not None:
            anchors.append(result)

    if not anchors:
        if geometry_failure is not None:
            raise geometry_failure
        raise InsufficientDataError("insufficient depth: every stair line fell into depth holes", stage="depth")

    # near to far = bottom to top in the image
    mid = width / 2.0
    anchors.sort(key=lambda a: -(a.line.k * mid + a.line.b))

    world = np.array([a.anchor for a in anchors]) @ rotation.T
    world_second = np.array([a.second for a in anchors]) @ rotation.T
    try:
        yaw = mean_yaw([yaw_from_line(p, q) for p, q in zip(world, world_second)])
    except StairKitError as e:
        raise e.with_stage("yaw")
    measurement.yaw_deg = math.degrees(yaw)

    stair = np.atleast_2d(world_to_stair(world, yaw))
    measurement.edge_points = [tuple(float(c) for c in p) for p in stair]

    if len(anchors) < 2:
        measurement.diagnostics.append("only one usable stair line; no steps measured")
        return measurement

    try:
        measurement.direction = classify_direction([a.line.cls for a in anchors], stair)
    except StairKitError as e:
        raise e.with_stage("direction")
    try:
        measurement.steps = measure_steps(stair, params.omega)[: params.max_steps]
    except StairKitError as e:
        raise e.with_stage("steps")

    logger.info(
        f"measured {len(measurement.steps)} step(s), {measurement.direction.value}, "
        f"yaw={measurement.yaw_deg:.2f} deg pitch={measurement.pitch_deg:.2f} deg"
    )
    return measurement
