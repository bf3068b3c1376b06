"""
StairKit - Synthetic Stair Scenes
Parametric stairs of axis-aligned treads and risers with ray-cast depth,
gravity and ground-truth stair lines, used as the oracle for end-to-end tests

Stair frame: X_s along the step edges, Y_s up, Z_s forward into the flight.
The first riser stands at z = step_width; the floor (or landing) covers
z < step_width.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from stairkit.core.errors import DegenerateGeometryError, InputError
from stairkit.core.geom3d import camera_to_world_rotation, gravity_from_attitude
from stairkit.core.grid_model import X_SLOTS, Y_SLOTS, DetectionGrid, labels_to_grid
from stairkit.models.geometry import CameraRig, Direction
from stairkit.models.grid import StairClass, StairLineLabel
from stairkit.models.scene import SceneSpec

logger = logging.getLogger(__name__)

EDGE_SAMPLES = 256
BISECTION_STEPS = 32


@dataclass(frozen=True)
class Rect:
    """Rectangle with constant coordinate `axis` (1 = tread, 2 = riser) and bounds on the others"""
    axis: int
    offset: float
    bounds: Tuple[Tuple[float, float], Tuple[float, float], Tuple[float, float]]


@dataclass(frozen=True)
class Edge3D:
    cls: StairClass
    y: float
    z: float
    x_range: Tuple[float, float]

    def point(self, x: float) -> np.ndarray:
        return np.array([x, self.y, self.z])


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    spec: SceneSpec
    rects: List[Rect]
    edges: List[Edge3D]
    rotation: np.ndarray  # camera -> stair
    camera_position: np.ndarray
    gravity: np.ndarray  # camera frame

    @property
    def rig(self) -> CameraRig:
        """Scene intrinsics carrying the scene gravity"""
        return self.spec.rig.with_gravity(tuple(self.gravity))

    def to_camera(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=np.float64) - self.camera_position) @ self.rotation


# ============================================================================
# SCENE CONSTRUCTION
# ============================================================================

def camera_rotation(pitch: float, roll: float, yaw: float) -> np.ndarray:
    """
    Camera -> stair rotation for a (pitch, roll, yaw) attitude

    world = R_cw(pitch, roll) camera; stair = R_y(yaw) world, so the stair
    lines seen from the camera make angle yaw with world X.
    """
    return Rotation.from_rotvec([0.0, yaw, 0.0]).as_matrix() @ camera_to_world_rotation(pitch, roll)


def scene_gravity(spec: SceneSpec) -> np.ndarray:
    return gravity_from_attitude(spec.pitch, spec.roll)


def _surface_height(spec: SceneSpec, z: float) -> float:
    """Height of the stair surface under stair-frame depth z"""
    if z < spec.step_width:
        return 0.0
    i = min(int(math.floor(z / spec.step_width)) - 1, spec.n_steps - 1)
    sign = 1.0 if spec.direction == Direction.ASCENDING else -1.0
    return sign * (i + 1) * spec.step_height


def make_scene(spec: SceneSpec) -> SyntheticScene:
    """
    Build the tread/riser rectangles and the ground-truth 3-D edges

    Raises:
        DegenerateGeometryError: camera inside the stair volume or an
            impossible attitude
    """
    n, w, h = spec.n_steps, spec.step_width, spec.step_height
    xs = (-spec.step_span / 2.0, spec.step_span / 2.0)
    far = (n + 1) * w + spec.floor_depth
    sign = 1.0 if spec.direction == Direction.ASCENDING else -1.0

    rects = [Rect(1, 0.0, (xs, (0.0, 0.0), (-spec.floor_depth, w)))]
    edges: List[Edge3D] = []
    for i in range(n):
        z = (i + 1) * w
        lo, hi = sorted((sign * i * h, sign * (i + 1) * h))
        rects.append(Rect(2, z, (xs, (lo, hi), (z, z))))
        tread_end = (i + 2) * w if i < n - 1 else far
        rects.append(Rect(1, sign * (i + 1) * h, (xs, (sign * (i + 1) * h,) * 2, (z, tread_end))))

        if spec.direction == Direction.ASCENDING:
            edges.append(Edge3D(StairClass.CONCAVE, i * h, z, xs))
            edges.append(Edge3D(StairClass.CONVEX, (i + 1) * h, z, xs))
        else:
            edges.append(Edge3D(StairClass.CONVEX, -i * h, z, xs))
            edges.append(Edge3D(StairClass.CONCAVE, -(i + 1) * h, z, xs))

    position = np.asarray(spec.camera_position, dtype=np.float64)
    if position[1] <= _surface_height(spec, float(position[2])) and abs(position[0]) <= xs[1]:
        raise DegenerateGeometryError(f"camera at {tuple(position)} is inside the stair volume")

    gravity = scene_gravity(spec)
    rotation = camera_rotation(spec.pitch, spec.roll, spec.yaw)
    logger.debug(f"scene: {n} {spec.direction.value} steps, {len(rects)} rectangles, {len(edges)} edges")
    return SyntheticScene(spec, rects, edges, rotation, position, gravity)


# ============================================================================
# RAY CASTING
# ============================================================================

def raycast(scene: SyntheticScene, directions: np.ndarray) -> np.ndarray:
    """
    Nearest hit parameter along camera-frame rays (x, y, 1)

    With a unit z component the parameter equals the camera z depth; misses
    are inf.
    """
    d = np.asarray(directions, dtype=np.float64).reshape(-1, 3) @ scene.rotation.T
    o = scene.camera_position
    best = np.full(len(d), np.inf)
    tol = 1e-12

    for rect in scene.rects:
        a = rect.axis
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (rect.offset - o[a]) / d[:, a]
        hit = np.isfinite(t) & (t > 1e-9) & (t < best)
        p = o + np.where(hit, t, 0.0)[:, None] * d
        for other in range(3):
            if other == a:
                continue
            lo, hi = rect.bounds[other]
            hit &= (p[:, other] >= lo - tol) & (p[:, other] <= hi + tol)
        best = np.where(hit, t, best)
    return best


def render_depth(
    scene: SyntheticScene,
    rig: Optional[CameraRig] = None,
    *,
    sigma: Optional[float] = None,
    quantum: Optional[float] = None,
) -> np.ndarray:
    """
    Depth map (height, width) by casting one ray per pixel

    Misses are 0.0 holes. Gaussian noise (sigma) then quantization are applied
    to hits with the scene's seeded generator; both default to the SceneSpec values.
    """
    rig = rig or scene.spec.rig
    sigma = scene.spec.depth_noise_sigma if sigma is None else sigma
    quantum = scene.spec.depth_quantization if quantum is None else quantum
    width, height = rig.image_dims

    us, vs = np.meshgrid(np.arange(width, dtype=np.float64), np.arange(height, dtype=np.float64))
    dirs = np.stack([(us - rig.cx) / rig.fx, (vs - rig.cy) / rig.fy, np.ones_like(us)], axis=-1)
    z = raycast(scene, dirs).reshape(height, width)
    hit = np.isfinite(z)

    rng = np.random.default_rng(scene.spec.rng_seed)
    if sigma > 0.0:
        z = np.where(hit, z + rng.normal(0.0, sigma, z.shape), z)
    if quantum > 0.0:
        z = np.where(hit, np.round(z / quantum) * quantum, z)

    depth = np.where(hit & (z > 0.0), z, 0.0)
    logger.debug(f"rendered {width}x{height} depth, {int((~hit).sum())} hole pixel(s)")
    return depth


# ============================================================================
# GROUND-TRUTH LINES
# ============================================================================

def _visible(scene: SyntheticScene, rig: CameraRig, points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Visibility of stair-frame points and their pixel coordinates"""
    cam = scene.to_camera(points)
    z = cam[:, 2]
    front = z > 1e-6
    safe_z = np.where(front, z, 1.0)
    uv = np.column_stack([rig.fx * cam[:, 0] / safe_z + rig.cx, rig.fy * cam[:, 1] / safe_z + rig.cy])
    width, height = rig.image_dims
    inside = front & (uv[:, 0] >= 0.0) & (uv[:, 0] <= width) & (uv[:, 1] >= 0.0) & (uv[:, 1] <= height)

    t = raycast(scene, cam / safe_z[:, None])
    unoccluded = t >= z * (1.0 - 1e-9) - 1e-9
    return inside & unoccluded, uv


def _refine(scene: SyntheticScene, rig: CameraRig, edge: Edge3D, inside_x: float, outside_x: float) -> float:
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (inside_x + outside_x)
        if _visible(scene, rig, edge.point(mid)[None, :])[0][0]:
            inside_x = mid
        else:
            outside_x = mid
    return inside_x


def project_gt_lines(scene: SyntheticScene, rig: Optional[CameraRig] = None) -> List[StairLineLabel]:
    """
    Visible stair edges as image labels (left endpoint first, class carried)

    Each edge is sampled densely; the longest visible run is refined at both
    ends by bisection against occlusion and the image border.
    """
    rig = rig or scene.spec.rig
    width, height = rig.image_dims
    labels = []

    for edge in scene.edges:
        xs = np.linspace(edge.x_range[0], edge.x_range[1], EDGE_SAMPLES)
        points = np.column_stack([xs, np.full_like(xs, edge.y), np.full_like(xs, edge.z)])
        visible, _ = _visible(scene, rig, points)
        if not visible.any():
            continue

        # longest run of visible samples
        best_start, best_len, start = 0, 0, None
        for n, flag in enumerate(np.append(visible, False)):
            if flag and start is None:
                start = n
            elif not flag and start is not None:
                if n - start > best_len:
                    best_start, best_len = start, n - start
                start = None
        lo, hi = best_start, best_start + best_len - 1

        x_lo = xs[lo] if lo == 0 else _refine(scene, rig, edge, xs[lo], xs[lo - 1])
        x_hi = xs[hi] if hi == EDGE_SAMPLES - 1 else _refine(scene, rig, edge, xs[hi], xs[hi + 1])
        _, uv = _visible(scene, rig, np.array([edge.point(x_lo), edge.point(x_hi)]))
        uv[:, 0] = np.clip(uv[:, 0], 0.0, width)
        uv[:, 1] = np.clip(uv[:, 1], 0.0, height)
        (u1, v1), (u2, v2) = sorted(map(tuple, uv))
        if math.hypot(u2 - u1, v2 - v1) < 1.0:
            continue
        labels.append(StairLineLabel(cls=edge.cls, x1=u1, y1=v1, x2=u2, y2=v2))

    logger.debug(f"{len(labels)} of {len(scene.edges)} edges visible")
    return labels


def scene_grid(scene: SyntheticScene, rig: Optional[CameraRig] = None) -> DetectionGrid:
    """Ground-truth detection grid of the visible edges"""
    rig = rig or scene.spec.rig
    return labels_to_grid(project_gt_lines(scene, rig), image_dims=rig.image_dims)


# ============================================================================
# DETECTOR NOISE
# ============================================================================

def perturb_grid(grid: DetectionGrid, endpoint_noise_px: float = 0.0, drop_rate: float = 0.0, rng_seed: int = 0) -> DetectionGrid:
    """
    Imitate detector jitter on a ground-truth grid

    Every coordinate of a positive cell moves uniformly within +-noise px
    (clipped to its cell); each positive cell is dropped with drop_rate.
    """
    if endpoint_noise_px < 0.0:
        raise InputError(f"endpoint noise must be >= 0, got {endpoint_noise_px}")
    if not 0.0 <= drop_rate < 1.0:
        raise InputError(f"drop rate must be in [0, 1), got {drop_rate}")

    rng = np.random.default_rng(rng_seed)
    positive = grid.conf > 0.0

    scale = np.empty(8)
    scale[list(X_SLOTS)] = endpoint_noise_px / grid.cell_width
    scale[list(Y_SLOTS)] = endpoint_noise_px / grid.cell_height
    jitter = rng.uniform(-1.0, 1.0, grid.coords.shape) * scale
    coords = np.where(positive[..., None], np.clip(grid.coords + jitter, 0.0, 1.0), grid.coords)

    keep = rng.random(grid.conf.shape) >= drop_rate
    conf = np.where(positive & ~keep, 0.0, grid.conf)
    coords = np.where((positive & ~keep)[..., None], 0.0, coords)
    return grid.replace(conf=conf, coords=coords)


# ============================================================================
# ONE-SHOT SIMULATION
# ============================================================================

@dataclass(frozen=True, eq=False)
class SimulatedFrame:
    scene: SyntheticScene
    labels: List[StairLineLabel]
    grid: DetectionGrid
    depth: np.ndarray

    @property
    def rig(self) -> CameraRig:
        return self.scene.rig


def simulate(spec: SceneSpec, endpoint_noise_px: float = 0.0, drop_rate: float = 0.0) -> SimulatedFrame:
    """Scene, visible labels, (optionally perturbed) grid and rendered depth"""
    scene = make_scene(spec)
    labels = project_gt_lines(scene)
    grid = labels_to_grid(labels, image_dims=spec.rig.image_dims)
    if endpoint_noise_px > 0.0 or drop_rate > 0.0:
        grid = perturb_grid(grid, endpoint_noise_px, drop_rate, spec.rng_seed)
    depth = render_depth(scene)
    logger.info(f"simulated {spec.direction.value} scene: {len(labels)} label(s), seed {spec.rng_seed}")
    return SimulatedFrame(scene, labels, grid, depth)
