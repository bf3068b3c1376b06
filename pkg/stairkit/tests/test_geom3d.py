"""
3D Stair Geometry Tests
Sampling, depth lookup, 3-D line fits and the camera -> world -> stair frames
"""

import math

import numpy as np
import pytest

from stairkit.core.errors import DegenerateGeometryError, DepthHoleError, InsufficientDataError
from stairkit.core.geom3d import (
    Line3DParams,
    anchor_on_yoz,
    attitude_from_gravity,
    backproject,
    backproject_many,
    camera_to_world,
    camera_to_world_rotation,
    classify_direction,
    edge_depths,
    fit_line_3d,
    fit_line_3d_principal,
    gravity_from_attitude,
    mean_yaw,
    measure_steps,
    measurement_errors,
    nearest_valid_depth,
    nearest_valid_depths,
    project,
    sample_line_points,
    world_to_stair,
    yaw_from_line,
    yoz_intersection,
)
from stairkit.core.line_cluster import StairLine2D
from stairkit.models.geometry import Direction, StairMeasurement, StepMeasurement
from stairkit.models.grid import StairClass


def _line(x1, x2, k=0.0, b=200.0):
    return StairLine2D(x1, k * x1 + b, x2, k * x2 + b, k, b)


# ============================================================================
# SAMPLING & BACKPROJECTION
# ============================================================================

def test_samples_symmetric_about_middle_axis():
    samples, fallback = sample_line_points(_line(96, 416), 512)
    assert not fallback
    assert list(samples[:, 0]) == pytest.approx([96, 136, 176, 216, 256, 296, 336, 376, 416])
    assert np.allclose(samples[:, 1], 200.0)


def test_sample_spacing_follows_shorter_side():
    samples, _ = sample_line_points(_line(246, 506, k=0.1, b=10), 512)
    assert np.diff(samples[:, 0]) == pytest.approx([2.5] * 8)
    assert samples[4, 0] == 256.0
    assert samples[4, 1] == pytest.approx(0.1 * 256 + 10)


def test_line_off_the_axis_uses_equal_intervals():
    samples, fallback = sample_line_points(_line(300, 500), 512)
    assert fallback
    assert list(samples[:, 0]) == pytest.approx(list(np.linspace(300, 500, 9)))


def test_backproject_then_project(rig):
    point = backproject((300.0, 120.0), 2.5, rig)
    assert point[2] == 2.5
    assert project(point, rig) == pytest.approx((300.0, 120.0))
    assert np.allclose(backproject_many([[300.0, 120.0]], [2.5], rig)[0], point)


@pytest.mark.parametrize("depth", [0.0, -1.0, float("nan")])
def test_backproject_rejects_depth_holes(rig, depth):
    with pytest.raises(DepthHoleError):
        backproject((10.0, 10.0), depth, rig)


def test_project_rejects_points_behind_camera(rig):
    with pytest.raises(DegenerateGeometryError):
        project((0.0, 0.0, -1.0), rig)


# ============================================================================
# DEPTH LOOKUP
# ============================================================================

def _two_face_depth(near=2.0, far=3.0, row=200):
    depth = np.full((512, 512), far)
    depth[row:] = near
    return depth


def test_constant_depth_is_exact():
    depth = np.full((512, 512), 2.0)
    z = edge_depths(depth, np.array([100.0, 256.3]), np.array([200.0, 200.0]), 0.0, 200.0)
    assert z == pytest.approx([2.0, 2.0])


def test_edge_takes_the_nearer_face():
    us = np.array([100.0, 256.0, 400.0])
    z = edge_depths(_two_face_depth(), us, np.full(3, 200.0), 0.0, 200.0)
    assert z == pytest.approx([2.0, 2.0, 2.0])


def test_nearest_mode_reads_the_window():
    z = edge_depths(_two_face_depth(), np.array([256.0]), np.array([200.0]), 0.0, 200.0, mode="nearest")
    assert z[0] == 2.0


def test_holes_everywhere_give_nan():
    z = edge_depths(np.zeros((512, 512)), np.array([256.0]), np.array([200.0]), 0.0, 200.0)
    assert np.isnan(z[0])


def test_nearest_valid_depth_skips_holes():
    depth = np.zeros((10, 10))
    depth[5, 6] = 1.5
    assert nearest_valid_depth(depth, 5.0, 5.0) == 1.5
    assert math.isnan(nearest_valid_depth(depth, 1.0, 1.0))


def _nearest_by_loop(depth, u, v):
    h, w = depth.shape
    cu, cv = int(np.rint(u)), int(np.rint(v))
    best, best_d2 = math.nan, math.inf
    for dv in (-1, 0, 1):
        for du in (-1, 0, 1):
            pu, pv = cu + du, cv + dv
            if not (0 <= pu < w and 0 <= pv < h):
                continue
            z = depth[pv, pu]
            d2 = (pu - u) ** 2 + (pv - v) ** 2
            if math.isfinite(z) and z > 0.0 and d2 < best_d2:
                best, best_d2 = z, d2
    return best


def test_nearest_valid_depths_match_pixel_loop(rng):
    depth = rng.uniform(0.5, 5.0, (40, 60))
    depth[rng.random(depth.shape) < 0.5] = 0.0
    depth[rng.random(depth.shape) < 0.1] = np.nan
    us, vs = rng.uniform(-1.0, 61.0, 2000), rng.uniform(-1.0, 41.0, 2000)
    z = nearest_valid_depths(depth, us, vs)
    expected = [_nearest_by_loop(depth, u, v) for u, v in zip(us, vs)]
    assert np.array_equal(z, expected, equal_nan=True)


def test_batched_lines_match_single_line_lookups(rng):
    depth = _two_face_depth() + rng.normal(0.0, 0.002, (512, 512))
    depth[rng.random(depth.shape) < 0.05] = 0.0
    lines = [(0.0, 200.0), (0.05, 180.0), (-0.08, 230.0)]
    us = np.linspace(40.0, 470.0, 9)
    single = [edge_depths(depth, us, k * us + b, k, b) for k, b in lines]
    batched = edge_depths(
        depth,
        np.tile(us, len(lines)),
        np.concatenate([k * us + b for k, b in lines]),
        np.repeat([k for k, _ in lines], len(us)),
        np.repeat([b for _, b in lines], len(us)),
    )
    assert np.allclose(batched, np.concatenate(single), rtol=1e-12, atol=0.0, equal_nan=True)


# ============================================================================
# 3-D LINES
# ============================================================================

def test_two_plane_fit_recovers_line():
    params = Line3DParams(2.0, 1.0, -1.0, 4.0)
    fitted = fit_line_3d([params.point_at(z) for z in (1.0, 1.5, 2.0, 3.0)])
    assert (fitted.k1, fitted.b1, fitted.k2, fitted.b2) == pytest.approx((2.0, 1.0, -1.0, 4.0))
    assert fitted.residual == pytest.approx(0.0, abs=1e-18)


def test_yoz_intersection_example():
    assert yoz_intersection(Line3DParams(2.0, 1.0, -1.0, 4.0)) == pytest.approx([0.0, 4.5, -0.5])


def test_yoz_intersection_of_parallel_line():
    with pytest.raises(DegenerateGeometryError):
        yoz_intersection(Line3DParams(0.0, 1.0, 0.5, 2.0))


def test_two_plane_fit_needs_varying_depth():
    with pytest.raises(DegenerateGeometryError):
        fit_line_3d([(0.0, 1.0, 2.0), (1.0, 1.0, 2.0), (2.0, 1.0, 2.0)])


def test_principal_fit_handles_constant_depth():
    points = [(x, 0.4, 2.0) for x in np.linspace(-1.0, 1.0, 9)]
    line = fit_line_3d_principal(points)
    assert line.direction == pytest.approx([1.0, 0.0, 0.0])
    assert anchor_on_yoz(line) == pytest.approx([0.0, 0.4, 2.0])


def test_principal_anchor_matches_two_plane():
    params = Line3DParams(2.0, 1.0, -1.0, 4.0)
    points = [params.point_at(z) for z in np.linspace(-1.0, 1.0, 9)]
    assert anchor_on_yoz(fit_line_3d_principal(points)) == pytest.approx(yoz_intersection(params))


def test_principal_fit_of_coincident_points():
    with pytest.raises(DegenerateGeometryError):
        fit_line_3d_principal([(1.0, 1.0, 1.0)] * 4)


def _regress_on_z(z, values):
    n = len(z)
    sz, sv = math.fsum(z), math.fsum(values)
    szz, szv = math.fsum(z * z), math.fsum(z * values)
    det = n * szz - sz * sz
    return (n * szv - sz * sv) / det, (szz * sv - sz * szv) / det


def test_two_plane_fit_matches_normal_equations():
    rng = np.random.default_rng(51)
    for _ in range(1000):
        n = int(rng.integers(5, 30))
        z = rng.uniform(1.0, 5.0, n)
        x = rng.uniform(-2, 2) * z + rng.uniform(-1, 1) + rng.normal(0, 0.01, n)
        y = rng.uniform(-2, 2) * z + rng.uniform(-1, 1) + rng.normal(0, 0.01, n)
        k1, b1 = _regress_on_z(z, x)
        k2, b2 = _regress_on_z(z, y)
        residual = math.fsum((x - k1 * z - b1) ** 2) + math.fsum((y - k2 * z - b2) ** 2)

        fitted = fit_line_3d(np.column_stack([x, y, z]))
        assert (fitted.k1, fitted.b1, fitted.k2, fitted.b2) == pytest.approx((k1, b1, k2, b2), rel=1e-9, abs=1e-12)
        assert fitted.residual == pytest.approx(residual, rel=1e-9)


def test_principal_fit_matches_scatter_eigenvector():
    rng = np.random.default_rng(52)
    for _ in range(1000):
        n = int(rng.integers(5, 30))
        direction = rng.normal(size=3)
        direction[0] = rng.choice([-1, 1]) * rng.uniform(0.3, 1.0)
        direction /= np.linalg.norm(direction)
        points = rng.normal(size=3) + rng.uniform(-1, 1, (n, 1)) * direction + rng.normal(0, 0.01, (n, 3))

        centroid = points.mean(axis=0)
        centered = points - centroid
        _, vectors = np.linalg.eigh(centered.T @ centered)
        axis = vectors[:, -1] * np.sign(vectors[0, -1])
        along = centered @ axis
        residual = math.fsum((centered * centered).ravel()) - math.fsum(along * along)

        line = fit_line_3d_principal(points)
        assert line.point == pytest.approx(centroid, rel=1e-9, abs=1e-12)
        assert line.direction == pytest.approx(axis, rel=1e-9, abs=1e-9)
        assert line.residual == pytest.approx(residual, rel=1e-9)


# ============================================================================
# FRAMES
# ============================================================================

@pytest.mark.parametrize("pitch_deg, roll_deg", [(0, 0), (15, 0), (20, -5), (-10, 8), (45, 3)])
def test_attitude_round_trip(pitch_deg, roll_deg):
    pitch, roll = math.radians(pitch_deg), math.radians(roll_deg)
    assert attitude_from_gravity(gravity_from_attitude(pitch, roll)) == pytest.approx((pitch, roll))


def test_zero_gravity():
    with pytest.raises(DegenerateGeometryError):
        attitude_from_gravity((0.0, 0.0, 0.0))


def test_world_rotation_points_up_against_gravity():
    pitch, roll = math.radians(18), math.radians(-4)
    rotation = camera_to_world_rotation(pitch, roll)
    assert rotation @ rotation.T == pytest.approx(np.eye(3))
    assert np.linalg.det(rotation) == pytest.approx(1.0)
    g = gravity_from_attitude(pitch, roll)
    assert camera_to_world(g, pitch, roll) == pytest.approx([0.0, -9.81, 0.0])
    # forward stays in the world Y-Z plane
    assert camera_to_world([0.0, 0.0, 1.0], pitch, roll)[0] == pytest.approx(0.0, abs=1e-12)


def test_level_camera_flips_y():
    assert camera_to_world([0.0, 1.0, 2.0], 0.0, 0.0) == pytest.approx([0.0, -1.0, 2.0])


def test_gimbal_lock():
    with pytest.raises(DegenerateGeometryError):
        camera_to_world_rotation(math.pi / 2, 0.0)


def test_yaw_ignores_line_orientation():
    assert yaw_from_line((0, 0, 0), (1, 0, 1)) == pytest.approx(math.pi / 4)
    assert yaw_from_line((0, 0, 0), (-1, 0, -1)) == pytest.approx(math.pi / 4)
    assert yaw_from_line((0, 0, 0), (1, 3, 0)) == pytest.approx(0.0)


def test_yaw_of_vertical_line():
    with pytest.raises(DegenerateGeometryError):
        yaw_from_line((0, 0, 0), (0, 1, 0))


def test_mean_yaw_wraps_around():
    assert mean_yaw([math.radians(89), math.radians(-89)]) == pytest.approx(math.pi / 2)
    assert mean_yaw([0.1, 0.2, 0.3]) == pytest.approx(0.2)
    with pytest.raises(InsufficientDataError):
        mean_yaw([])


def test_world_to_stair_examples():
    assert world_to_stair([1.0, 5.0, 0.0], math.pi / 2) == pytest.approx([0.0, 5.0, -1.0])
    assert world_to_stair([0.0, -1.0, 2.0], 0.0) == pytest.approx([0.0, -1.0, 2.0])


def test_world_to_stair_aligns_line_with_x():
    yaw = math.radians(12)
    direction = world_to_stair([math.cos(yaw), 0.0, math.sin(yaw)], yaw)
    assert direction == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)


def _random_attitude(rng):
    while True:
        pitch, roll = np.radians(rng.uniform(-70.0, 70.0, 2))
        if math.sin(pitch) ** 2 + math.sin(roll) ** 2 < 0.95:
            return pitch, roll


def test_camera_to_stair_is_an_isometry():
    rng = np.random.default_rng(61)
    for _ in range(10_000):
        pitch, roll = _random_attitude(rng)
        yaw = rng.uniform(-math.pi, math.pi)
        points = rng.uniform(-5.0, 5.0, (4, 3))
        moved = world_to_stair(camera_to_world(points, pitch, roll), yaw)

        before, after = points[1:] - points[0], moved[1:] - moved[0]
        assert np.linalg.norm(after, axis=1) == pytest.approx(np.linalg.norm(before, axis=1), rel=1e-9)
        assert after @ after.T == pytest.approx(before @ before.T, rel=1e-9, abs=1e-9)
        # handedness kept
        assert np.linalg.det(after) == pytest.approx(np.linalg.det(before), rel=1e-9, abs=1e-9)


def test_gravity_attitude_round_trip_random():
    rng = np.random.default_rng(62)
    for _ in range(10_000):
        pitch, roll = _random_attitude(rng)
        magnitude = rng.uniform(0.5, 20.0)
        recovered = attitude_from_gravity(gravity_from_attitude(pitch, roll, magnitude))
        assert recovered == pytest.approx((pitch, roll), rel=0.0, abs=1e-9)

        g = rng.normal(size=3)
        g[1] = abs(g[1]) + 0.2
        again = gravity_from_attitude(*attitude_from_gravity(g), float(np.linalg.norm(g)))
        assert again == pytest.approx(g, rel=1e-9, abs=1e-9)


def test_forward_point_height_follows_pitch():
    rng = np.random.default_rng(63)
    for _ in range(200):
        pitch, roll = _random_attitude(rng)
        d = rng.uniform(0.5, 10.0)
        world = camera_to_world([0.0, 0.0, d], pitch, roll)
        assert world == pytest.approx([0.0, -d * math.sin(pitch), d * math.cos(pitch)], abs=1e-12)
    # positive pitch looks down: what lies ahead is below the camera
    assert camera_to_world([0.0, 0.0, 2.0], math.radians(15), 0.0)[1] < 0.0


# ============================================================================
# STEPS
# ============================================================================

def test_direction_from_classes():
    assert classify_direction([StairClass.CONVEX, StairClass.CONCAVE]) == Direction.ASCENDING
    assert classify_direction([StairClass.CONVEX, StairClass.CONVEX]) == Direction.DESCENDING


def test_direction_from_height_profile():
    unknown = [StairClass.UNKNOWN] * 3
    rising = [(0, -1.0, 1.0), (0, -0.85, 1.3), (0, -0.7, 1.6)]
    falling = [(0, -1.0, 1.0), (0, -1.15, 1.3), (0, -1.3, 1.6)]
    assert classify_direction(unknown, rising) == Direction.ASCENDING
    assert classify_direction(unknown, falling) == Direction.DESCENDING


def test_direction_needs_lines():
    with pytest.raises(InsufficientDataError):
        classify_direction([])


def test_measure_steps_pairs_height_with_next_width():
    points = [(0, 0.0, 1.0), (0, 0.15, 1.0), (0, 0.15, 1.3), (0, 0.30, 1.3)]
    steps = measure_steps(points)
    assert len(steps) == 2
    assert (steps[0].width_m, steps[0].height_m) == pytest.approx((0.3, 0.15))
    assert steps[1].width_m is None
    assert steps[1].height_m == pytest.approx(0.15)


def test_measure_steps_diagonal_differences():
    points = [(0, 0.0, 1.0), (0, 0.17, 1.3), (0, 0.34, 1.6)]
    steps = measure_steps(points)
    assert [(s.width_m, s.height_m) for s in steps] == pytest.approx([(0.3, 0.17), (0.3, 0.17)])
    assert all(s.complete for s in steps)


def test_measure_steps_filters_below_omega():
    points = [(0, 0.0, 1.0), (0, 0.02, 1.3)]
    steps = measure_steps(points, omega=0.05)
    assert steps[0].height_m is None
    assert steps[0].width_m == pytest.approx(0.3)


def test_measure_steps_needs_two_points():
    with pytest.raises(InsufficientDataError):
        measure_steps([(0, 0, 1)])


def test_measurement_errors():
    measurement = StairMeasurement(steps=[StepMeasurement(width_m=0.31, height_m=0.15), StepMeasurement(height_m=0.16)])
    errors = measurement_errors(measurement, 0.30, 0.16)
    assert errors[0].width_abs_m == pytest.approx(0.01)
    assert errors[0].height_rel == pytest.approx(0.01 / 0.16)
    assert errors[1].width_abs_m is None
    assert errors[1].height_abs_m == pytest.approx(0.0)
