"""
Grid Model Tests
Label parsing, ground-truth encoding, cell/pixel conversion and thresholding
"""

import numpy as np
import pytest

from stairkit.core.errors import InputError, LabelParseError
from stairkit.core.grid_model import (
    DetectionGrid,
    cell_segments,
    cell_to_pixel,
    encode_labels,
    format_labels,
    labels_to_grid,
    parse_labels,
    pixel_to_cell,
    threshold_cells,
    threshold_grid,
)
from stairkit.models.grid import StairClass, StairLineLabel


def _label(x1, y1, x2, y2, cls=StairClass.CONVEX):
    return StairLineLabel(cls=cls, x1=x1, y1=y1, x2=x2, y2=y2)


def _point_segment_distance(p, a, b):
    a, b, p = np.asarray(a), np.asarray(b), np.asarray(p)
    t = np.clip(np.dot(p - a, b - a) / np.dot(b - a, b - a), 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * (b - a))))


# ============================================================================
# LABEL FILES
# ============================================================================

def test_parse_single_convex_label():
    labels = parse_labels("0 96 200 416 210\n")
    assert labels == [_label(96, 200, 416, 210)]
    assert labels[0].cls == StairClass.CONVEX


def test_parse_empty_text():
    assert parse_labels("") == []
    assert parse_labels("\n  \n") == []


def test_parse_rejects_reversed_endpoints():
    with pytest.raises(LabelParseError) as exc:
        parse_labels("1 10 10 5 10\n")
    assert exc.value.line_no == 1


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("0 1 2 3\n", 1),
        ("0 1 2 3 4\n0 a 2 3 4\n", 2),
        ("2 1 2 3 4\n", 1),
        ("0 1 2 600 4\n", 1),
    ],
)
def test_parse_errors_carry_line_number(text, line_no):
    with pytest.raises(LabelParseError) as exc:
        parse_labels(text)
    assert exc.value.line_no == line_no
    assert exc.value.exit_code == 2


def test_format_then_parse_keeps_labels():
    labels = [_label(0, 100.5, 512, 120.25), _label(10, 30, 300, 31, StairClass.CONCAVE)]
    assert parse_labels(format_labels(labels)) == labels


# ============================================================================
# GROUND-TRUTH ENCODING
# ============================================================================

def test_horizontal_label_marks_one_row():
    grid = labels_to_grid([_label(0, 100, 512, 100)])
    assert grid.conf.shape == (32, 16)
    assert np.array_equal(np.flatnonzero(grid.conf.sum(axis=1)), [6])
    assert grid.conf[6].sum() == 16


def test_no_labels_gives_empty_grid():
    grid = labels_to_grid([])
    assert not grid.conf.any()
    assert not grid.coords.any()


def test_single_chord_is_duplicated_into_both_pairs():
    grid = labels_to_grid([_label(0, 100, 512, 100)])
    assert np.allclose(grid.coords[6, 3, :4], grid.coords[6, 3, 4:])
    assert np.allclose(grid.coords[6, 3, :4], [0.0, 0.25, 1.0, 0.25])


def test_two_labels_in_one_cell_store_both_chords():
    grid = labels_to_grid([_label(0, 100, 512, 100), _label(100, 90, 140, 110)])
    assert grid.conf[6, 3] == 1.0
    assert np.allclose(grid.coords[6, 3, :4], [0.0, 0.25, 1.0, 0.25])
    assert np.allclose(grid.coords[6, 3, 4:], [0.5, 0.0, 1.0, 0.5])


def test_overflow_keeps_two_chords_and_counts_cells():
    labels = [_label(0, 100, 512, 100), _label(0, 104, 512, 104), _label(0, 108, 512, 108)]
    grid, overflow = encode_labels(labels)
    assert overflow == 16
    assert np.allclose(grid.coords[6, 0, [1, 3]], 0.25)
    assert np.allclose(grid.coords[6, 0, [5, 7]], 0.5)


def test_label_on_cell_border_belongs_to_upper_cell():
    grid = labels_to_grid([_label(0, 96, 512, 96)])
    assert grid.conf[5].sum() == 16
    assert grid.conf[6].sum() == 0


def test_round_trip_reconstructs_segment():
    label = _label(50, 120, 400, 300)
    grid = labels_to_grid([label])
    endpoints = []
    for i, j in np.argwhere(grid.conf > 0):
        for seg in cell_segments(grid, i, j):
            endpoints.extend(seg)

    assert all(_point_segment_distance(p, (50, 120), (400, 300)) < 1e-9 for p in endpoints)
    xs = [p[0] for p in endpoints]
    assert min(xs) == pytest.approx(50, abs=1e-9)
    assert max(xs) == pytest.approx(400, abs=1e-9)


# ============================================================================
# CELL <-> PIXEL
# ============================================================================

def test_cell_to_pixel_examples():
    grid = DetectionGrid.empty()
    assert cell_to_pixel(grid, 0, 0, (0.5, 0.5)) == (16.0, 8.0)
    assert cell_to_pixel(grid, 6, 8, (0.25, 0.5)) == (264.0, 104.0)
    u, v = cell_to_pixel(grid, 31, 15, (1 - 1e-12, 1 - 1e-12))
    assert u == pytest.approx(512.0) and u < 512.0
    assert v == pytest.approx(512.0) and v < 512.0


@pytest.mark.parametrize("i, j", [(-1, 0), (32, 0), (0, 16)])
def test_cell_to_pixel_rejects_bad_index(i, j):
    with pytest.raises(InputError):
        cell_to_pixel(DetectionGrid.empty(), i, j, (0.5, 0.5))


def test_pixel_to_cell_inverts_cell_to_pixel(rng):
    grid = DetectionGrid.empty()
    for _ in range(200):
        i, j = int(rng.integers(32)), int(rng.integers(16))
        point = tuple(rng.uniform(0.01, 0.99, 2))
        ii, jj, back = pixel_to_cell(grid, cell_to_pixel(grid, i, j, point))
        assert (ii, jj) == (i, j)
        assert back == pytest.approx(point, abs=1e-12)


# ============================================================================
# THRESHOLDING
# ============================================================================

def test_threshold_on_empty_grid():
    assert threshold_cells(DetectionGrid.empty(), 0.5) == []


def test_threshold_single_cell():
    conf = np.zeros((32, 16))
    conf[4, 9] = 0.9
    cells = threshold_cells(DetectionGrid(conf, np.zeros((32, 16, 8))), 0.5)
    assert [(i, j) for i, j, _ in cells] == [(4, 9)]
    assert cells[0][2].conf == pytest.approx(0.9)


def test_threshold_matches_brute_force(rng):
    grid = DetectionGrid(rng.random((32, 16)), rng.random((32, 16, 8)))
    expected = [(i, j) for i in range(32) for j in range(16) if grid.conf[i, j] >= 0.5]
    assert [(i, j) for i, j, _ in threshold_cells(grid, 0.5)] == expected


def test_threshold_extremes(rng):
    grid = DetectionGrid(rng.random((32, 16)), rng.random((32, 16, 8)))
    assert len(threshold_cells(grid, 0.0)) == 32 * 16
    assert threshold_cells(grid, 1.0 + 1e-9) == []


def test_threshold_grid_clears_low_cells(rng):
    grid = DetectionGrid(rng.random((32, 16)), rng.random((32, 16, 8)))
    kept = threshold_grid(grid, 0.5)
    low = grid.conf < 0.5
    assert not kept.conf[low].any()
    assert not kept.coords[low].any()
    assert np.array_equal(kept.coords[~low], grid.coords[~low])


def test_grid_rejects_bad_shapes():
    with pytest.raises(InputError):
        DetectionGrid(np.zeros((32, 16)), np.zeros((32, 16, 4)))
