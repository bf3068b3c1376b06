"""
StairKit - Grid Model
Detection-grid data model, the label-file format and cell/pixel conversions

The grid is 32 rows x 16 columns over a 512 x 512 image, so every cell is
32 px wide and 16 px tall. Each cell carries a confidence and two endpoint
pairs (x1 y1 x2 y2, x3 y3 x4 y4) normalized to the cell box.
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from stairkit.core.errors import DimensionMismatchError, InputError, LabelParseError
from stairkit.models.grid import StairClass, StairLineLabel

logger = logging.getLogger(__name__)

GRID_ROWS = 32
GRID_COLS = 16
IMAGE_DIMS = (512, 512)  # (width, height)

# Indices of abscissas / ordinates inside the 8-vector of a cell
X_SLOTS = (0, 2, 4, 6)
Y_SLOTS = (1, 3, 5, 7)

Point = Tuple[float, float]
Segment = Tuple[Point, Point]


# ============================================================================
# DATA MODEL
# ============================================================================

@dataclass(frozen=True)
class CellPrediction:
    """Confidence plus two normalized endpoint pairs of one cell"""
    conf: float
    coords: Tuple[float, float, float, float, float, float, float, float]

    @property
    def first_pair(self) -> Tuple[float, float, float, float]:
        return self.coords[:4]

    @property
    def second_pair(self) -> Tuple[float, float, float, float]:
        return self.coords[4:]


@dataclass(frozen=True, eq=False)
class DetectionGrid:
    """Row-major grid of cell predictions (conf: rows x cols, coords: rows x cols x 8)"""
    conf: np.ndarray
    coords: np.ndarray
    image_dims: Tuple[int, int] = IMAGE_DIMS

    def __post_init__(self):
        conf = np.array(self.conf, dtype=np.float64)
        coords = np.array(self.coords, dtype=np.float64)
        if conf.ndim != 2:
            raise InputError(f"conf must be 2-D, got shape {conf.shape}")
        if coords.shape != conf.shape + (8,):
            raise InputError(f"coords shape {coords.shape} does not match conf shape {conf.shape} x 8")
        conf.setflags(write=False)
        coords.setflags(write=False)
        object.__setattr__(self, "conf", conf)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "image_dims", (int(self.image_dims[0]), int(self.image_dims[1])))

    @classmethod
    def empty(
        cls,
        rows: int = GRID_ROWS,
        cols: int = GRID_COLS,
        image_dims: Tuple[int, int] = IMAGE_DIMS,
    ) -> "DetectionGrid":
        return cls(np.zeros((rows, cols)), np.zeros((rows, cols, 8)), image_dims)

    @property
    def rows(self) -> int:
        return self.conf.shape[0]

    @property
    def cols(self) -> int:
        return self.conf.shape[1]

    @property
    def cell_width(self) -> float:
        return self.image_dims[0] / self.cols

    @property
    def cell_height(self) -> float:
        return self.image_dims[1] / self.rows

    def check_index(self, i: int, j: int) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise InputError(f"cell index ({i}, {j}) outside {self.rows}x{self.cols} grid")

    def cell(self, i: int, j: int) -> CellPrediction:
        self.check_index(i, j)
        return CellPrediction(float(self.conf[i, j]), tuple(float(v) for v in self.coords[i, j]))

    def check_same_shape(self, other: "DetectionGrid") -> None:
        if self.conf.shape != other.conf.shape or self.image_dims != other.image_dims:
            raise DimensionMismatchError(
                f"grid {self.rows}x{self.cols}@{self.image_dims} vs "
                f"{other.rows}x{other.cols}@{other.image_dims}"
            )

    def replace(self, conf: Optional[np.ndarray] = None, coords: Optional[np.ndarray] = None) -> "DetectionGrid":
        return DetectionGrid(
            self.conf if conf is None else conf,
            self.coords if coords is None else coords,
            self.image_dims,
        )


# ============================================================================
# LABEL FILES
# ============================================================================

def parse_labels(text: str, image_dims: Tuple[int, int] = IMAGE_DIMS) -> List[StairLineLabel]:
    """
    Parse label-file content ("cls x1 y1 x2 y2" per line)

    Raises:
        LabelParseError: wrong field count, non-numeric field, cls not in {0, 1},
            x1 > x2 or a coordinate outside the image
    """
    width, height = image_dims
    labels: List[StairLineLabel] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields:
            continue
        if len(fields) != 5:
            raise LabelParseError(line_no, f"expected 5 fields, got {len(fields)}")

        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise LabelParseError(line_no, f"non-numeric field in {raw.strip()!r}")
        if not all(math.isfinite(v) for v in values):
            raise LabelParseError(line_no, "non-finite value")

        cls_value, x1, y1, x2, y2 = values
        if cls_value not in (0.0, 1.0):
            raise LabelParseError(line_no, f"cls must be 0 or 1, got {fields[0]}")

        try:
            label = StairLineLabel(cls=StairClass(int(cls_value)), x1=x1, y1=y1, x2=x2, y2=y2)
        except ValidationError as e:
            raise LabelParseError(line_no, e.errors()[0]["msg"])

        for x in (x1, x2):
            if not 0.0 <= x <= width:
                raise LabelParseError(line_no, f"x={x} outside [0, {width}]")
        for y in (y1, y2):
            if not 0.0 <= y <= height:
                raise LabelParseError(line_no, f"y={y} outside [0, {height}]")

        labels.append(label)

    return labels


def format_labels(labels: Sequence[StairLineLabel]) -> str:
    return "".join(label.to_record() + "\n" for label in labels)


# ============================================================================
# GROUND-TRUTH ENCODING
# ============================================================================

def clip_segment_to_box(
    p0: Point, p1: Point, box: Tuple[float, float, float, float]
) -> Optional[Segment]:
    """Liang-Barsky clip of segment p0-p1 to the closed box (x0, y0, x1, y1)"""
    x_min, y_min, x_max, y_max = box
    dx = p1[0] - p0[0]
    dy = p1[1] - p0[1]
    t0, t1 = 0.0, 1.0

    for p, q in ((-dx, p0[0] - x_min), (dx, x_max - p0[0]), (-dy, p0[1] - y_min), (dy, y_max - p0[1])):
        if p == 0.0:
            if q < 0.0:
                return None
            continue
        t = q / p
        if p < 0.0:
            if t > t1:
                return None
            t0 = max(t0, t)
        else:
            if t < t0:
                return None
            t1 = min(t1, t)

    if t0 > t1:
        return None
    return (
        (p0[0] + t0 * dx, p0[1] + t0 * dy),
        (p0[0] + t1 * dx, p0[1] + t1 * dy),
    )


def encode_labels(
    labels: Sequence[StairLineLabel],
    grid_dims: Tuple[int, int] = (GRID_ROWS, GRID_COLS),
    image_dims: Tuple[int, int] = IMAGE_DIMS,
) -> Tuple[DetectionGrid, int]:
    """
    Encode labels into a ground-truth grid

    Returns:
        (grid, overflow) where overflow counts cells crossed by more than two
        segments; those cells keep their two longest chords
    """
    rows, cols = grid_dims
    cell_w = image_dims[0] / cols
    cell_h = image_dims[1] / rows

    # (i, j) -> [(label index, chord length, normalized chord)]
    chords: Dict[Tuple[int, int], List[Tuple[int, float, Tuple[float, float, float, float]]]] = {}

    for index, label in enumerate(labels):
        p0 = (label.x1, label.y1)
        p1 = (label.x2, label.y2)
        if label.length == 0.0:
            continue

        row_lo = max(0, int(math.floor(min(label.y1, label.y2) / cell_h)) - 1)
        row_hi = min(rows - 1, int(math.floor(max(label.y1, label.y2) / cell_h)))
        col_lo = max(0, int(math.floor(min(label.x1, label.x2) / cell_w)) - 1)
        col_hi = min(cols - 1, int(math.floor(max(label.x1, label.x2) / cell_w)))

        for i in range(row_lo, row_hi + 1):
            y0 = i * cell_h
            for j in range(col_lo, col_hi + 1):
                x0 = j * cell_w
                chord = clip_segment_to_box(p0, p1, (x0, y0, x0 + cell_w, y0 + cell_h))
                if chord is None:
                    continue
                (ax, ay), (bx, by) = chord
                length = math.hypot(bx - ax, by - ay)
                if length <= 0.0:
                    continue
                # a chord lying on a shared border belongs to the upper/left cell
                if i > 0 and ay == y0 and by == y0:
                    continue
                if j > 0 and ax == x0 and bx == x0:
                    continue
                normalized = ((ax - x0) / cell_w, (ay - y0) / cell_h, (bx - x0) / cell_w, (by - y0) / cell_h)
                chords.setdefault((i, j), []).append((index, length, normalized))

    conf = np.zeros((rows, cols))
    coords = np.zeros((rows, cols, 8))
    overflow = 0

    for (i, j), found in chords.items():
        if len(found) > 2:
            overflow += 1
            found = sorted(sorted(found, key=lambda c: -c[1])[:2], key=lambda c: c[0])
        first = found[0][2]
        second = found[1][2] if len(found) > 1 else first
        conf[i, j] = 1.0
        coords[i, j] = first + second

    if overflow:
        logger.warning(f"{overflow} cell(s) crossed by more than two stair lines; kept the two longest chords")

    return DetectionGrid(conf, coords, image_dims), overflow


def labels_to_grid(
    labels: Sequence[StairLineLabel],
    grid_dims: Tuple[int, int] = (GRID_ROWS, GRID_COLS),
    image_dims: Tuple[int, int] = IMAGE_DIMS,
) -> DetectionGrid:
    """Ground-truth grid for a label set (see encode_labels for the overflow count)"""
    grid, _ = encode_labels(labels, grid_dims, image_dims)
    return grid


# ============================================================================
# CELL <-> PIXEL
# ============================================================================

def cell_to_pixel(grid: DetectionGrid, i: int, j: int, point: Point) -> Point:
    """Map a cell-normalized point of cell (i, j) to pixel coordinates"""
    grid.check_index(i, j)
    x, y = point
    return (j * grid.cell_width + x * grid.cell_width, i * grid.cell_height + y * grid.cell_height)


def pixel_to_cell(grid: DetectionGrid, pixel: Point) -> Tuple[int, int, Point]:
    """Cell containing a pixel (half-open boxes) and the normalized offset inside it"""
    u, v = pixel
    if not (0.0 <= u < grid.image_dims[0] and 0.0 <= v < grid.image_dims[1]):
        raise InputError(f"pixel ({u}, {v}) outside image {grid.image_dims}")
    j = int(u // grid.cell_width)
    i = int(v // grid.cell_height)
    return i, j, ((u - j * grid.cell_width) / grid.cell_width, (v - i * grid.cell_height) / grid.cell_height)


def cell_segments(grid: DetectionGrid, i: int, j: int) -> Tuple[Segment, Segment]:
    """Both endpoint pairs of a cell in pixel space"""
    c = grid.coords[i, j]
    return (
        (cell_to_pixel(grid, i, j, (c[0], c[1])), cell_to_pixel(grid, i, j, (c[2], c[3]))),
        (cell_to_pixel(grid, i, j, (c[4], c[5])), cell_to_pixel(grid, i, j, (c[6], c[7]))),
    )


# ============================================================================
# THRESHOLDING
# ============================================================================

def threshold_cells(grid: DetectionGrid, conf_threshold: float) -> List[Tuple[int, int, CellPrediction]]:
    """Cells with conf >= threshold in row-major order"""
    return [(int(i), int(j), grid.cell(int(i), int(j))) for i, j in np.argwhere(grid.conf >= conf_threshold)]


def threshold_grid(grid: DetectionGrid, conf_threshold: float) -> DetectionGrid:
    """Copy of the grid with every cell below the threshold cleared"""
    keep = grid.conf >= conf_threshold
    return grid.replace(conf=np.where(keep, grid.conf, 0.0), coords=np.where(keep[..., None], grid.coords, 0.0))
