"""
StairKit - Stair Line Clustering
Groups positive grid cells into whole stair lines, from the two middle columns
outward, refitting each line by least squares as it grows
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from stairkit.core.errors import DegenerateGeometryError
from stairkit.core.grid_model import CellPrediction, DetectionGrid, Point, Segment
from stairkit.models.geometry import ClusterParams
from stairkit.models.grid import StairClass

logger = logging.getLogger(__name__)


@dataclass
class StairLine2D:
    """Clustered stair line: six-tuple (x1, y1, x2, y2, k, b) plus its member segments"""
    x1: float
    y1: float
    x2: float
    y2: float
    k: float
    b: float
    members: List[Segment] = field(default_factory=list)
    cls: StairClass = StairClass.UNKNOWN

    @property
    def member_count(self) -> int:
        return len(self.members)

    def y_at(self, x: float) -> float:
        return self.k * x + self.b

    def to_dict(self) -> dict:
        return {
            "x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2,
            "k": self.k, "b": self.b, "member_count": self.member_count,
        }


# ============================================================================
# LEAST SQUARES
# ============================================================================

def fit_line_2d(points: Sequence[Point]) -> Tuple[float, float]:
    """
    Ordinary least squares of y on x

    Raises:
        DegenerateGeometryError: fewer than 2 points or all x identical
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise DegenerateGeometryError(f"need at least 2 points for a line fit, got {len(pts)}")

    x, y = pts[:, 0], pts[:, 1]
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 0.0:
        raise DegenerateGeometryError("all points share the same x; slope undefined")

    k = float(xc @ (y - y.mean())) / sxx
    return k, float(y.mean() - k * x.mean())


# ============================================================================
# CELL SEGMENTS
# ============================================================================

def _denormalize_cells(
    coords: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    cell_dims: Tuple[float, float],
    dedupe_tolerance: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Pixel endpoints of both pairs of N cells, left endpoint first

    Returns:
        (N, 2, 2, 2) array indexed [cell, pair, endpoint, xy] and an (N,) mask of
        cells whose second pair is distinct from the first
    """
    cw, ch = cell_dims
    pairs = np.asarray(coords, dtype=np.float64).reshape(-1, 2, 2, 2)
    x0 = (np.asarray(cols) * cw)[:, None, None]
    y0 = (np.asarray(rows) * ch)[:, None, None]
    pts = np.stack([x0 + pairs[..., 0] * cw, y0 + pairs[..., 1] * ch], axis=-1)

    swap = pts[:, :, 0, 0] > pts[:, :, 1, 0]
    pts = np.where(swap[..., None, None], pts[:, :, ::-1, :], pts)

    delta = pts[:, 0] - pts[:, 1]
    gap = 0.5 * (np.hypot(delta[:, 0, 0], delta[:, 0, 1]) + np.hypot(delta[:, 1, 0], delta[:, 1, 1]))
    return pts, gap >= dedupe_tolerance


def _as_segment(endpoints) -> Segment:
    (ax, ay), (bx, by) = endpoints
    return (ax, ay), (bx, by)


def select_cell_segments(
    cell: CellPrediction,
    i: int,
    j: int,
    dedupe_tolerance: float = 4.0,
    cell_dims: Tuple[float, float] = (32.0, 16.0),
) -> List[Segment]:
    """
    Pixel segments of a positive cell

    Both predicted pairs are denormalized; when their mean endpoint distance is
    below the tolerance only the first pair is kept.
    """
    pts, distinct = _denormalize_cells(np.array([cell.coords]), np.array([i]), np.array([j]), cell_dims, dedupe_tolerance)
    first, second = pts[0].tolist()
    if distinct[0]:
        return [_as_segment(first), _as_segment(second)]
    return [_as_segment(first)]


def grid_segments(grid: DetectionGrid, dedupe_tolerance: float = 4.0) -> Dict[int, List[Segment]]:
    """Segments of every positive cell, per column, in row order"""
    cols, rows = np.nonzero(grid.conf.T > 0.0)
    per_column: Dict[int, List[Segment]] = {}
    if len(rows) == 0:
        return per_column

    pts, distinct = _denormalize_cells(
        grid.coords[rows, cols], rows, cols, (grid.cell_width, grid.cell_height), dedupe_tolerance
    )
    for j, cell, keep in zip(cols.tolist(), pts.tolist(), distinct.tolist()):
        segments = per_column.setdefault(j, [])
        segments.append(_as_segment(cell[0]))
        if keep:
            segments.append(_as_segment(cell[1]))
    return per_column


def column_order(cols: int, seed_columns: Tuple[int, int]) -> List[int]:
    """Non-seed columns, alternating outward from the seed pair: 6, 9, 5, 10, ..."""
    left, right = min(seed_columns), max(seed_columns)
    order = []
    lo, hi = left - 1, right + 1
    while lo >= 0 or hi < cols:
        if lo >= 0:
            order.append(lo)
            lo -= 1
        if hi < cols:
            order.append(hi)
            hi += 1
    return order


# ============================================================================
# CLUSTERING
# ============================================================================

class _Cluster:
    """Line under construction; keeps running sums so a refit is O(1)"""

    def __init__(self, members: Sequence[Segment]):
        self.members: List[Segment] = []
        self.n = 0
        self.sx = self.sy = self.sxx = self.sxy = 0.0
        for seg in members:
            self.add(seg)
        self.k = 0.0
        self.b = 0.0
        self.refit()

    def add(self, seg: Segment) -> None:
        self.members.append(seg)
        for x, y in seg:
            self.n += 1
            self.sx += x
            self.sy += y
            self.sxx += x * x
            self.sxy += x * y

    def refit(self) -> None:
        mean_x, mean_y = self.sx / self.n, self.sy / self.n
        sxx = self.sxx - self.sx * mean_x
        if sxx <= 1e-12 * max(1.0, self.sxx):
            # zero-width chords only: keep a horizontal line through them
            self.k, self.b = 0.0, mean_y
            return
        self.k = (self.sxy - self.sx * mean_y) / sxx
        self.b = mean_y - self.k * mean_x

    def distance(self, seg: Segment) -> float:
        """Mean vertical distance of the segment endpoints to y = kx + b"""
        (ax, ay), (bx, by) = seg
        return 0.5 * (abs(ay - (self.k * ax + self.b)) + abs(by - (self.k * bx + self.b)))

    def to_line(self) -> StairLine2D:
        pts = np.array([p for seg in self.members for p in seg])
        try:
            k, b = fit_line_2d(pts)
        except DegenerateGeometryError:
            k, b = 0.0, float(pts[:, 1].mean())
        left = pts[np.lexsort((pts[:, 1], pts[:, 0]))[0]]
        right = pts[np.lexsort((pts[:, 1], -pts[:, 0]))[0]]
        return StairLine2D(
            float(left[0]), float(left[1]), float(right[0]), float(right[1]), k, b, list(self.members)
        )


def _seed_clusters(segments: List[Segment], tolerance: float) -> List[_Cluster]:
    """Chain seed-column segments whose endpoints come within tolerance (union-find)"""
    if not segments:
        return []
    ends = np.asarray(segments, dtype=np.float64)  # (n, 2, 2)
    delta = ends[:, None, :, None, :] - ends[None, :, None, :, :]
    gap = np.hypot(delta[..., 0], delta[..., 1]).min(axis=(2, 3))

    parent = list(range(len(segments)))

    def find(n: int) -> int:
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for a, b in np.argwhere(np.triu(gap < tolerance, k=1)).tolist():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    groups: Dict[int, List[Segment]] = {}
    for n, seg in enumerate(segments):
        groups.setdefault(find(n), []).append(seg)
    return [_Cluster(groups[root]) for root in sorted(groups)]


def _distances(segments: Sequence[Segment], clusters: Sequence[_Cluster]) -> np.ndarray:
    """(segments x clusters) mean vertical endpoint distance"""
    ends = np.asarray(segments, dtype=np.float64)  # (s, 2, 2)
    k = np.array([c.k for c in clusters])
    b = np.array([c.b for c in clusters])
    residual = np.abs(ends[:, :, None, 1] - (ends[:, :, None, 0] * k + b))  # (s, 2, c)
    return 0.5 * (residual[:, 0] + residual[:, 1])


def cluster_grid(grid: DetectionGrid, params: Optional[ClusterParams] = None) -> List[StairLine2D]:
    """
    Cluster the positive cells of an already-thresholded grid into stair lines

    Lines are seeded from the two middle columns, then the remaining columns are
    visited outward; each segment joins the nearest line (mean vertical endpoint
    distance below tau) or founds a new one. Touched lines are refit after every
    column. Output is sorted top-to-bottom by intercept.
    """
    params = params or ClusterParams()
    tau = params.assign_tolerance
    by_column = grid_segments(grid, params.dedupe_tolerance)

    seed_segments = []
    for j in sorted(params.seed_columns):
        seed_segments.extend(by_column.get(j, []))
    clusters = _seed_clusters(seed_segments, tau)
    logger.debug(f"{len(clusters)} seed line(s) from {len(seed_segments)} middle segment(s)")

    for j in column_order(grid.cols, params.seed_columns):
        segments = by_column.get(j)
        if not segments:
            continue
        existing = len(clusters)
        distances = _distances(segments, clusters) if existing else None
        touched = set()
        for s, seg in enumerate(segments):
            best, best_distance = None, tau
            if existing:
                n = int(np.argmin(distances[s]))
                if distances[s, n] < best_distance:
                    best, best_distance = n, float(distances[s, n])
            # lines founded earlier in this column
            for n in range(existing, len(clusters)):
                d = clusters[n].distance(seg)
                if d < best_distance:
                    best, best_distance = n, d
            if best is None:
                clusters.append(_Cluster([seg]))
                continue
            clusters[best].add(seg)
            touched.add(best)
        for n in touched:
            clusters[n].refit()

    lines = [c.to_line() for c in clusters]
    lines.sort(key=lambda line: line.b)
    return lines
