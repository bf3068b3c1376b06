"""
StairKit - File Formats
Depth maps (DPTH1), feature maps (FMAP1), rig JSON, grid dumps, label files
and error/weight CSV traces
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from stairkit.core.errors import FormatError, InputError
from stairkit.core.fusion_kernels import FeatureMap
from stairkit.core.grid_model import DetectionGrid, format_labels, parse_labels
from stairkit.models.geometry import CameraRig
from stairkit.models.grid import CellDump, GridDump, StairLineLabel
from stairkit.models.loss import LossWeights, ValErrors

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEPTH_MAGIC = b"DPTH1"
FMAP_MAGIC = b"FMAP1"
_U32 = np.dtype("<u4")
_F32 = np.dtype("<f4")


def _read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")


def _read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    except UnicodeDecodeError:
        raise FormatError(f"{path} is not UTF-8 text")


def _write_bytes(path: PathLike, data: bytes) -> None:
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}")


def write_text(path: PathLike, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}")


def ensure_dir(path: PathLike) -> Path:
    try:
        Path(path).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"cannot create directory {path}: {e.strerror}")
    return Path(path)


# ============================================================================
# DEPTH / FEATURE MAPS
# ============================================================================

def encode_depth(depth: np.ndarray) -> bytes:
    """DPTH1: magic, u32 width, u32 height, float32 row-major, little-endian"""
    depth = np.asarray(depth)
    if depth.ndim != 2:
        raise InputError(f"depth map must be 2-D, got shape {depth.shape}")
    height, width = depth.shape
    return DEPTH_MAGIC + np.array([width, height], dtype=_U32).tobytes() + depth.astype(_F32).tobytes()


def decode_depth(data: bytes) -> np.ndarray:
    header = len(DEPTH_MAGIC) + 8
    if len(data) < header or not data.startswith(DEPTH_MAGIC):
        raise FormatError("not a DPTH1 depth file")
    width, height = (int(v) for v in np.frombuffer(data, dtype=_U32, count=2, offset=len(DEPTH_MAGIC)))
    if len(data) != header + 4 * width * height:
        raise FormatError(f"DPTH1 payload is {len(data) - header} bytes, expected {4 * width * height}")
    return np.frombuffer(data, dtype=_F32, offset=header).reshape(height, width).astype(np.float64)


def write_depth(path: PathLike, depth: np.ndarray) -> None:
    _write_bytes(path, encode_depth(depth))


def read_depth(path: PathLike) -> np.ndarray:
    return decode_depth(_read_bytes(path))


def encode_feature_map(fmap: FeatureMap) -> bytes:
    """FMAP1: magic, u32 h, w, c, float32 (h, w, c) row-major, little-endian"""
    return FMAP_MAGIC + np.array(fmap.shape, dtype=_U32).tobytes() + fmap.data.astype(_F32).tobytes()


def decode_feature_map(data: bytes) -> FeatureMap:
    header = len(FMAP_MAGIC) + 12
    if len(data) < header or not data.startswith(FMAP_MAGIC):
        raise FormatError("not a FMAP1 feature-map file")
    h, w, c = (int(v) for v in np.frombuffer(data, dtype=_U32, count=3, offset=len(FMAP_MAGIC)))
    if len(data) != header + 4 * h * w * c:
        raise FormatError(f"FMAP1 payload does not match declared shape {h}x{w}x{c}")
    return FeatureMap(np.frombuffer(data, dtype=_F32, offset=header).reshape(h, w, c))


# ============================================================================
# JSON DOCUMENTS
# ============================================================================

def read_rig(path: PathLike) -> CameraRig:
    try:
        return CameraRig.model_validate_json(_read_text(path))
    except ValidationError as e:
        raise FormatError(f"invalid rig file {path}: {e.errors()[0]['msg']}")


def write_rig(path: PathLike, rig: CameraRig) -> None:
    write_text(path, json.dumps(rig.to_json_dict(), indent=2))


def grid_to_dump(grid: DetectionGrid) -> GridDump:
    """Only cells with conf > 0 are listed"""
    cells = [
        CellDump(i=int(i), j=int(j), conf=float(grid.conf[i, j]), coords=[float(v) for v in grid.coords[i, j]])
        for i, j in np.argwhere(grid.conf > 0.0)
    ]
    return GridDump(rows=grid.rows, cols=grid.cols, image_dims=grid.image_dims, cells=cells)


def dump_to_grid(dump: GridDump) -> DetectionGrid:
    conf = np.zeros((dump.rows, dump.cols))
    coords = np.zeros((dump.rows, dump.cols, 8))
    for cell in dump.cells:
        conf[cell.i, cell.j] = cell.conf
        coords[cell.i, cell.j] = cell.coords
    return DetectionGrid(conf, coords, dump.image_dims)


def parse_grid_dump(text: str) -> DetectionGrid:
    try:
        return dump_to_grid(GridDump.model_validate_json(text))
    except ValidationError as e:
        raise FormatError(f"invalid grid dump: {e.errors()[0]['msg']}")


def read_grid(path: PathLike) -> DetectionGrid:
    try:
        return parse_grid_dump(_read_text(path))
    except FormatError as e:
        raise FormatError(f"{path}: {e.message}")


def write_grid(path: PathLike, grid: DetectionGrid) -> None:
    write_text(path, grid_to_dump(grid).model_dump_json(indent=2))


# ============================================================================
# LABEL FILES
# ============================================================================

def read_labels(path: PathLike, image_dims: Tuple[int, int] = (512, 512)) -> List[StairLineLabel]:
    return parse_labels(_read_text(path), image_dims)


def write_labels(path: PathLike, labels: Sequence[StairLineLabel]) -> None:
    write_text(path, format_labels(labels))


# ============================================================================
# CSV TRACES
# ============================================================================

def parse_error_trace(text: str) -> List[ValErrors]:
    """
    Rows of x_error,y_error; a non-numeric first row is taken as a header

    Raises:
        FormatError: wrong column count, non-numeric or negative values
    """
    trace = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise FormatError(f"line {line_no}: expected 2 columns (x_error,y_error), got {len(row)}")
        try:
            x_error, y_error = float(row[0]), float(row[1])
        except ValueError:
            if line_no == 1:
                continue
            raise FormatError(f"line {line_no}: non-numeric value")
        try:
            trace.append(ValErrors(x_error=x_error, y_error=y_error))
        except ValidationError as e:
            raise FormatError(f"line {line_no}: {e.errors()[0]['msg']}")
    return trace


def format_weight_trace(trace: Iterable[ValErrors], history: Iterable[LossWeights]) -> str:
    """epoch,alpha,beta,x_error,y_error with repr-exact floats"""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["epoch", "alpha", "beta", "x_error", "y_error"])
    for epoch, (errors, weights) in enumerate(zip(trace, history), start=1):
        writer.writerow([epoch, repr(weights.alpha), repr(weights.beta), repr(errors.x_error), repr(errors.y_error)])
    return out.getvalue()
