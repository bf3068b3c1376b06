"""
StairKit - Fusion Kernels
Focus slice, RGB-D selective fusion and the backbone shape plan as plain numeric kernels
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.special import softmax

from stairkit.core.errors import DimensionMismatchError, InputError

logger = logging.getLogger(__name__)


# ============================================================================
# FEATURE MAPS
# ============================================================================

@dataclass(frozen=True, eq=False)
class FeatureMap:
    """Dense (height, width, channels) feature map"""
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 3 or min(data.shape) <= 0:
            raise InputError(f"feature map must be (h, w, c) with positive dims, got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InputError("feature map contains non-finite values")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self.data.shape


def focus_slice(fmap: FeatureMap) -> FeatureMap:
    """
    Space-to-depth rearrangement: (h, w, c) -> (h/2, w/2, 4c)

    Channel blocks are ordered (even row, even col), (even, odd), (odd, even), (odd, odd).
    """
    if fmap.height % 2 or fmap.width % 2:
        raise InputError(f"focus slice needs even height and width, got {fmap.height}x{fmap.width}")
    x = fmap.data
    return FeatureMap(np.concatenate([x[0::2, 0::2], x[0::2, 1::2], x[1::2, 0::2], x[1::2, 1::2]], axis=2))


def focus_unslice(fmap: FeatureMap) -> FeatureMap:
    """Exact inverse of focus_slice"""
    if fmap.channels % 4:
        raise InputError(f"channel count {fmap.channels} is not a multiple of 4")
    c = fmap.channels // 4
    out = np.empty((fmap.height * 2, fmap.width * 2, c))
    blocks = [fmap.data[:, :, k * c:(k + 1) * c] for k in range(4)]
    out[0::2, 0::2], out[0::2, 1::2], out[1::2, 0::2], out[1::2, 1::2] = blocks
    return FeatureMap(out)


# ============================================================================
# SELECTIVE FUSION
# ============================================================================

@dataclass(frozen=True, eq=False)
class SelectiveParams:
    """
    Branch logit generators for selective fusion

    Either two affine maps applied to the pooled descriptor (rgb_weight/rgb_bias,
    depth_weight/depth_bias) or two fixed logit vectors.
    """
    rgb_weight: Optional[np.ndarray] = None
    rgb_bias: Optional[np.ndarray] = None
    depth_weight: Optional[np.ndarray] = None
    depth_bias: Optional[np.ndarray] = None
    fixed_logits: Optional[Tuple[np.ndarray, np.ndarray]] = None
    activation: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None)

    @classmethod
    def fixed(cls, rgb_logits, depth_logits) -> "SelectiveParams":
        return cls(fixed_logits=(np.atleast_1d(np.asarray(rgb_logits, dtype=np.float64)),
                                 np.atleast_1d(np.asarray(depth_logits, dtype=np.float64))))

    @classmethod
    def affine(cls, rgb_weight, rgb_bias, depth_weight, depth_bias, activation=None) -> "SelectiveParams":
        return cls(
            rgb_weight=np.asarray(rgb_weight, dtype=np.float64),
            rgb_bias=np.asarray(rgb_bias, dtype=np.float64),
            depth_weight=np.asarray(depth_weight, dtype=np.float64),
            depth_bias=np.asarray(depth_bias, dtype=np.float64),
            activation=activation,
        )

    def logits(self, descriptor: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        c = descriptor.shape[0]
        if self.fixed_logits is not None:
            a, b = self.fixed_logits
            if a.shape != (c,) or b.shape != (c,):
                raise DimensionMismatchError(f"fixed logits must have length {c}")
            return a, b

        if self.rgb_weight is None or self.depth_weight is None:
            raise InputError("selective params need either fixed logits or both affine maps")
        for name, w, bias in (("rgb", self.rgb_weight, self.rgb_bias), ("depth", self.depth_weight, self.depth_bias)):
            if w.shape != (c, c) or bias is None or bias.shape != (c,):
                raise DimensionMismatchError(f"{name} logit map must be {c}x{c} plus bias {c}")

        s = self.activation(descriptor) if self.activation is not None else descriptor
        return self.rgb_weight @ s + self.rgb_bias, self.depth_weight @ s + self.depth_bias


def selective_fuse(
    u_rgb: FeatureMap, u_d: FeatureMap, params: SelectiveParams
) -> Tuple[FeatureMap, Tuple[np.ndarray, np.ndarray]]:
    """
    Channel-wise soft selection between the RGB and depth branches

    Returns:
        (fused map, (w_rgb, w_d)) with w_rgb[c] + w_d[c] = 1
    """
    if u_rgb.shape != u_d.shape:
        raise DimensionMismatchError(f"branch shapes differ: {u_rgb.shape} vs {u_d.shape}")

    descriptor = (u_rgb.data + u_d.data).mean(axis=(0, 1))
    a, b = params.logits(descriptor)
    weights = softmax(np.stack([a, b]), axis=0)
    w_rgb, w_d = weights[0], weights[1]

    fused = w_rgb * u_rgb.data + w_d * u_d.data
    return FeatureMap(fused), (w_rgb, w_d)


# ============================================================================
# SHAPE PLAN
# ============================================================================

@dataclass(frozen=True)
class ShapeRow:
    """One layer of the plan; source is the feeding row index (-1 = network input)"""
    name: str
    branch: str  # rgb, depth, shared, classification, location
    height: int
    width: int
    channels: int
    stride: Tuple[int, int] = (1, 1)
    source: int = -1


@dataclass(frozen=True)
class ShapePlan:
    input_size: Tuple[int, int]
    width_factor: float
    rows: List[ShapeRow]

    def row(self, name: str, branch: Optional[str] = None) -> ShapeRow:
        for r in self.rows:
            if r.name == name and (branch is None or r.branch == branch):
                return r
        raise KeyError(name)

    def is_consistent(self) -> bool:
        """Every row's spatial size follows from its source row and stride"""
        for r in self.rows:
            src_h, src_w = self.input_size if r.source < 0 else (self.rows[r.source].height, self.rows[r.source].width)
            if src_h % r.stride[0] or src_w % r.stride[1]:
                return False
            if (r.height, r.width) != (src_h // r.stride[0], src_w // r.stride[1]):
                return False
        return True


HEAD_CHANNELS = {"classification": 1, "location": 8}

# (name, stride, channels at width factor 1)
_BRANCH_STAGES = [
    ("Initial", (2, 2), 32),
    ("Bottleneck 1.0", (2, 2), 128),
    ("Bottleneck 1.1", (1, 1), 128),
    ("Bottleneck 1.2", (1, 1), 128),
]
_SHARED_STAGES = [
    ("Selective module", (1, 1), 128),
    ("Bottleneck 2.0", (2, 2), 256),
    ("Bottleneck 2.1", (1, 1), 256),
    ("Bottleneck 2.2", (1, 1), 256),
    ("Bottleneck 2.3", (1, 1), 256),
    ("Bottleneck 2.4", (1, 1), 256),
    ("Bottleneck 2.5", (1, 1), 256),
    ("Bottleneck 2.6", (1, 1), 256),
    ("Bottleneck 2.7", (1, 1), 256),
    ("Repeat bottlenecks 2.0-2.7", (2, 2), 256),
    ("Conv 3x3", (1, 2), 128),
]
_HEAD_STAGES = [
    ("Conv 3x3", 128),
    ("Conv 1x1", None),
    ("Activation", None),
]


def scale_channels(channels: int, width_factor: float) -> int:
    """Nearest integer (halves round up), at least 1"""
    return max(1, int(math.floor(channels * width_factor + 0.5)))


def backbone_shape_plan(input_size: Tuple[int, int] = (512, 512), width_factor: float = 1.0) -> ShapePlan:
    """
    Layer-by-layer output shapes of the dual-branch backbone and its two heads

    Channel counts are scaled by width_factor; head outputs (1 and 8) are not.
    """
    height, width = input_size
    if height <= 0 or width <= 0 or height % 32 or width % 32:
        raise InputError(f"input size {input_size} must be positive and divisible by 32")
    if not width_factor > 0:
        raise InputError(f"width factor must be positive, got {width_factor}")

    rows: List[ShapeRow] = []
    last = {"rgb": -1, "depth": -1}

    def add(name, branch, stride, channels, source) -> int:
        src_h, src_w = (height, width) if source < 0 else (rows[source].height, rows[source].width)
        rows.append(ShapeRow(name, branch, src_h // stride[0], src_w // stride[1], channels, stride, source))
        return len(rows) - 1

    for name, stride, channels in _BRANCH_STAGES:
        for branch in ("rgb", "depth"):
            last[branch] = add(name, branch, stride, scale_channels(channels, width_factor), last[branch])

    # the selective module consumes both branches; its listed source is the rgb side
    trunk = last["rgb"]
    for name, stride, channels in _SHARED_STAGES:
        trunk = add(name, "shared", stride, scale_channels(channels, width_factor), trunk)

    for branch in ("classification", "location"):
        source = trunk
        for name, channels in _HEAD_STAGES:
            out = scale_channels(channels, width_factor) if channels is not None else HEAD_CHANNELS[branch]
            source = add(name, branch, (1, 1), out, source)

    logger.debug(f"shape plan for {input_size} x{width_factor}: {len(rows)} rows")
    return ShapePlan((height, width), width_factor, rows)


def plan_summary(plan: ShapePlan) -> dict:
    """Total downsampling per axis and the head output shapes"""
    cls_head = [r for r in plan.rows if r.branch == "classification"][-1]
    loc_head = [r for r in plan.rows if r.branch == "location"][-1]
    return {
        "input_size": list(plan.input_size),
        "width_factor": plan.width_factor,
        "downsampling": [plan.input_size[0] // cls_head.height, plan.input_size[1] // cls_head.width],
        "classification_head": [cls_head.height, cls_head.width, cls_head.channels],
        "location_head": [loc_head.height, loc_head.width, loc_head.channels],
        "max_channels": max(r.channels for r in plan.rows),
    }
