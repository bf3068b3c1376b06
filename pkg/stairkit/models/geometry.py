"""
Geometry Pydantic Models
Camera rig, clustering/measurement parameters and measurement results
"""

import math
from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

STANDARD_GRAVITY = 9.81


class CameraRig(BaseModel):
    """Pinhole intrinsics plus the gravity vector measured in the camera frame"""
    model_config = ConfigDict(frozen=True)

    fx: float = Field(gt=0)
    fy: float = Field(gt=0)
    cx: float
    cy: float
    # camera frame: x right, y down, z forward
    gravity: Tuple[float, float, float] = (0.0, STANDARD_GRAVITY, 0.0)
    image_dims: Tuple[int, int] = (512, 512)  # (width, height)

    @field_validator("gravity")
    @classmethod
    def nonzero_gravity(cls, value: Tuple[float, float, float]) -> Tuple[float, float, float]:
        if not all(math.isfinite(g) for g in value) or math.hypot(*value) <= 0.0:
            raise ValueError("gravity vector must be finite and nonzero")
        return value

    def with_gravity(self, gravity: Tuple[float, float, float]) -> "CameraRig":
        return self.model_copy(update={"gravity": tuple(float(g) for g in gravity)})

    def to_json_dict(self) -> dict:
        """Rig config file form"""
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "gravity": list(self.gravity),
            "image_dims": list(self.image_dims),
        }


# ============================================================================
# PARAMETERS
# ============================================================================

class ClusterParams(BaseModel):
    """Stair line clustering tolerances"""
    model_config = ConfigDict(frozen=True)

    assign_tolerance: float = Field(default=10.0, gt=0)  # tau, px
    dedupe_tolerance: float = Field(default=4.0, ge=0)  # epsilon, px
    seed_columns: Tuple[int, int] = (7, 8)


class MeasureParams(BaseModel):
    """Knobs of the 2-D grid to metric step measurement pipeline"""
    model_config = ConfigDict(frozen=True)

    conf_threshold: float = Field(default=0.5, ge=0.0, le=1.0)
    omega: float = Field(default=0.05, ge=0.0)
    max_steps: int = Field(default=3, ge=1)
    min_valid_samples: int = Field(default=4, ge=2, le=9)
    depth_mode: Literal["planar", "nearest"] = "planar"
    line_fit: Literal["principal", "two_plane"] = "principal"
    cluster: ClusterParams = Field(default_factory=ClusterParams)


# ============================================================================
# RESULTS
# ============================================================================

class Direction(str, Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


class StepMeasurement(BaseModel):
    """One step; a side is None when the ω filter left it unmatched"""
    width_m: Optional[float] = None
    height_m: Optional[float] = None

    @property
    def complete(self) -> bool:
        return self.width_m is not None and self.height_m is not None


class StairMeasurement(BaseModel):
    """Measured stair: direction and per-step (width, height), nearest first"""
    direction: Optional[Direction] = None
    steps: List[StepMeasurement] = Field(default_factory=list)
    edge_points: List[Tuple[float, float, float]] = Field(default_factory=list)
    yaw_deg: Optional[float] = None
    pitch_deg: Optional[float] = None
    roll_deg: Optional[float] = None
    diagnostics: List[str] = Field(default_factory=list)

    def to_output(self) -> dict:
        """`measure` output document"""
        return {
            "direction": self.direction.value if self.direction else None,
            "steps": [step.model_dump() for step in self.steps],
            "yaw_deg": self.yaw_deg,
            "pitch_deg": self.pitch_deg,
            "roll_deg": self.roll_deg,
        }


class StepError(BaseModel):
    """Absolute and relative error of one measured step"""
    index: int
    width_abs_m: Optional[float] = None
    height_abs_m: Optional[float] = None
    width_rel: Optional[float] = None
    height_rel: Optional[float] = None
