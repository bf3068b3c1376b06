"""
Scene Pydantic Models
Parametric synthetic stair scenes: geometry plus camera pose
"""

import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from stairkit.models.geometry import CameraRig, Direction


def default_rig() -> CameraRig:
    return CameraRig(fx=460.0, fy=460.0, cx=256.0, cy=256.0)


class SceneSpec(BaseModel):
    """Stair geometry plus camera pose, all in the stair frame"""

    n_steps: int = Field(default=4, ge=1)
    step_width: float = Field(default=0.30, gt=0)  # tread depth along Z_s
    step_height: float = Field(default=0.15, gt=0)  # riser along Y_s
    step_span: float = Field(default=4.0, gt=0)  # lateral extent along X_s
    floor_depth: float = Field(default=6.0, gt=0)  # floor/landing extent outside the flight
    camera_position: Tuple[float, float, float] = (0.0, 1.0, -1.5)
    camera_attitude: Tuple[float, float, float] = (math.radians(15.0), 0.0, 0.0)  # pitch, roll, yaw
    direction: Direction = Direction.ASCENDING
    rig: CameraRig = Field(default_factory=default_rig)
    depth_noise_sigma: float = Field(default=0.005, ge=0)
    depth_quantization: float = Field(default=0.001, ge=0)
    rng_seed: int = 0

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "n_steps": 4,
                "step_width": 0.30,
                "step_height": 0.15,
                "camera_position": [0.0, 1.0, -1.5],
                "camera_attitude": [0.26, 0.0, 0.0],
                "direction": "ascending",
            }
        },
    )

    @property
    def pitch(self) -> float:
        return self.camera_attitude[0]

    @property
    def roll(self) -> float:
        return self.camera_attitude[1]

    @property
    def yaw(self) -> float:
        return self.camera_attitude[2]
