"""
API Pydantic Models
Request and response bodies of the v1 routes
"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, Field

from stairkit.models.geometry import ClusterParams, StairMeasurement
from stairkit.models.grid import GridDump
from stairkit.models.loss import LossWeights, MetricReport, ValErrors
from stairkit.models.scene import SceneSpec


class EvalPair(BaseModel):
    """One predicted grid dump and the label-file text it is scored against"""
    name: Optional[str] = None
    pred: GridDump
    gt_labels: str


class EvalRequest(BaseModel):
    pairs: List[EvalPair] = Field(min_length=1)
    conf: Optional[float] = Field(default=None, ge=0.0, le=1.0)

    class Config:
        json_schema_extra = {
            "example": {
                "pairs": [{"name": "frame_0001", "pred": {"cells": []}, "gt_labels": "1 0 100 512 100\n"}],
                "conf": 0.5,
            }
        }


class FileMetrics(BaseModel):
    name: str
    metrics: MetricReport


class EvalResponse(BaseModel):
    aggregate: MetricReport
    files: List[FileMetrics]


class MeasureResponse(BaseModel):
    measurement: StairMeasurement
    result: dict


class SimulateRequest(BaseModel):
    scene: SceneSpec = Field(default_factory=SceneSpec)
    endpoint_noise_px: float = Field(default=0.0, ge=0.0)
    drop_rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    include_depth: bool = False  # depth is large; off by default


class SimulateResponse(BaseModel):
    labels: str
    grid: GridDump
    rig: dict
    scene: SceneSpec
    depth_shape: Tuple[int, int]
    depth: Optional[List[List[float]]] = None


class ScheduleRequest(BaseModel):
    trace: List[ValErrors]
    initial: LossWeights = Field(default_factory=LossWeights)


class ScheduleRow(BaseModel):
    epoch: int
    alpha: float
    beta: float
    x_error: float
    y_error: float


class ClusterRequest(BaseModel):
    grid: GridDump
    conf: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    params: Optional[ClusterParams] = None


class ClusterLine(BaseModel):
    x1: float
    y1: float
    x2: float
    y2: float
    k: float
    b: float
    member_count: int


class PlanRequest(BaseModel):
    input_size: Tuple[int, int] = (512, 512)
    width_factor: float = Field(default=1.0, gt=0)
