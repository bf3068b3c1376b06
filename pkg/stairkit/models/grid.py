"""
Grid Pydantic Models
Label records and the grid dump wire format
"""

from enum import IntEnum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class StairClass(IntEnum):
    """Stair line class; UNKNOWN is used for lines decoded from a grid"""
    UNKNOWN = -1
    CONVEX = 0
    CONCAVE = 1


# ============================================================================
# LABEL RECORDS
# ============================================================================

class StairLineLabel(BaseModel):
    """One annotated stair line: cls x1 y1 x2 y2 (left endpoint first)"""
    model_config = ConfigDict(frozen=True)

    cls: StairClass
    x1: float
    y1: float
    x2: float
    y2: float

    @field_validator("cls")
    @classmethod
    def known_class(cls, value: StairClass) -> StairClass:
        if value == StairClass.UNKNOWN:
            raise ValueError("cls must be 0 (convex) or 1 (concave)")
        return value

    @model_validator(mode="after")
    def left_to_right(self) -> "StairLineLabel":
        if self.x1 > self.x2:
            raise ValueError(f"x1 ({self.x1}) > x2 ({self.x2})")
        return self

    @property
    def length(self) -> float:
        return float(((self.x2 - self.x1) ** 2 + (self.y2 - self.y1) ** 2) ** 0.5)

    def to_record(self) -> str:
        """Format back into the label-file form"""
        return f"{int(self.cls)} {self.x1:.6f} {self.y1:.6f} {self.x2:.6f} {self.y2:.6f}"


# ============================================================================
# GRID DUMP
# ============================================================================

class CellDump(BaseModel):
    """One positive cell of a grid dump"""
    i: int = Field(ge=0)
    j: int = Field(ge=0)
    conf: float = Field(ge=0.0, le=1.0)
    coords: List[float] = Field(min_length=8, max_length=8)


class GridDump(BaseModel):
    """Grid dump file: only cells with conf > 0 are listed"""
    rows: int = 32
    cols: int = 16
    image_dims: Tuple[int, int] = (512, 512)
    cells: List[CellDump] = Field(default_factory=list)

    @model_validator(mode="after")
    def cells_inside(self) -> "GridDump":
        for cell in self.cells:
            if cell.i >= self.rows or cell.j >= self.cols:
                raise ValueError(f"cell ({cell.i},{cell.j}) outside {self.rows}x{self.cols} grid")
        return self

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "rows": 32,
                "cols": 16,
                "image_dims": [512, 512],
                "cells": [
                    {"i": 6, "j": 8, "conf": 0.93,
                     "coords": [0.0, 0.25, 1.0, 0.25, 0.0, 0.25, 1.0, 0.25]}
                ],
            }
        }
    )
