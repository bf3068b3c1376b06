"""
Measurement API Endpoints
Grid dump + DPTH1 depth upload + rig -> stair direction and step sizes
"""

import logging
from typing import Optional

from fastapi import APIRouter, File, Form, HTTPException, UploadFile
from pydantic import ValidationError

from stairkit.core.dependencies import get_measure_params, to_http_exception
from stairkit.core.errors import FormatError, StairKitError
from stairkit.core.formats import decode_depth, parse_grid_dump
from stairkit.core.geom3d import measure_pipeline
from stairkit.models.api import MeasureResponse
from stairkit.models.geometry import CameraRig

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/", response_model=MeasureResponse)
async def measure(
    depth: UploadFile = File(..., description="DPTH1 depth map"),
    grid: str = Form(..., description="grid dump JSON"),
    rig: str = Form(..., description="rig JSON"),
    conf: Optional[float] = Form(None),
    tau: Optional[float] = Form(None),
    epsilon: Optional[float] = Form(None),
    omega: Optional[float] = Form(None),
    steps: Optional[int] = Form(None),
):
    """
    Run the measurement pipeline on one frame

    Stage failures come back as 409 with the failing stage in the detail.
    """
    try:
        try:
            camera = CameraRig.model_validate_json(rig)
        except ValidationError as e:
            raise FormatError(f"invalid rig: {e.errors()[0]['msg']}")
        detection_grid = parse_grid_dump(grid)
        depth_map = decode_depth(await depth.read())
        params = get_measure_params(conf, tau, epsilon, omega, steps)

        measurement = measure_pipeline(detection_grid, depth_map, camera, params)
        return MeasureResponse(measurement=measurement, result=measurement.to_output())

    except HTTPException:
        raise
    except StairKitError as e:
        logger.warning(f"measurement failed: {e}")
        raise to_http_exception(e)
    except ValidationError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
