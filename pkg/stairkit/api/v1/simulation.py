"""
Simulation API Endpoints
"""

import logging

from fastapi import APIRouter, HTTPException

from stairkit.core.dependencies import to_http_exception
from stairkit.core.errors import StairKitError
from stairkit.core.formats import grid_to_dump
from stairkit.core.grid_model import format_labels
from stairkit.core.synth_scene import simulate
from stairkit.models.api import SimulateRequest, SimulateResponse

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/", response_model=SimulateResponse)
async def simulate_scene(request: SimulateRequest):
    """
    Synthetic stair frame: labels, grid dump, rig with gravity and depth
    (depth values only when include_depth is set)
    """
    try:
        frame = simulate(request.scene, request.endpoint_noise_px, request.drop_rate)
        return SimulateResponse(
            labels=format_labels(frame.labels),
            grid=grid_to_dump(frame.grid),
            rig=frame.rig.to_json_dict(),
            scene=request.scene,
            depth_shape=frame.depth.shape,
            depth=frame.depth.tolist() if request.include_depth else None,
        )

    except HTTPException:
        raise
    except StairKitError as e:
        raise to_http_exception(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
