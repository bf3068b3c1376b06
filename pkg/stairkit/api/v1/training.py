"""
Training API Endpoints
Loss-weight schedule replay and backbone shape plans
"""

from typing import List

from fastapi import APIRouter, HTTPException

from stairkit.core.dependencies import to_http_exception
from stairkit.core.errors import StairKitError
from stairkit.core.fusion_kernels import backbone_shape_plan, plan_summary
from stairkit.core.loss_metrics import weight_schedule
from stairkit.models.api import PlanRequest, ScheduleRequest, ScheduleRow


# ============================================================================
# LOSS SCHEDULE ROUTER
# ============================================================================
schedule_router = APIRouter()


@schedule_router.post("/schedule", response_model=List[ScheduleRow])
async def loss_schedule(request: ScheduleRequest):
    """alpha/beta after each epoch of a validation-error trace"""
    try:
        history = weight_schedule(request.trace, request.initial)
        return [
            ScheduleRow(epoch=n, alpha=w.alpha, beta=w.beta, x_error=e.x_error, y_error=e.y_error)
            for n, (e, w) in enumerate(zip(request.trace, history), start=1)
        ]

    except HTTPException:
        raise
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


# ============================================================================
# SHAPE PLAN ROUTER
# ============================================================================
plan_router = APIRouter()


@plan_router.post("/")
async def shape_plan(request: PlanRequest):
    """Layer table plus summary for an input size and width factor"""
    try:
        plan = backbone_shape_plan(request.input_size, request.width_factor)
        return {
            "summary": plan_summary(plan),
            "rows": [
                {
                    "name": r.name,
                    "branch": r.branch,
                    "shape": [r.height, r.width, r.channels],
                    "stride": list(r.stride),
                }
                for r in plan.rows
            ],
        }

    except HTTPException:
        raise
    except StairKitError as e:
        raise to_http_exception(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
