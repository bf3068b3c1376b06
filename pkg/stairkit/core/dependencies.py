"""
StairKit - Shared Dependencies
Parameter objects built from settings, and the error -> HTTP status mapping
used by the API routers
"""

from typing import Optional

from fastapi import HTTPException, status

from stairkit.config import settings
from stairkit.core.errors import DegenerateGeometryError, InputError, InsufficientDataError, StairKitError
from stairkit.models.geometry import ClusterParams, MeasureParams


def get_cluster_params(
    tau: Optional[float] = None,
    epsilon: Optional[float] = None,
) -> ClusterParams:
    """
    Clustering tolerances: explicit overrides win over settings

    Args:
        tau: assignment tolerance in px
        epsilon: duplicate-pair tolerance in px
    """
    return ClusterParams(
        assign_tolerance=settings.ASSIGN_TOLERANCE_PX if tau is None else tau,
        dedupe_tolerance=settings.DEDUPE_TOLERANCE_PX if epsilon is None else epsilon,
    )


def get_measure_params(
    conf: Optional[float] = None,
    tau: Optional[float] = None,
    epsilon: Optional[float] = None,
    omega: Optional[float] = None,
    steps: Optional[int] = None,
) -> MeasureParams:
    return MeasureParams(
        conf_threshold=settings.CONF_THRESHOLD if conf is None else conf,
        omega=settings.OMEGA_M if omega is None else omega,
        max_steps=settings.MAX_STEPS if steps is None else steps,
        cluster=get_cluster_params(tau, epsilon),
    )


def to_http_exception(error: StairKitError) -> HTTPException:
    """
    Map toolkit errors to HTTP errors

    Returns:
        422 for bad input, 409 for degenerate geometry or insufficient data
        (stage in the detail), 500 otherwise
    """
    detail = {"error": type(error).__name__, "stage": error.stage, "message": error.message}
    if isinstance(error, InputError):
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=detail)
    if isinstance(error, (DegenerateGeometryError, InsufficientDataError)):
        return HTTPException(status_code=status.HTTP_409_CONFLICT, detail=detail)
    return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=detail)
