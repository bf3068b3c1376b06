"""
Detection API Endpoints
Cell-level evaluation of predicted grids and stair-line clustering
"""

import logging
from typing import List

from fastapi import APIRouter, HTTPException

from stairkit.config import settings
from stairkit.core.dependencies import get_cluster_params, to_http_exception
from stairkit.core.errors import StairKitError
from stairkit.core.formats import dump_to_grid
from stairkit.core.grid_model import labels_to_grid, parse_labels, threshold_grid
from stairkit.core.line_cluster import cluster_grid
from stairkit.core.loss_metrics import evaluate_batch
from stairkit.models.api import ClusterLine, ClusterRequest, EvalRequest, EvalResponse, FileMetrics

logger = logging.getLogger(__name__)


# ============================================================================
# EVALUATION ROUTER
# ============================================================================
eval_router = APIRouter()


@eval_router.post("/", response_model=EvalResponse)
async def evaluate(request: EvalRequest):
    """Accuracy, recall and IoU per pair and micro-averaged over the batch"""
    try:
        conf = settings.CONF_THRESHOLD if request.conf is None else request.conf
        preds, gts, names = [], [], []
        for n, pair in enumerate(request.pairs):
            pred = dump_to_grid(pair.pred)
            try:
                labels = parse_labels(pair.gt_labels, pred.image_dims)
            except StairKitError as e:
                raise e.with_stage(f"labels[{n}]")
            preds.append(pred)
            gts.append(labels_to_grid(labels, (pred.rows, pred.cols), pred.image_dims))
            names.append(pair.name or f"pair_{n}")

        aggregate, reports = evaluate_batch(preds, gts, conf)
        logger.info(f"evaluated {len(reports)} pair(s): iou={aggregate.iou:.4f}")
        return EvalResponse(
            aggregate=aggregate,
            files=[FileMetrics(name=name, metrics=report) for name, report in zip(names, reports)],
        )

    except HTTPException:
        raise
    except StairKitError as e:
        raise to_http_exception(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))


# ============================================================================
# CLUSTER ROUTER
# ============================================================================
cluster_router = APIRouter()


@cluster_router.post("/", response_model=List[ClusterLine])
async def cluster(request: ClusterRequest):
    """Stair lines clustered from a grid dump, top to bottom"""
    try:
        grid = dump_to_grid(request.grid)
        conf = settings.CONF_THRESHOLD if request.conf is None else request.conf
        params = request.params or get_cluster_params()
        lines = cluster_grid(threshold_grid(grid, conf), params)
        return [ClusterLine(**line.to_dict()) for line in lines]

    except HTTPException:
        raise
    except StairKitError as e:
        raise to_http_exception(e)
    except Exception as e:
        raise HTTPException(status_code=500, detail=str(e))
