"""
StairKit - Loss & Metrics
Multitask loss (fixed and dynamic weights), validation errors, the
alpha/beta update schedule and cell-level detection metrics
"""

import logging
from typing import Iterable, List, Literal, Sequence, Tuple

import numpy as np

from stairkit.core.errors import DimensionMismatchError
from stairkit.core.grid_model import X_SLOTS, Y_SLOTS, DetectionGrid
from stairkit.models.loss import LossBreakdown, LossWeights, MetricReport, ValErrors

logger = logging.getLogger(__name__)

LOG_CLAMP = -100.0  # lower bound of log(p) inside the cross entropy

LossMode = Literal["fixed", "dynamic"]
Gate = Literal["predicted", "ground_truth"]


def binary_cross_entropy(p: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Element-wise BCE with log terms clamped at -100 (exact labels give exactly 0)"""
    with np.errstate(divide="ignore"):
        log_p = np.maximum(np.log(p), LOG_CLAMP)
        log_q = np.maximum(np.log(1.0 - p), LOG_CLAMP)
    return -(target * log_p + (1.0 - target) * log_q)


def _coordinate_l1(pred: DetectionGrid, gt: DetectionGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Per-cell L1 over the 4 abscissas and over the 4 ordinates"""
    diff = np.abs(pred.coords - gt.coords)
    return diff[..., list(X_SLOTS)].sum(axis=-1), diff[..., list(Y_SLOTS)].sum(axis=-1)


def multitask_loss(
    pred: DetectionGrid,
    gt: DetectionGrid,
    weights: LossWeights = LossWeights(),
    mode: LossMode = "dynamic",
    gate: Gate = "ground_truth",
) -> LossBreakdown:
    """
    Classification + location loss averaged over all M x N cells

    dynamic: total = cls + alpha * x_term + beta * y_term
    fixed:   total = cls + lam * (x_term + legacy_alpha * y_term)
    """
    pred.check_same_shape(gt)
    cells = pred.conf.size

    cls_term = float(binary_cross_entropy(pred.conf, gt.conf).sum() / cells)
    x_l1, y_l1 = _coordinate_l1(pred, gt)
    g = gt.conf if gate == "ground_truth" else pred.conf
    x_term = float((g * x_l1).sum() / cells)
    y_term = float((g * y_l1).sum() / cells)

    if mode == "dynamic":
        total = cls_term + weights.alpha * x_term + weights.beta * y_term
    else:
        total = cls_term + weights.lam * (x_term + weights.legacy_alpha * y_term)

    return LossBreakdown(total=total, cls_term=cls_term, x_term=x_term, y_term=y_term)


def coord_errors(preds: Sequence[DetectionGrid], gts: Sequence[DetectionGrid]) -> ValErrors:
    """Summed L1 abscissa/ordinate error of positive ground-truth cells over a validation set"""
    if len(preds) != len(gts):
        raise DimensionMismatchError(f"{len(preds)} predictions vs {len(gts)} ground truths")

    total = ValErrors()
    for pred, gt in zip(preds, gts):
        pred.check_same_shape(gt)
        x_l1, y_l1 = _coordinate_l1(pred, gt)
        total = total + ValErrors(x_error=float((gt.conf * x_l1).sum()), y_error=float((gt.conf * y_l1).sum()))
    return total


# ============================================================================
# DYNAMIC WEIGHTS
# ============================================================================

def update_weights(weights: LossWeights, errors: ValErrors) -> LossWeights:
    """
    One epoch of the alpha/beta schedule

    delta = (X - Y) / max(X, Y); alpha += delta, beta -= delta. If either
    candidate would drop below sigma, neither weight changes. With X = Y = 0
    delta is undefined and the weights are returned unchanged.
    """
    largest = max(errors.x_error, errors.y_error)
    if largest == 0.0:
        return weights

    delta = (errors.x_error - errors.y_error) / largest
    alpha = weights.alpha + delta
    beta = weights.beta - delta
    if alpha < weights.sigma or beta < weights.sigma:
        logger.debug(f"weight update skipped: candidate ({alpha:.4f}, {beta:.4f}) below sigma={weights.sigma}")
        return weights

    return weights.model_copy(update={"alpha": alpha, "beta": beta})


def weight_schedule(trace: Iterable[ValErrors], initial: LossWeights = LossWeights()) -> List[LossWeights]:
    """Weights after each epoch of a validation-error trace"""
    history = []
    weights = initial
    for errors in trace:
        weights = update_weights(weights, errors)
        history.append(weights)
    return history


# ============================================================================
# DETECTION METRICS
# ============================================================================

def detection_counts(pred: DetectionGrid, gt: DetectionGrid, conf_threshold: float = 0.5) -> Tuple[int, int, int]:
    pred.check_same_shape(gt)
    predicted = pred.conf >= conf_threshold
    actual = gt.conf >= 0.5
    tp = int(np.count_nonzero(predicted & actual))
    fp = int(np.count_nonzero(predicted & ~actual))
    fn = int(np.count_nonzero(~predicted & actual))
    return tp, fp, fn


def detection_metrics(pred: DetectionGrid, gt: DetectionGrid, conf_threshold: float = 0.5) -> MetricReport:
    """Cell-level accuracy, recall and IoU at the given confidence"""
    return MetricReport.from_counts(*detection_counts(pred, gt, conf_threshold))


def evaluate_batch(
    preds: Sequence[DetectionGrid], gts: Sequence[DetectionGrid], conf_threshold: float = 0.5
) -> Tuple[MetricReport, List[MetricReport]]:
    """Per-pair reports and their micro-averaged aggregate (counts summed before ratios)"""
    if len(preds) != len(gts):
        raise DimensionMismatchError(f"{len(preds)} predictions vs {len(gts)} ground truths")
    reports = [detection_metrics(p, g, conf_threshold) for p, g in zip(preds, gts)]
    aggregate = MetricReport.from_counts(0, 0, 0)
    for report in reports:
        aggregate = aggregate + report
    return aggregate, reports
