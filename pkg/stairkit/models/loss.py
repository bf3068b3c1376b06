"""
Loss Pydantic Models
Loss weights, loss breakdowns, validation errors and detection metrics
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class LossWeights(BaseModel):
    """Location-loss weights; alpha/beta start at 10 when training begins"""
    model_config = ConfigDict(frozen=True)

    alpha: float = 10.0  # abscissa weight
    beta: float = 10.0  # ordinate weight
    sigma: float = Field(default=0.5, gt=0)  # floor
    lam: float = 4.0  # classification/location tradeoff, fixed mode
    legacy_alpha: float = 4.0  # ordinate weight, fixed mode

    @model_validator(mode="after")
    def above_floor(self) -> "LossWeights":
        if self.alpha < self.sigma or self.beta < self.sigma:
            raise ValueError(f"alpha/beta must be >= sigma ({self.sigma})")
        return self


class LossBreakdown(BaseModel):
    """Multitask loss and its terms"""
    total: float = Field(ge=0)
    cls_term: float = Field(ge=0)
    x_term: float = Field(ge=0)
    y_term: float = Field(ge=0)


class ValErrors(BaseModel):
    """Summed L1 coordinate errors over positive ground-truth cells"""
    model_config = ConfigDict(frozen=True)

    x_error: float = Field(default=0.0, ge=0)
    y_error: float = Field(default=0.0, ge=0)

    def __add__(self, other: "ValErrors") -> "ValErrors":
        return ValErrors(x_error=self.x_error + other.x_error, y_error=self.y_error + other.y_error)


class MetricReport(BaseModel):
    """Cell-level detection counts and ratios"""
    tp: int = Field(ge=0)
    fp: int = Field(ge=0)
    fn: int = Field(ge=0)
    accuracy: float = Field(ge=0, le=1)
    recall: float = Field(ge=0, le=1)
    iou: float = Field(ge=0, le=1)

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "MetricReport":
        """Ratios from counts; a ratio whose denominator is 0 is 1 (nothing to get wrong)"""

        def ratio(num: int, den: int) -> float:
            return 1.0 if den == 0 else num / den

        return cls(
            tp=tp,
            fp=fp,
            fn=fn,
            accuracy=ratio(tp, tp + fp),
            recall=ratio(tp, tp + fn),
            iou=ratio(tp, tp + fp + fn),
        )

    def __add__(self, other: "MetricReport") -> "MetricReport":
        return MetricReport.from_counts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)
