"""
Pydantic configuration for every training entry point, plus result containers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import (
    BATCH_SIZE, DEFAULT_SEED, EMBEDDING_DIM, EPOCHS, L2, LR_THETA, LR_W,
    NEGATIVES_PER_POSITIVE, PATIENCE, TOP_K,
)
from evaluation.schemas import MetricsReport, resolve_metric
from models.params import ModelParams


class TrainingConfig(BaseModel):
    """Hyper-parameters shared by fixed training, search and retraining."""
    model_config = ConfigDict(frozen=True)

    epochs:            int            = Field(EPOCHS, ge=1)
    batch_size:        int            = Field(BATCH_SIZE, ge=1)
    lr_w:              float          = Field(LR_W, gt=0)
    lr_theta:          float          = Field(LR_THETA, gt=0)
    l2:                float          = Field(L2, ge=0)
    k:                 int            = Field(NEGATIVES_PER_POSITIVE, ge=1)
    dim:               int            = Field(EMBEDDING_DIM, ge=1)
    eval_every:        int            = Field(1, ge=1)
    top_k:             int            = Field(TOP_K, ge=1)
    metric_for_best:   Optional[str]  = None
    patience:          Optional[int]  = Field(PATIENCE, ge=1)
    seed:              int            = DEFAULT_SEED
    retrain_epochs:    Optional[int]  = Field(None, ge=1)
    dense_adam:        bool           = False
    stale_propagation: bool           = False

    @model_validator(mode="before")
    @classmethod
    def default_metric(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("metric_for_best") is None:
            data = {**data, "metric_for_best": f"recall@{data.get('top_k', TOP_K)}"}
        return data

    @field_validator("metric_for_best")
    @classmethod
    def known_metric(cls, v: str) -> str:
        resolve_metric(v)
        return v.lower()

    @model_validator(mode="after")
    def metric_matches_top_k(self) -> "TrainingConfig":
        resolve_metric(self.metric_for_best, self.top_k)
        return self

    @property
    def best_metric(self) -> str:
        """Attribute name on MetricsReport used for best-snapshot tracking."""
        return resolve_metric(self.metric_for_best)

    @property
    def retrain_budget(self) -> int:
        return self.retrain_epochs if self.retrain_epochs is not None else self.epochs


@dataclass
class TrainResult:
    """
    Outcome of one fixed-sampler run.

    params holds the best-validation snapshot; report is its test metrics.
    """
    sampler:      str
    params:       ModelParams
    report:       MetricsReport
    valid_report: Optional[MetricsReport]
    elapsed_ms:   float
    best_epoch:   int
    epochs_run:   int
    history:      List[Dict[str, Any]] = field(default_factory=list)

    def as_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = {"sampler": self.sampler}
        row.update(self.report.as_row())
        row["elapsed_ms"] = self.elapsed_ms
        return row
