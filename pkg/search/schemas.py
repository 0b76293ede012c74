"""
State and results of one sampler search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from evaluation.schemas import MetricsReport
from models.params import ModelParams
from search.gumbel import TauSchedule, anneal_tau, softmax
from trainer.optimizer import VectorOptimizer


class SearchOptions(BaseModel):
    """Controller switches that are not plain training hyper-parameters."""
    model_config = ConfigDict(frozen=True)

    schedule:         TauSchedule = TauSchedule()
    gumbel_per_epoch: bool        = False
    hard_selection:   bool        = False


@dataclass
class SearchState:
    """Logits θ (α = softmax θ), current τ, latest Gumbel vector and θ's Adam moments."""
    theta:    np.ndarray
    schedule: TauSchedule
    tau:      float
    gumbel:   np.ndarray
    opt:      VectorOptimizer = field(default_factory=VectorOptimizer)

    @classmethod
    def initial(cls, t: int, schedule: TauSchedule) -> "SearchState":
        return cls(
            theta    = np.zeros(t, dtype=np.float64),
            schedule = schedule,
            tau      = anneal_tau(schedule, 0),
            gumbel   = np.zeros(t, dtype=np.float64),
        )

    @property
    def alpha(self) -> np.ndarray:
        return softmax(self.theta)

    def set_epoch(self, epoch: int):
        self.tau = anneal_tau(self.schedule, epoch)


@dataclass
class EpochRecord:
    epoch:         int
    tau:           float
    alpha:         List[float]
    losses:        List[float]
    loss:          float
    valid_metrics: Dict[str, float]
    elapsed_ms:    float
    best_epoch:    int = -1

    def to_dict(self, with_timing: bool = True) -> Dict[str, Any]:
        out = {
            "epoch":         self.epoch,
            "tau":           self.tau,
            "alpha":         self.alpha,
            "losses":        self.losses,
            "loss":          self.loss,
            "valid_metrics": self.valid_metrics,
            "best_epoch":    self.best_epoch,
        }
        if with_timing:
            out["elapsed_ms"] = self.elapsed_ms
        return out


@dataclass
class SearchOutcome:
    """
    alpha_star   : α after the final epoch (used for retraining)
    alpha_best   : α at the best-validation epoch (logged only)
    best_params  : W′, the snapshot with the best validation metric
    """
    samplers:      List[str]
    alpha_star:    np.ndarray
    alpha_best:    np.ndarray
    theta:         np.ndarray
    best_params:   ModelParams
    best_epoch:    int
    best_valid:    Optional[MetricsReport]
    history:       List[EpochRecord]
    elapsed_ms:    float

    @property
    def selected(self) -> int:
        return int(np.argmax(self.alpha_star))

    def alpha_payload(self) -> Dict[str, Any]:
        """Deterministic content of alpha.json."""
        return {
            "samplers":   self.samplers,
            "alpha_star": self.alpha_star.tolist(),
            "alpha_best": self.alpha_best.tolist(),
            "best_epoch": self.best_epoch,
            "selected":   self.samplers[self.selected],
            "epochs_run": len(self.history),
        }
