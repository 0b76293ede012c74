"""
MetricsReport: full-ranking top-K metrics averaged over evaluable users.

  recall     : |topK ∩ truth| / |truth|
  ndcg       : binary-gain DCG / IDCG, log2 discount, IDCG cut at min(K, |truth|)
  precision  : |topK ∩ truth| / K
  hit_ratio  : 1 if any hit else 0
"""

from __future__ import annotations

from typing import Dict, Optional

from pydantic import BaseModel, Field

from config.errors import ConfigError
from config.settings import TOP_K

METRIC_NAMES = ("recall", "ndcg", "precision", "hit_ratio")
_ALIASES = {"hr": "hit_ratio", "hit": "hit_ratio", "hit_ratio": "hit_ratio",
            "recall": "recall", "ndcg": "ndcg", "precision": "precision"}


class MetricsReport(BaseModel):
    k:               int   = TOP_K
    recall:          float = Field(..., ge=0.0, le=1.0)
    ndcg:            float = Field(..., ge=0.0, le=1.0)
    precision:       float = Field(..., ge=0.0, le=1.0)
    hit_ratio:       float = Field(..., ge=0.0, le=1.0)
    users_evaluated: int   = Field(..., ge=0)
    elapsed_ms:      Optional[float] = None

    def metric(self, name: str) -> float:
        """Value for 'recall', 'ndcg@20', 'hr@20', ..."""
        return getattr(self, resolve_metric(name, self.k))

    def as_row(self) -> Dict[str, float]:
        return {
            f"recall@{self.k}":    self.recall,
            f"ndcg@{self.k}":      self.ndcg,
            f"precision@{self.k}": self.precision,
            f"hr@{self.k}":        self.hit_ratio,
        }

    def to_json(self) -> str:
        """Deterministic JSON without wall-clock fields."""
        return self.model_dump_json(indent=2, exclude={"elapsed_ms"})


def resolve_metric(name: str, k: Optional[int] = None) -> str:
    base, _, cutoff = name.strip().lower().partition("@")
    if base not in _ALIASES:
        raise ConfigError(f"unknown metric '{name}'", key="metric_for_best")
    if cutoff and k is not None and int(cutoff) != k:
        raise ConfigError(f"metric '{name}' asks for K={cutoff} but evaluation uses K={k}",
                          key="metric_for_best")
    return _ALIASES[base]
