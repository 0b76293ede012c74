"""
Pieces shared by the fixed-sampler loop and the search loop.
"""

from __future__ import annotations

from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from config.errors import TrainingDivergedError
from config.logger import get_logger
from evaluation.schemas import MetricsReport
from interactions.schemas import InteractionDataset
from models.params import ModelParams

log = get_logger(__name__)


def positive_batches(
    ds:         InteractionDataset,
    batch_size: int,
    rng:        np.random.Generator,
) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Shuffled (users, items) mini-batches covering every positive once."""
    order = rng.permutation(len(ds))
    for start in range(0, order.size, batch_size):
        idx = order[start:start + batch_size]
        yield ds.users[idx], ds.items[idx]


def check_finite(epoch: int, batch: int, losses: Sequence[float]):
    if not np.all(np.isfinite(np.asarray(losses, dtype=np.float64))):
        raise TrainingDivergedError(epoch, batch, list(losses))


class BestSnapshot:
    """
    Tracks the best validation report and a copy of W at that point.

    An evaluation counts as an improvement only if it strictly beats the
    current best.  should_stop() turns true after `patience` evaluations
    without improvement.
    """

    def __init__(self, metric: str, patience: Optional[int]):
        self.metric   = metric
        self.patience = patience
        self.params:  Optional[ModelParams]   = None
        self.report:  Optional[MetricsReport] = None
        self.epoch    = -1
        self.value    = -np.inf
        self._stale   = 0

    def offer(self, epoch: int, params: ModelParams, report: MetricsReport) -> bool:
        value = getattr(report, self.metric)
        if value > self.value:
            self.value, self.epoch, self.report = value, epoch, report
            self.params = params.copy()
            self._stale = 0
            return True
        self._stale += 1
        return False

    def should_stop(self) -> bool:
        return self.patience is not None and self._stale >= self.patience
