"""Item popularity statistics (PNS sampling weights)."""

from __future__ import annotations

from typing import Union

import numpy as np

from config.errors import DomainError
from interactions.schemas import InteractionDataset


def popularity_distribution(
    source: Union[InteractionDataset, np.ndarray, list],
    beta:   float,
) -> np.ndarray:
    """
    p_j = pop_j^β / Σ_s pop_s^β over all items.

    Items with zero popularity get probability exactly 0 (also for β = 0).
    Accepts a dataset or a raw popularity vector.
    """
    pops = source.item_popularity if isinstance(source, InteractionDataset) else np.asarray(source)
    pops = pops.astype(np.float64)
    if not np.isfinite(beta):
        raise DomainError(f"beta must be finite, got {beta}")
    if pops.size == 0 or np.any(pops < 0) or not np.any(pops > 0):
        raise DomainError("popularity vector has no item with positive popularity")

    weights = np.zeros_like(pops)
    pos = pops > 0
    weights[pos] = np.power(pops[pos], beta)
    return weights / weights.sum()
