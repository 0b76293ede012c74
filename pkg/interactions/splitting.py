"""
Random pair-level train / valid / test split.

Sizing rule
-----------
Every non-train part gets floor(n · r_part / Σr) pairs; train receives the
remainder, so 500 pairs at 3:1:1 → (300, 100, 100) and 7 pairs → (5, 1, 1).
The split is global over pairs (not per user) and happens after filtering.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from config.errors import DomainError
from config.logger import get_logger
from config.seeding import rng_for
from config.settings import SPLIT_RATIOS
from interactions.schemas import DataSplit, InteractionDataset

log = get_logger(__name__)


def split_sizes(n: int, ratios: Sequence[int]) -> tuple:
    total = float(sum(ratios))
    rest = [int(np.floor(n * r / total)) for r in ratios[1:]]
    return (n - sum(rest), *rest)


def split_dataset(
    ds:     InteractionDataset,
    ratios: Sequence[int] = SPLIT_RATIOS,
    seed:   int = 0,
) -> DataSplit:
    """Uniformly random partition of D^p into train / valid / test."""
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise DomainError(f"ratios must be three positive numbers, got {tuple(ratios)}")
    n = len(ds)
    if n < 5:
        raise DomainError(f"need at least 5 interactions to split, got {n}")

    n_train, n_valid, n_test = split_sizes(n, ratios)
    order = rng_for(seed, "split").permutation(n)

    part = np.empty(n, dtype=np.int8)
    part[order[:n_train]]                 = 0
    part[order[n_train:n_train + n_valid]] = 1
    part[order[n_train + n_valid:]]       = 2

    split = DataSplit(
        train  = ds.subset(part == 0),
        valid  = ds.subset(part == 1),
        test   = ds.subset(part == 2),
        seed   = seed,
        ratios = tuple(int(r) for r in ratios),
    )
    log.info("Split %d pairs → train=%d valid=%d test=%d (seed=%d)", n, *split.sizes(), seed)
    return split
