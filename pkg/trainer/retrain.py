"""
Retraining with the searched sampler frozen.

π* = argmax_t α*_t (lowest index on ties, with a warning).  W is initialised
from the search snapshot W′ ("warm") or from a fresh draw with the same seed
label as the original initialisation ("random").
"""

from __future__ import annotations

from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from config.errors import DomainError
from config.logger import get_logger
from interactions.schemas import DataSplit
from models.params import ModelParams, init_params
from samplers.schemas import SamplerSpec
from trainer.fixed import train_fixed
from trainer.schemas import TrainingConfig, TrainResult

log = get_logger(__name__)


class RetrainInit(str, Enum):
    WARM   = "warm"
    RANDOM = "random"


def select_sampler(alpha_star: Sequence[float]) -> int:
    alpha = np.asarray(alpha_star, dtype=np.float64)
    if alpha.ndim != 1 or alpha.size == 0 or np.any(alpha < 0) or abs(alpha.sum() - 1.0) > 1e-6:
        raise DomainError(f"alpha* must lie on the simplex, got {alpha.tolist()}")
    winners = np.flatnonzero(alpha == alpha.max())
    if winners.size > 1:
        log.warning("alpha* ties between samplers %s; taking index %d", winners.tolist(), int(winners[0]))
    return int(winners[0])


def retrain(
    ds:         DataSplit,
    alpha_star: Sequence[float],
    specs:      Sequence[Union[SamplerSpec, str]],
    w_prime:    ModelParams,
    cfg:        TrainingConfig,
    rng:        Optional[np.random.Generator] = None,
    init:       Union[RetrainInit, str] = RetrainInit.WARM,
) -> TrainResult:
    """Train with sampler argmax α* for cfg.retrain_budget epochs and report test metrics."""
    if len(alpha_star) != len(specs):
        raise DomainError(f"alpha* has {len(alpha_star)} entries but {len(specs)} samplers were given")
    if (w_prime.num_users, w_prime.num_items) != (ds.num_users, ds.num_items):
        raise DomainError(
            f"W′ is {w_prime.num_users}×{w_prime.num_items} but the data is {ds.num_users}×{ds.num_items}"
        )

    index = select_sampler(alpha_star)
    spec = specs[index]
    init = RetrainInit(init)

    if init == RetrainInit.WARM:
        start = w_prime
    else:
        start = init_params(
            ds.num_users, ds.num_items, w_prime.dim, w_prime.kind,
            seed=cfg.seed, layers=w_prime.layers, l2=cfg.l2,
        )

    log.info("=" * 60)
    log.info("Retraining with sampler %d (%s), %s init", index, getattr(spec, "label", spec), init.value)
    log.info("=" * 60)
    return train_fixed(ds, spec, start, cfg, rng=rng, epochs=cfg.retrain_budget)
