"""
Sequential hyper-parameter sweeps over the standard grids.

  tune_fixed   : lr_w × l2 for one fixed sampler, scored on validation
  tune_search  : lr_theta for a search over given candidates

Cells run one after another so that recorded timings stay comparable.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence, Tuple, Union

import pandas as pd

from config.logger import get_logger
from config.settings import L2_GRID, LR_THETA_GRID, LR_W_GRID
from interactions.schemas import DataSplit
from models.params import ModelParams
from samplers.schemas import SamplerSpec
from search.controller import run_search
from search.schemas import SearchOptions
from trainer.fixed import train_fixed
from trainer.schemas import TrainingConfig

log = get_logger(__name__)


def tune_fixed(
    ds:      DataSplit,
    spec:    Union[SamplerSpec, str],
    params:  ModelParams,
    cfg:     TrainingConfig,
    lr_grid: Sequence[float] = LR_W_GRID,
    l2_grid: Sequence[float] = L2_GRID,
) -> Tuple[pd.DataFrame, TrainingConfig]:
    """Returns (one row per cell, best config by validation metric)."""
    rows = []
    best_cfg, best_value = cfg, float("-inf")
    for lr_w, l2 in itertools.product(lr_grid, l2_grid):
        cell = cfg.model_copy(update={"lr_w": lr_w, "l2": l2})
        result = train_fixed(ds, spec, params, cell)
        value = getattr(result.valid_report, cfg.best_metric) if result.valid_report else float("nan")
        rows.append({"lr_w": lr_w, "l2": l2, f"valid_{cfg.metric_for_best}": value,
                     **result.report.as_row(), "elapsed_ms": result.elapsed_ms})
        log.info("tune lr_w=%g l2=%g -> valid %s=%.4f", lr_w, l2, cfg.metric_for_best, value)
        if value > best_value:
            best_cfg, best_value = cell, value
    return pd.DataFrame(rows), best_cfg


def tune_search(
    ds:       DataSplit,
    specs:    Sequence[Union[SamplerSpec, str]],
    params:   ModelParams,
    cfg:      TrainingConfig,
    lr_grid:  Sequence[float] = LR_THETA_GRID,
    options:  Optional[SearchOptions] = None,
) -> Tuple[pd.DataFrame, TrainingConfig]:
    """Sweep lr_theta; each cell is scored by the search's best validation metric."""
    rows = []
    best_cfg, best_value = cfg, float("-inf")
    for lr_theta in lr_grid:
        cell = cfg.model_copy(update={"lr_theta": lr_theta})
        outcome = run_search(ds, specs, params, cell, options=options)
        value = getattr(outcome.best_valid, cfg.best_metric) if outcome.best_valid else float("nan")
        rows.append({
            "lr_theta": lr_theta,
            f"valid_{cfg.metric_for_best}": value,
            "selected": outcome.samplers[outcome.selected],
            "alpha_star": " ".join(f"{a:.4f}" for a in outcome.alpha_star),
            "elapsed_ms": outcome.elapsed_ms,
        })
        log.info("tune lr_theta=%g -> valid %s=%.4f, selected %s",
                 lr_theta, cfg.metric_for_best, value, rows[-1]["selected"])
        if value > best_value:
            best_cfg, best_value = cell, value
    return pd.DataFrame(rows), best_cfg
