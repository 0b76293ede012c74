"""
Exhaustive grid-search baseline and result tables.

Every candidate sampler is trained with train_fixed from the same initial W;
the grid's cost is the sum of the per-sampler wall-clock times.

Output table columns
--------------------
  sampler | recall@K | ndcg@K | precision@K | hr@K | elapsed_ms
rank_results() appends rank_<metric> columns (1 = best, ties share the
minimum rank) and avg_rank.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import pandas as pd

from config.errors import DomainError
from config.logger import get_logger
from interactions.schemas import DataSplit
from models.params import ModelParams
from samplers.schemas import SamplerSpec
from trainer.fixed import train_fixed
from trainer.schemas import TrainingConfig, TrainResult

log = get_logger(__name__)


@dataclass
class GridResult:
    results:          List[TrainResult] = field(default_factory=list)
    total_elapsed_ms: float = 0.0
    wall_ms:          float = 0.0

    def table(self) -> pd.DataFrame:
        return comparison_table(self.results)


def grid_search(
    ds:              DataSplit,
    specs:           Sequence[Union[SamplerSpec, str]],
    params:          ModelParams,
    cfg:             TrainingConfig,
    jobs:            int  = 1,
    match_negatives: bool = False,
) -> GridResult:
    """
    Train one model per sampler spec from identical initial params.

    match_negatives gives each cell k·T negatives per positive, the count a
    search over the same T candidates draws.
    """
    if not specs:
        raise DomainError("grid search needs at least one sampler spec")
    if match_negatives:
        cfg = cfg.model_copy(update={"k": cfg.k * len(specs)})

    log.info("=" * 60)
    log.info("Grid search over %d sampler(s), jobs=%d, k=%d", len(specs), jobs, cfg.k)
    log.info("=" * 60)

    started = time.perf_counter()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda s: train_fixed(ds, s, params, cfg), specs))
    else:
        results = [train_fixed(ds, s, params, cfg) for s in specs]

    grid = GridResult(
        results          = results,
        total_elapsed_ms = sum(r.elapsed_ms for r in results),
        wall_ms          = (time.perf_counter() - started) * 1000.0,
    )
    log.info("Grid done | total %.0f ms over %d cell(s)", grid.total_elapsed_ms, len(results))
    return grid


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def comparison_table(results: Sequence[TrainResult]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in results])


def metric_columns(table: pd.DataFrame) -> List[str]:
    return [c for c in table.columns if "@" in c and not c.startswith("rank_")]


def rank_results(table: pd.DataFrame) -> pd.DataFrame:
    """Per-metric rank (1 = best, ties share the minimum) and their mean."""
    out = table.copy()
    cols = metric_columns(table)
    for col in cols:
        out[f"rank_{col}"] = out[col].rank(ascending=False, method="min").astype(int)
    out["avg_rank"] = out[[f"rank_{c}" for c in cols]].mean(axis=1)
    return out


def select_search_space(table: pd.DataFrame, t: int) -> List[str]:
    """The t best samplers by average rank; earlier rows win ties."""
    if not 1 <= t <= len(table):
        raise DomainError(f"cannot select {t} of {len(table)} samplers")
    ranked = table if "avg_rank" in table.columns else rank_results(table)
    ordered = ranked.sort_values("avg_rank", kind="mergesort")
    return ordered["sampler"].head(t).tolist()


def search_space_average_rank(table: pd.DataFrame, samplers: Sequence[str]) -> float:
    ranked = table if "avg_rank" in table.columns else rank_results(table)
    missing = set(samplers) - set(ranked["sampler"])
    if missing:
        raise DomainError(f"samplers not in the table: {sorted(missing)}")
    return float(ranked.loc[ranked["sampler"].isin(samplers), "avg_rank"].mean())


def totals_row(table: pd.DataFrame, total_elapsed_ms: float) -> pd.DataFrame:
    """Append the 'total' accounting row used in results.csv."""
    row = {c: float("nan") for c in table.columns}
    row["sampler"] = "total"
    row["elapsed_ms"] = total_elapsed_ms
    return pd.concat([table, pd.DataFrame([row])], ignore_index=True)


def print_leaderboard(table: pd.DataFrame, title: str = "SAMPLER LEADERBOARD"):
    sep = "═" * 65
    print(f"\n{sep}")
    print(f"  AUTOSAMPLE · {title}")
    print(sep)
    ranked = rank_results(table)
    display = ["sampler"] + metric_columns(table) + ["avg_rank", "elapsed_ms"]
    print(ranked[[c for c in display if c in ranked.columns]].to_string(index=False, float_format="%.4f"))
    print(sep)
