"""
Subcommand implementations behind main.py.

  gen      planted synthetic interaction file
  split    train / valid / test split written as a directory
  train    one fixed sampler
  search   joint sampler search
  retrain  retrain from a search directory
  auto     search then retrain in one run
  grid     every candidate sampler, with timing
  eval     evaluate a checkpoint
  tune     lr_w × l2 sweep (and lr_theta with tune_theta=true)

Each method writes its artifacts into cfg.out_dir and returns the one-line
summary printed by the CLI.
"""

from __future__ import annotations

import os
from typing import Callable, Dict

from config.errors import ConfigError
from config.logger import get_logger
from config.run_config import RunConfig
from evaluation.evaluator import RankingEvaluator
from interactions.loader import is_split_dir, load_interactions, load_split, write_interactions, write_split
from interactions.schemas import DataSplit
from interactions.splitting import split_dataset
from interactions.synthetic import generate_synthetic
from models.params import ModelParams, init_params, load_checkpoint
from pipeline.artifacts import (
    ALPHA, CHECKPOINT, METRICS, RESULTS, SEARCH_CHECKPOINT, TIMING,
    RunArtifacts, load_search_dir,
)
from samplers.schemas import SamplerSpec
from search.controller import run_search
from search.schemas import SearchOutcome
from trainer.grid import (
    comparison_table, grid_search, print_leaderboard, rank_results,
    search_space_average_rank, select_search_space, totals_row,
)
from trainer.fixed import train_fixed
from trainer.retrain import retrain
from trainer.schemas import TrainResult
from trainer.tuning import tune_fixed, tune_search

log = get_logger(__name__)


def _report_payload(report) -> dict:
    return report.model_dump(exclude={"elapsed_ms"})


class ExperimentPipeline:
    """
    One configured run.

    Parameters
    ----------
    cfg     : fully validated RunConfig
    command : subcommand name, recorded in run.json
    """

    def __init__(self, cfg: RunConfig, command: str):
        self.cfg       = cfg
        self.command   = command
        self.training  = cfg.training()
        self.artifacts = RunArtifacts(cfg.out_dir)

    def run(self) -> str:
        handler: Callable[[], str] = getattr(self, f"cmd_{self.command}")
        log.info("=" * 60)
        log.info("Starting %s → %s", self.command, self.cfg.out_dir)
        log.info("=" * 60)
        self.artifacts.write_run_record(self.command, self.cfg.resolved(), self.cfg.seed)
        summary = handler()
        log.info("%s finished", self.command)
        return summary

    # ------------------------------------------------------------------
    # Data commands
    # ------------------------------------------------------------------

    def cmd_gen(self) -> str:
        cfg = self.cfg
        ds = generate_synthetic(cfg.num_users, cfg.num_items, cfg.blocks, cfg.density, cfg.noise, seed=cfg.seed)
        path = write_interactions(ds, self.artifacts.path("synthetic.tsv"))
        return f"gen: {len(ds)} interactions, {ds.num_users} users × {ds.num_items} items → {path}"

    def cmd_split(self) -> str:
        split = self._split()
        out = os.path.join(self.cfg.out_dir, "split")
        write_split(split, out)
        return "split: train=%d valid=%d test=%d → %s" % (*split.sizes(), out)

    # ------------------------------------------------------------------
    # Training commands
    # ------------------------------------------------------------------

    def cmd_train(self) -> str:
        split = self._split()
        spec = self.cfg.sampler_spec()
        result = train_fixed(split, spec, self._init(split), self.training)
        self._write_train_result(result)
        self.artifacts.write_json(TIMING, {"train_ms": result.elapsed_ms})
        return self._summary(f"train[{result.sampler}]", result)

    def cmd_search(self) -> str:
        split = self._split()
        outcome = self._search(split)
        self.artifacts.write_json(TIMING, {"search_ms": outcome.elapsed_ms})
        return (f"search: alpha*={[round(a, 4) for a in outcome.alpha_star]} "
                f"selected={outcome.samplers[outcome.selected]} best_epoch={outcome.best_epoch}")

    def cmd_retrain(self) -> str:
        if not self.cfg.search_dir:
            raise ConfigError("retrain needs search_dir= pointing at a search output", key="search_dir")
        split = self._split()
        payload, w_prime = load_search_dir(self.cfg.search_dir)
        specs = [SamplerSpec.parse(s) for s in payload["samplers"]]
        result = retrain(split, payload["alpha_star"], specs, w_prime, self.training, init=self.cfg.retrain_init)
        self._write_train_result(result)
        self.artifacts.write_json(TIMING, {"retrain_ms": result.elapsed_ms})
        return self._summary(f"retrain[{result.sampler}]", result)

    def cmd_auto(self) -> str:
        split = self._split()
        outcome = self._search(split)
        result = retrain(
            split, outcome.alpha_star.tolist(), self.cfg.sampler_specs(), outcome.best_params,
            self.training, init=self.cfg.retrain_init,
        )
        self._write_train_result(result)
        self.artifacts.write_json(TIMING, {
            "search_ms":  outcome.elapsed_ms,
            "retrain_ms": result.elapsed_ms,
            "total_ms":   outcome.elapsed_ms + result.elapsed_ms,
        })
        return self._summary(f"auto[{result.sampler}]", result)

    def cmd_grid(self) -> str:
        split = self._split()
        specs = self.cfg.sampler_specs()
        grid = grid_search(
            split, specs, self._init(split), self.training,
            jobs=self.cfg.jobs, match_negatives=self.cfg.match_negatives,
        )
        table = grid.table()
        self.artifacts.write_table(RESULTS, totals_row(table, grid.total_elapsed_ms))
        self.artifacts.write_json(METRICS, {r.sampler: _report_payload(r.report) for r in grid.results})
        self.artifacts.write_json(TIMING, {
            "cells":    {r.sampler: r.elapsed_ms for r in grid.results},
            "total_ms": grid.total_elapsed_ms,
            "wall_ms":  grid.wall_ms,
        })

        ranked = rank_results(table)
        chosen = select_search_space(ranked, min(3, len(ranked)))
        self.artifacts.write_json("search_space.json", {
            "ranking":          ranked.drop(columns=["elapsed_ms"]).to_dict(orient="records"),
            "selected":         chosen,
            "average_rank":     search_space_average_rank(ranked, chosen),
        })
        print_leaderboard(table)
        best = ranked.sort_values("avg_rank", kind="mergesort").iloc[0]
        return f"grid: {len(specs)} sampler(s), best={best['sampler']}, total {grid.total_elapsed_ms:.0f} ms"

    def cmd_eval(self) -> str:
        if not self.cfg.checkpoint:
            raise ConfigError("eval needs checkpoint= pointing at a .npz file", key="checkpoint")
        split = self._split()
        params = load_checkpoint(self.cfg.checkpoint)
        report = RankingEvaluator(k=self.training.top_k).evaluate_split(params, split, self.cfg.eval_split)
        self.artifacts.write_json(METRICS, _report_payload(report))
        return (f"eval[{self.cfg.eval_split}]: R@{report.k}={report.recall:.4f} "
                f"N@{report.k}={report.ndcg:.4f} users={report.users_evaluated}")

    def cmd_tune(self) -> str:
        split = self._split()
        params = self._init(split)
        table, best = tune_fixed(split, self.cfg.sampler_spec(), params, self.training)
        self.artifacts.write_table("tune.csv", table)
        payload = {"lr_w": best.lr_w, "l2": best.l2}
        if self.cfg.tune_theta:
            theta_table, best_theta = tune_search(
                split, self.cfg.sampler_specs(), params, best, options=self.cfg.search_options(),
            )
            self.artifacts.write_table("tune_theta.csv", theta_table)
            payload["lr_theta"] = best_theta.lr_theta
        self.artifacts.write_json("tune.json", payload)
        return "tune: best " + " ".join(f"{k}={v:g}" for k, v in payload.items())

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _split(self) -> DataSplit:
        data = self.cfg.require_data()
        if is_split_dir(data):
            return load_split(data)
        if not os.path.exists(data):
            raise ConfigError(f"data path not found: {data}", key="data")
        ds = load_interactions(data, min_count=self.cfg.min_count)
        return split_dataset(ds, self.cfg.ratios(), seed=self.cfg.seed)

    def _init(self, split: DataSplit) -> ModelParams:
        return init_params(
            split.num_users, split.num_items, self.training.dim, self.cfg.model,
            seed=self.cfg.seed, layers=self.cfg.layers, l2=self.training.l2,
        )

    def _search(self, split: DataSplit) -> SearchOutcome:
        outcome = run_search(
            split, self.cfg.sampler_specs(), self._init(split), self.training,
            options=self.cfg.search_options(),
        )
        self.artifacts.write_history(r.to_dict() for r in outcome.history)
        self.artifacts.write_json(ALPHA, outcome.alpha_payload())
        self.artifacts.save_params(outcome.best_params, SEARCH_CHECKPOINT)
        if self.command == "search":
            self.artifacts.write_json(METRICS, _report_payload(outcome.best_valid) if outcome.best_valid else {})
        return outcome

    def _write_train_result(self, result: TrainResult):
        self.artifacts.save_params(result.params, CHECKPOINT)
        self.artifacts.write_json(METRICS, _report_payload(result.report))
        self.artifacts.write_table(RESULTS, comparison_table([result]))
        if self.command in ("train", "retrain"):
            self.artifacts.write_history(result.history)

    @staticmethod
    def _summary(name: str, result: TrainResult) -> str:
        r = result.report
        return (f"{name}: R@{r.k}={r.recall:.4f} N@{r.k}={r.ndcg:.4f} "
                f"P@{r.k}={r.precision:.4f} H@{r.k}={r.hit_ratio:.4f} ({result.elapsed_ms:.0f} ms)")


COMMANDS: Dict[str, str] = {
    "gen":     "write a planted synthetic interaction file",
    "split":   "split interactions into train / valid / test",
    "train":   "train with one fixed sampler",
    "search":  "search sampler weights jointly with the model",
    "retrain": "retrain with the sampler chosen by a previous search",
    "auto":    "search then retrain",
    "grid":    "train every candidate sampler and compare",
    "eval":    "evaluate a checkpoint",
    "tune":    "sweep learning rate and L2 over the standard grids",
}
