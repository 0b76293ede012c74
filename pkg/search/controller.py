"""
Joint search over negative samplers.

Per mini-batch of positives
---------------------------
  1. draw Gumbel noise g from its own stream (fresh per batch, or once per epoch)
  2. every candidate sampler t draws k negatives per positive from its own stream
  3. L_t = mean BPR loss of sampler t's triples
  4. p = softmax((θ + g)/τ); W descends Σ_t p_t ∇L_t (+ L2), θ descends ∂(p·L)/∂θ
     both from the same batch, in the same step
Per epoch: anneal τ, evaluate on valid, snapshot W′ on improvement.
α* = softmax(θ) after the final epoch.
"""

from __future__ import annotations

import time
from typing import List, Optional, Sequence, Union

import numpy as np

from config.errors import DomainError
from config.logger import get_logger
from config.seeding import rng_for
from evaluation.evaluator import RankingEvaluator
from interactions.schemas import DataSplit
from models.bpr import TripleBatch, bpr_grad, triple_losses
from models.params import ModelParams
from samplers.negative import NegativeSampler, make_sampler
from samplers.schemas import SamplerSpec
from search.gumbel import combined_loss, gumbel_noise, hard_selection, selection_probs, theta_grad
from search.schemas import EpochRecord, SearchOptions, SearchOutcome, SearchState
from trainer.loop import BestSnapshot, check_finite, positive_batches
from trainer.optimizer import ModelOptimizer
from trainer.schemas import TrainingConfig

log = get_logger(__name__)


class SearchController:
    """
    Runs the joint W / θ optimisation.

    Usage
    -----
        controller = SearchController(specs, cfg)
        outcome = controller.run(split, params)
        outcome.alpha_star, outcome.best_params
    """

    def __init__(
        self,
        specs:   Sequence[Union[SamplerSpec, str]],
        cfg:     TrainingConfig,
        options: Optional[SearchOptions] = None,
    ):
        self.samplers: List[NegativeSampler] = [make_sampler(s) for s in specs]
        if len(self.samplers) < 2:
            raise DomainError(f"search needs at least 2 candidate samplers, got {len(self.samplers)}")
        self.cfg     = cfg
        self.options = options or SearchOptions()

    @property
    def labels(self) -> List[str]:
        return [s.name for s in self.samplers]

    # ------------------------------------------------------------------
    # Public interface
    # ------------------------------------------------------------------

    def run(
        self,
        ds:     DataSplit,
        params: ModelParams,
        rng:    Optional[np.random.Generator] = None,
    ) -> SearchOutcome:
        cfg = self.cfg
        rng = rng if rng is not None else rng_for(cfg.seed, "search")
        gumbel_rng = rng_for(cfg.seed, "gumbel")
        sampler_rngs = [rng_for(cfg.seed, "sampler", t, s.name) for t, s in enumerate(self.samplers)]
        started = time.perf_counter()

        log.info("=" * 60)
        log.info("Sampler search over %s", ", ".join(self.labels))
        log.info("=" * 60)

        train = ds.train
        work = params.copy()
        work.l2 = cfg.l2
        optimizer = ModelOptimizer.for_params(work, dense=cfg.dense_adam)
        state = SearchState.initial(len(self.samplers), self.options.schedule)
        evaluator = RankingEvaluator(k=cfg.top_k)
        best = BestSnapshot(cfg.best_metric, cfg.patience)
        alpha_at_best = state.alpha
        history: List[EpochRecord] = []

        for epoch in range(cfg.epochs):
            epoch_started = time.perf_counter()
            state.set_epoch(epoch)
            if self.options.gumbel_per_epoch:
                state.gumbel = gumbel_noise(len(self.samplers), gumbel_rng)
            view = work.copy() if cfg.stale_propagation else work

            sums = np.zeros(len(self.samplers))
            combined_sum, n_batches = 0.0, 0
            for b, (users, pos) in enumerate(positive_batches(train, cfg.batch_size, rng)):
                if not self.options.gumbel_per_epoch:
                    state.gumbel = gumbel_noise(len(self.samplers), gumbel_rng)
                losses, combined = self._step(work, view, ds, users, pos, state, optimizer, sampler_rngs, epoch, b)
                sums += losses
                combined_sum += combined
                n_batches += 1

            record = EpochRecord(
                epoch         = epoch,
                tau           = state.tau,
                alpha         = state.alpha.tolist(),
                losses        = (sums / max(n_batches, 1)).tolist(),
                loss          = combined_sum / max(n_batches, 1),
                valid_metrics = {},
                elapsed_ms    = 0.0,
            )

            if (epoch + 1) % cfg.eval_every == 0 or epoch + 1 == cfg.epochs:
                report = evaluator.evaluate_split(work, ds, "valid")
                if best.offer(epoch, work, report):
                    alpha_at_best = state.alpha
                record.valid_metrics = report.as_row()
            record.best_epoch = best.epoch

            record.elapsed_ms = (time.perf_counter() - epoch_started) * 1000.0
            history.append(record)
            log.info(
                "epoch %3d | tau=%.3f | alpha=%s | losses=%s | %s",
                epoch, state.tau, np.round(state.alpha, 4).tolist(),
                np.round(record.losses, 5).tolist(),
                " ".join(f"{k}={v:.4f}" for k, v in record.valid_metrics.items()) or "-",
            )
            if best.should_stop():
                log.info("Early stop after %d evaluation(s) without improvement", best.patience)
                break

        outcome = SearchOutcome(
            samplers    = self.labels,
            alpha_star  = state.alpha,
            alpha_best  = alpha_at_best,
            theta       = state.theta.copy(),
            best_params = best.params if best.params is not None else work.copy(),
            best_epoch  = best.epoch,
            best_valid  = best.report,
            history     = history,
            elapsed_ms  = (time.perf_counter() - started) * 1000.0,
        )
        log.info(
            "Search done | alpha*=%s | selected=%s | best epoch %d | %.0f ms",
            np.round(outcome.alpha_star, 4).tolist(), self.labels[outcome.selected],
            outcome.best_epoch, outcome.elapsed_ms,
        )
        return outcome

    # ------------------------------------------------------------------
    # One joint step
    # ------------------------------------------------------------------

    def _step(self, work, view, ds, users, pos, state, optimizer, sampler_rngs, epoch, b):
        cfg, train = self.cfg, ds.train
        k = cfg.k
        owners = np.repeat(users, k)
        positives = np.repeat(pos, k)

        batches = []
        losses = np.empty(len(self.samplers))
        for t, sampler in enumerate(self.samplers):
            neg = sampler.draw_batch(train, view, train, users, k, sampler_rngs[t]).ravel()
            batches.append((owners, positives, neg))
            losses[t] = float(triple_losses(work, train, owners, positives, neg).mean())
        check_finite(epoch, b, losses)

        p = selection_probs(state.theta, state.gumbel, state.tau)
        weights = hard_selection(p) if self.options.hard_selection else p
        combined = combined_loss(p, losses)

        triples = TripleBatch.concat([
            TripleBatch.uniform(u, i, j, weight=w) for (u, i, j), w in zip(batches, weights)
        ])
        grad_w = bpr_grad(work, train, triples, denominator=owners.size)
        grad_theta = theta_grad(state.theta, state.gumbel, state.tau, losses)

        optimizer.apply(work, grad_w, cfg.lr_w)
        state.opt.apply(state.theta, grad_theta, cfg.lr_theta)

        log.debug("epoch %d batch %d | p=%s | L=%s", epoch, b, np.round(p, 4).tolist(), np.round(losses, 5).tolist())
        return losses, combined


def run_search(
    ds:      DataSplit,
    specs:   Sequence[Union[SamplerSpec, str]],
    params:  ModelParams,
    cfg:     TrainingConfig,
    rng:     Optional[np.random.Generator] = None,
    options: Optional[SearchOptions] = None,
) -> SearchOutcome:
    """Functional form of SearchController.run; `params` is not modified."""
    return SearchController(specs, cfg, options).run(ds, params, rng)
