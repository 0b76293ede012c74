"""
Fixed-sampler BPR training.

Flow
----
1. copy the initial W and attach cfg.l2
2. per epoch: shuffle positives, draw k negatives per positive from the
   sampler, descend the mean BPR + L2 gradient with lazy Adam
3. every eval_every epochs: evaluate on valid, keep the best snapshot,
   stop after `patience` evaluations without improvement
4. report test metrics of the best snapshot
"""

from __future__ import annotations

import time
from typing import Optional, Union

import numpy as np

from config.logger import get_logger
from config.seeding import rng_for
from evaluation.evaluator import RankingEvaluator
from interactions.schemas import DataSplit
from models.bpr import TripleBatch, bpr_grad, triple_losses
from models.params import ModelParams
from samplers.negative import make_sampler
from samplers.schemas import SamplerSpec
from trainer.loop import BestSnapshot, check_finite, positive_batches
from trainer.optimizer import ModelOptimizer
from trainer.schemas import TrainingConfig, TrainResult

log = get_logger(__name__)


def train_fixed(
    ds:     DataSplit,
    spec:   Union[SamplerSpec, str],
    params: ModelParams,
    cfg:    TrainingConfig,
    rng:    Optional[np.random.Generator] = None,
    epochs: Optional[int] = None,
) -> TrainResult:
    """
    Train W with one sampler.  `params` is not modified.

    rng drives both shuffling and negative draws; by default it is derived
    from cfg.seed and the sampler label.
    """
    sampler = make_sampler(spec)
    rng = rng if rng is not None else rng_for(cfg.seed, "train", sampler.name)
    epochs = epochs if epochs is not None else cfg.epochs
    started = time.perf_counter()

    train = ds.train
    work = params.copy()
    work.l2 = cfg.l2
    optimizer = ModelOptimizer.for_params(work, dense=cfg.dense_adam)
    evaluator = RankingEvaluator(k=cfg.top_k)
    best = BestSnapshot(cfg.best_metric, cfg.patience)
    history = []

    log.info("Training %s with %s for up to %d epoch(s)", work.kind.value, sampler.name, epochs)

    epochs_run = 0
    for epoch in range(epochs):
        view = work.copy() if cfg.stale_propagation else work
        losses = []
        for b, (users, pos) in enumerate(positive_batches(train, cfg.batch_size, rng)):
            neg = sampler.draw_batch(train, view, train, users, cfg.k, rng)
            triples = TripleBatch.uniform(np.repeat(users, cfg.k), np.repeat(pos, cfg.k), neg.ravel())

            batch_loss = float(triple_losses(work, train, triples.users, triples.pos, triples.neg).mean())
            check_finite(epoch, b, [batch_loss])
            losses.append(batch_loss)

            optimizer.apply(work, bpr_grad(work, train, triples), cfg.lr_w)
            log.debug("epoch %d batch %d | loss=%.5f", epoch, b, batch_loss)

        epochs_run = epoch + 1
        record = {"epoch": epoch, "loss": float(np.mean(losses)) if losses else 0.0}

        if epochs_run % cfg.eval_every == 0 or epochs_run == epochs:
            report = evaluator.evaluate_split(work, ds, "valid")
            best.offer(epoch, work, report)
            record["valid_metrics"] = report.as_row()
            log.info(
                "epoch %3d | loss=%.5f | %s=%.4f | best=%.4f@%d",
                epoch, record["loss"], cfg.metric_for_best, getattr(report, cfg.best_metric),
                best.value, best.epoch,
            )
            history.append(record)
            if best.should_stop():
                log.info("Early stop after %d evaluation(s) without improvement", best.patience)
                break
        else:
            history.append(record)

    final = best.params if best.params is not None else work
    test_report = evaluator.evaluate_split(final, ds, "test")
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    log.info(
        "%s done | best epoch %d | test R@%d=%.4f N@%d=%.4f | %.0f ms",
        sampler.name, best.epoch, cfg.top_k, test_report.recall, cfg.top_k, test_report.ndcg, elapsed_ms,
    )
    return TrainResult(
        sampler      = sampler.name,
        params       = final,
        report       = test_report,
        valid_report = best.report,
        elapsed_ms   = elapsed_ms,
        best_epoch   = best.epoch,
        epochs_run   = epochs_run,
        history      = history,
    )
