"""
Full-ranking evaluation of a scoring model.

Protocol
--------
For every user with a non-empty ground-truth set in the evaluated split:
  1. score all N items
  2. mask the user's training items (and validation items when evaluating test)
  3. take the top-K of the rest, ties by lowest item id
  4. compute recall / ndcg / precision / hit ratio
Users without truth are skipped, not counted as zero.  Means use math.fsum
so that chunked and per-user reductions agree.
"""

from __future__ import annotations

import math
import time
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from config.errors import DomainError
from config.logger import get_logger
from config.settings import EVAL_CHUNK_USERS, TOP_K
from evaluation.metrics import discounts
from evaluation.schemas import MetricsReport
from interactions.schemas import DataSplit, InteractionDataset
from models.params import ModelParams
from models.scoring import score_users

log = get_logger(__name__)


class RankingEvaluator:
    """
    Computes MetricsReport for one model on one split part.

    Usage
    -----
        evaluator = RankingEvaluator(k=20)
        report = evaluator.evaluate(params, graph=split.train, truth=split.test,
                                    also_exclude=[split.valid])
        report = evaluator.evaluate_split(params, split, "valid")
    """

    def __init__(self, k: int = TOP_K, chunk_users: int = EVAL_CHUNK_USERS):
        if k < 1:
            raise DomainError(f"K must be ≥ 1, got {k}")
        self.k           = k
        self.chunk_users = chunk_users

    # ------------------------------------------------------------------
    # Public interface
    # ------------------------------------------------------------------

    def evaluate(
        self,
        params:        ModelParams,
        graph:         InteractionDataset,
        truth:         InteractionDataset,
        also_exclude:  Sequence[InteractionDataset] = (),
        exclude_graph: bool = True,
    ) -> MetricsReport:
        started = time.perf_counter()
        if (truth.num_users, truth.num_items) != (graph.num_users, graph.num_items):
            raise DomainError("evaluated split and graph disagree on (M, N)")
        for extra in also_exclude:
            if (extra.num_users, extra.num_items) != (graph.num_users, graph.num_items):
                raise DomainError(
                    f"exclusion set is {extra.num_users}×{extra.num_items} but the graph is "
                    f"{graph.num_users}×{graph.num_items}"
                )

        excluded = [graph] if exclude_graph else []
        excluded += list(also_exclude)
        mask_mat = self._exclusion_matrix(excluded, graph.num_users, graph.num_items)

        truth_deg = truth.user_degree()
        users = np.flatnonzero(truth_deg > 0)

        per_user = {name: [] for name in ("recall", "ndcg", "precision", "hit_ratio")}
        disc = discounts(self.k)
        idcg_table = np.cumsum(disc)
        skipped = 0

        for start in range(0, users.size, self.chunk_users):
            chunk = users[start:start + self.chunk_users]
            scores = score_users(params, graph, chunk)
            blocked = mask_mat[chunk].toarray() > 0
            scores = np.where(blocked, -np.inf, scores)

            n_cand = graph.num_items - blocked.sum(axis=1)
            order = np.argsort(-scores, axis=1, kind="stable")[:, :self.k]
            valid = np.arange(order.shape[1])[None, :] < n_cand[:, None]

            owners = np.repeat(chunk, order.shape[1])
            hits = truth.contains(owners, order.ravel()).reshape(order.shape) & valid

            keep = n_cand > 0
            skipped += int((~keep).sum())
            n_hit = hits.sum(axis=1)
            n_truth = truth_deg[chunk]
            dcg = (hits * disc[None, :order.shape[1]]).sum(axis=1)
            idcg = idcg_table[np.minimum(self.k, n_truth) - 1]

            per_user["recall"].extend((n_hit / n_truth)[keep].tolist())
            per_user["precision"].extend((n_hit / self.k)[keep].tolist())
            per_user["hit_ratio"].extend((n_hit > 0).astype(float)[keep].tolist())
            per_user["ndcg"].extend(np.minimum(dcg / idcg, 1.0)[keep].tolist())

        if skipped:
            log.warning("%d user(s) had no rankable candidates and were skipped", skipped)
        n_eval = len(per_user["recall"])
        if n_eval == 0:
            raise DomainError("no evaluable users: every user has empty truth or no candidates")

        report = MetricsReport(
            k               = self.k,
            recall          = math.fsum(per_user["recall"]) / n_eval,
            ndcg            = math.fsum(per_user["ndcg"]) / n_eval,
            precision       = math.fsum(per_user["precision"]) / n_eval,
            hit_ratio       = math.fsum(per_user["hit_ratio"]) / n_eval,
            users_evaluated = n_eval,
            elapsed_ms      = (time.perf_counter() - started) * 1000.0,
        )
        self._log_result(report)
        return report

    def evaluate_split(self, params: ModelParams, split: DataSplit, part: str) -> MetricsReport:
        """Evaluate on 'valid' (train masked) or 'test' (train + valid masked)."""
        excluded = split.exclusion_for(part)
        truth = getattr(split, part)
        return self.evaluate(params, graph=split.train, truth=truth, also_exclude=excluded[1:])

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    @staticmethod
    def _exclusion_matrix(parts: Sequence[InteractionDataset], m: int, n: int) -> sp.csr_matrix:
        mat = sp.csr_matrix((m, n), dtype=np.float64)
        for ds in parts:
            mat = mat + ds.to_csr()
        return mat.tocsr()

    def _log_result(self, r: MetricsReport):
        log.debug(
            "  users=%d | R@%d=%.4f | N@%d=%.4f | P@%d=%.4f | H@%d=%.4f",
            r.users_evaluated, r.k, r.recall, r.k, r.ndcg, r.k, r.precision, r.k, r.hit_ratio,
        )


def evaluate(
    params:        ModelParams,
    graph:         InteractionDataset,
    split:         InteractionDataset,
    also_exclude:  Sequence[InteractionDataset] = (),
    k:             int = TOP_K,
    exclude_graph: bool = True,
) -> MetricsReport:
    """Functional form of RankingEvaluator.evaluate."""
    return RankingEvaluator(k=k).evaluate(
        params, graph=graph, truth=split, also_exclude=also_exclude, exclude_graph=exclude_graph,
    )
