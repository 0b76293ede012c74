"""Per-user top-K ranking and metrics."""

from __future__ import annotations

from typing import Iterable, Optional, Set, Tuple

import numpy as np

from config.errors import DomainError
from interactions.schemas import InteractionDataset
from models.params import ModelParams
from models.scoring import score_users


def discounts(k: int) -> np.ndarray:
    """1 / log2(r + 2) for zero-based ranks r < k."""
    return 1.0 / np.log2(np.arange(k, dtype=np.float64) + 2.0)


def topk_from_scores(scores: np.ndarray, exclude: Iterable[int], k: int) -> np.ndarray:
    """Top-k ids by score over items not in exclude; ties by lowest id."""
    scores = np.asarray(scores, dtype=np.float64)
    mask = np.ones(scores.size, dtype=bool)
    excl = np.fromiter(exclude, dtype=np.int64) if not isinstance(exclude, np.ndarray) else exclude
    mask[excl] = False
    cands = np.flatnonzero(mask)
    if cands.size == 0:
        raise DomainError("empty candidate pool: every item is excluded")
    order = cands[np.lexsort((cands, -scores[cands]))]
    return order[:k]


def rank_topk(
    params:  ModelParams,
    graph:   Optional[InteractionDataset],
    u:       int,
    exclude: Iterable[int],
    k:       int,
) -> np.ndarray:
    """Top-k items for user u by S(u, ·), skipping `exclude`."""
    if not 0 <= u < params.num_users:
        raise DomainError(f"user id {u} out of range [0, {params.num_users})")
    return topk_from_scores(score_users(params, graph, [u])[0], exclude, k)


def metrics_for_user(topk: Iterable[int], truth: Set[int], k: int) -> Tuple[float, float, float, float]:
    """(recall, ndcg, precision, hit) for one ranked list."""
    truth = set(truth)
    if not truth:
        raise DomainError("empty ground truth; skip this user")
    ranked = list(topk)[:k]
    hits = np.array([item in truth for item in ranked], dtype=bool)
    n_hit = int(hits.sum())

    disc = discounts(k)
    dcg  = float(disc[:len(ranked)][hits].sum())
    idcg = float(disc[:min(k, len(truth))].sum())

    recall    = n_hit / len(truth)
    precision = n_hit / k
    hit       = 1.0 if n_hit > 0 else 0.0
    ndcg      = min(dcg / idcg, 1.0)
    return recall, ndcg, precision, hit
