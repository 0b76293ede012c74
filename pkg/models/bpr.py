"""
BPR loss and its analytic gradients.

Objective for a batch of weighted triples (u, i, j, w):

    L = (1 / den) Σ_b w_b · softplus(−x_b) + (l2 / 2) Σ_{r ∈ R} ‖W_r‖²
    x_b = S(u_b, i_b) − S(u_b, j_b)

`den` defaults to the number of triples (mean reduction).  R is the set of
distinct base rows (users, positives, negatives) of triples with w > 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from interactions.schemas import InteractionDataset
from models.params import ModelKind, ModelParams
from models.scoring import backpropagate_lightgcn, embeddings


def softplus(x):
    return np.logaddexp(0.0, x)


def bpr_loss(pos_score, neg_score):
    """−ln σ(pos − neg), stable for large |pos − neg|."""
    return softplus(np.subtract(neg_score, pos_score))


# ---------------------------------------------------------------------------
# Batches
# ---------------------------------------------------------------------------

@dataclass
class TripleBatch:
    users:   np.ndarray
    pos:     np.ndarray
    neg:     np.ndarray
    weights: np.ndarray

    @classmethod
    def from_list(cls, triples: Iterable[Sequence[float]]) -> "TripleBatch":
        arr = np.asarray(list(triples), dtype=np.float64).reshape(-1, 4)
        return cls(
            users   = arr[:, 0].astype(np.int64),
            pos     = arr[:, 1].astype(np.int64),
            neg     = arr[:, 2].astype(np.int64),
            weights = arr[:, 3],
        )

    @classmethod
    def uniform(cls, users, pos, neg, weight: float = 1.0) -> "TripleBatch":
        users = np.asarray(users, dtype=np.int64)
        return cls(users, np.asarray(pos, dtype=np.int64), np.asarray(neg, dtype=np.int64),
                   np.full(users.shape, float(weight)))

    def __len__(self) -> int:
        return int(self.users.size)

    @staticmethod
    def concat(batches: Sequence["TripleBatch"]) -> "TripleBatch":
        return TripleBatch(
            users   = np.concatenate([b.users for b in batches]),
            pos     = np.concatenate([b.pos for b in batches]),
            neg     = np.concatenate([b.neg for b in batches]),
            weights = np.concatenate([b.weights for b in batches]),
        )


TriplesLike = Union[TripleBatch, Iterable[Sequence[float]]]


def _as_batch(triples: TriplesLike) -> TripleBatch:
    return triples if isinstance(triples, TripleBatch) else TripleBatch.from_list(triples)


@dataclass
class GradAccumulator:
    """
    Sparse per-row gradients.  Rows absent from *_rows carry zero gradient.
    """
    user_rows: np.ndarray
    user_grad: np.ndarray    # len(user_rows) × d
    item_rows: np.ndarray
    item_grad: np.ndarray    # len(item_rows) × d

    def dense(self, num_users: int, num_items: int) -> Tuple[np.ndarray, np.ndarray]:
        d = self.user_grad.shape[1] if self.user_grad.ndim == 2 else self.item_grad.shape[1]
        gu = np.zeros((num_users, d))
        gi = np.zeros((num_items, d))
        gu[self.user_rows] = self.user_grad
        gi[self.item_rows] = self.item_grad
        return gu, gi

    def is_zero(self) -> bool:
        return not (np.any(self.user_grad) or np.any(self.item_grad))


# ---------------------------------------------------------------------------
# Scores and losses
# ---------------------------------------------------------------------------

def _scoring_tables(params: ModelParams, graph: Optional[InteractionDataset]):
    return embeddings(params, graph)


def triple_losses(
    params: ModelParams,
    graph:  Optional[InteractionDataset],
    users:  np.ndarray,
    pos:    np.ndarray,
    neg:    np.ndarray,
    tables: Optional[Tuple[np.ndarray, np.ndarray]] = None,
) -> np.ndarray:
    """Per-triple softplus(−x) without regularisation."""
    u_out, i_out = tables if tables is not None else _scoring_tables(params, graph)
    eu = u_out[users]
    x = np.einsum("bd,bd->b", eu, i_out[pos] - i_out[neg])
    return softplus(-x)


def _reg_rows(batch: TripleBatch) -> Tuple[np.ndarray, np.ndarray]:
    live = batch.weights > 0
    users = np.unique(batch.users[live])
    items = np.unique(np.concatenate([batch.pos[live], batch.neg[live]]))
    return users, items


def bpr_objective(
    params:      ModelParams,
    graph:       Optional[InteractionDataset],
    triples:     TriplesLike,
    denominator: Optional[float] = None,
) -> float:
    """Scalar objective whose gradient bpr_grad returns."""
    batch = _as_batch(triples)
    den = float(len(batch)) if denominator is None else float(denominator)
    if len(batch) == 0:
        return 0.0
    losses = triple_losses(params, graph, batch.users, batch.pos, batch.neg)
    value = float(np.dot(batch.weights, losses)) / den
    if params.l2:
        ru, ri = _reg_rows(batch)
        value += 0.5 * params.l2 * (
            float(np.sum(params.user_emb[ru] ** 2)) + float(np.sum(params.item_emb[ri] ** 2))
        )
    return value


def _accumulate(rows: np.ndarray, values: np.ndarray, d: int) -> Tuple[np.ndarray, np.ndarray]:
    uniq, inv = np.unique(rows, return_inverse=True)
    out = np.zeros((uniq.size, d))
    np.add.at(out, inv.reshape(-1), values)
    return uniq, out


def _merge(rows_a, grad_a, rows_b, grad_b, d) -> Tuple[np.ndarray, np.ndarray]:
    return _accumulate(np.concatenate([rows_a, rows_b]), np.vstack([grad_a, grad_b]), d)


def bpr_grad(
    params:      ModelParams,
    graph:       Optional[InteractionDataset],
    triples:     TriplesLike,
    denominator: Optional[float] = None,
) -> GradAccumulator:
    """
    ∇_W of bpr_objective.

    Each triple contributes w·(σ(x) − 1)/den times ∂x/∂W; for LightGCN the
    output-space gradient is pulled back through the layer average.  L2 adds
    l2·W_r on every distinct base row of a triple with w > 0.
    """
    batch = _as_batch(triples)
    d = params.dim
    empty = GradAccumulator(np.zeros(0, np.int64), np.zeros((0, d)), np.zeros(0, np.int64), np.zeros((0, d)))
    live = batch.weights > 0
    if not np.any(live):
        return empty

    den = float(len(batch)) if denominator is None else float(denominator)
    users, pos, neg, w = batch.users[live], batch.pos[live], batch.neg[live], batch.weights[live]

    u_out, i_out = _scoring_tables(params, graph)
    eu = u_out[users]
    diff = i_out[pos] - i_out[neg]
    x = np.einsum("bd,bd->b", eu, diff)
    coef = (w * (expit(x) - 1.0) / den)[:, None]

    u_rows, u_grad = _accumulate(users, coef * diff, d)
    i_rows, i_grad = _accumulate(np.concatenate([pos, neg]), np.vstack([coef * eu, -coef * eu]), d)

    if params.kind == ModelKind.LIGHTGCN and params.layers > 0:
        gu_out = np.zeros_like(params.user_emb)
        gi_out = np.zeros_like(params.item_emb)
        gu_out[u_rows] = u_grad
        gi_out[i_rows] = i_grad
        gu, gi = backpropagate_lightgcn(graph, params.layers, gu_out, gi_out)
        u_rows = np.flatnonzero(np.any(gu != 0.0, axis=1))
        i_rows = np.flatnonzero(np.any(gi != 0.0, axis=1))
        u_grad, i_grad = gu[u_rows], gi[i_rows]

    if params.l2:
        ru, ri = _reg_rows(batch)
        u_rows, u_grad = _merge(u_rows, u_grad, ru, params.l2 * params.user_emb[ru], d)
        i_rows, i_grad = _merge(i_rows, i_grad, ri, params.l2 * params.item_emb[ri], d)

    return GradAccumulator(u_rows, u_grad, i_rows, i_grad)
