"""
Adam with lazy row updates.

Only rows that receive a non-zero gradient in a step have their moments
decayed and their values moved.  Each row keeps its own step count so that
bias correction is exact the first time a row is touched, however late.
With dense=True every row is updated every step, which is plain Adam.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config.settings import ADAM_BETA1, ADAM_BETA2, ADAM_EPS
from models.bpr import GradAccumulator
from models.params import ModelParams


@dataclass
class OptimizerState:
    m:         np.ndarray
    v:         np.ndarray
    row_steps: np.ndarray
    step:      int   = 0
    beta1:     float = ADAM_BETA1
    beta2:     float = ADAM_BETA2
    eps:       float = ADAM_EPS

    @classmethod
    def like(cls, table: np.ndarray) -> "OptimizerState":
        table = np.atleast_2d(table)
        return cls(
            m         = np.zeros_like(table, dtype=np.float64),
            v         = np.zeros_like(table, dtype=np.float64),
            row_steps = np.zeros(table.shape[0], dtype=np.int64),
        )


def adam_step(
    state: OptimizerState,
    table: np.ndarray,
    rows:  np.ndarray,
    grads: np.ndarray,
    lr:    float,
    dense: bool = False,
) -> np.ndarray:
    """
    Apply one Adam update in place to table[rows] and return the new rows.

    rows must be unique.  In dense mode the sparse gradient is scattered into
    a full zero matrix and every row is stepped.
    """
    rows = np.asarray(rows, dtype=np.int64)
    grads = np.asarray(grads, dtype=np.float64).reshape(rows.size, -1)
    state.step += 1

    if dense:
        full = np.zeros_like(state.m)
        full[rows] = grads
        rows, grads = np.arange(table.shape[0]), full
    else:
        touched = np.any(grads != 0.0, axis=1)
        rows, grads = rows[touched], grads[touched]
        if rows.size == 0:
            return table[rows]

    b1, b2 = state.beta1, state.beta2
    state.row_steps[rows] += 1
    t = state.row_steps[rows][:, None].astype(np.float64)

    m = b1 * state.m[rows] + (1.0 - b1) * grads
    v = b2 * state.v[rows] + (1.0 - b2) * grads * grads
    state.m[rows] = m
    state.v[rows] = v

    m_hat = m / (1.0 - b1 ** t)
    v_hat = v / (1.0 - b2 ** t)
    table[rows] -= lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return table[rows]


@dataclass
class ModelOptimizer:
    """Adam states for both embedding tables of one ModelParams."""
    users: OptimizerState
    items: OptimizerState
    dense: bool = False

    @classmethod
    def for_params(cls, params: ModelParams, dense: bool = False) -> "ModelOptimizer":
        return cls(OptimizerState.like(params.user_emb), OptimizerState.like(params.item_emb), dense)

    @property
    def step(self) -> int:
        return self.users.step

    def apply(self, params: ModelParams, grad: GradAccumulator, lr: float):
        adam_step(self.users, params.user_emb, grad.user_rows, grad.user_grad, lr, self.dense)
        adam_step(self.items, params.item_emb, grad.item_rows, grad.item_grad, lr, self.dense)
        params.touch()


@dataclass
class VectorOptimizer:
    """Adam on a single free vector, used for the search logits."""
    state: Optional[OptimizerState] = field(default=None)

    def apply(self, vector: np.ndarray, grad: np.ndarray, lr: float) -> np.ndarray:
        view = vector.reshape(1, -1)
        if self.state is None:
            self.state = OptimizerState.like(view)
        adam_step(self.state, view, np.array([0]), np.asarray(grad).reshape(1, -1), lr, dense=True)
        return vector
