"""
Scoring functions S(u, i | W).

MF scores with the raw tables.  LightGCN first propagates the stacked
(M + N) × d table over the symmetric-normalised bipartite adjacency

    Â = D^{-1/2} A D^{-1/2},   A = [[0, R], [Rᵀ, 0]]

and averages the layer outputs E^(0..L), E^(k+1) = Â E^(k).  Nodes with
degree 0 get all-zero rows in Â.  Â is symmetric, so the same operator
carries gradients back to the base tables.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.sparse as sp

from config.errors import DomainError
from interactions.schemas import InteractionDataset
from models.params import ModelKind, ModelParams

_ADJ_CACHE: "weakref.WeakKeyDictionary[InteractionDataset, sp.csr_matrix]" = weakref.WeakKeyDictionary()


@dataclass
class PropagatedEmbeddings:
    user_out: np.ndarray     # M × d
    item_out: np.ndarray     # N × d


def normalized_adjacency(graph: InteractionDataset) -> sp.csr_matrix:
    """Â over the (M + N)-node user-item graph, cached per dataset object."""
    cached = _ADJ_CACHE.get(graph)
    if cached is not None:
        return cached

    m, n = graph.num_users, graph.num_items
    r = graph.to_csr()
    adj = sp.bmat([[None, r], [r.T, None]], format="csr", dtype=np.float64)
    if adj.shape != (m + n, m + n):            # bmat drops shape when R is empty
        adj = sp.csr_matrix((m + n, m + n), dtype=np.float64)

    deg = np.asarray(adj.sum(axis=1)).ravel()
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    d = sp.diags(inv_sqrt)
    norm = (d @ adj @ d).tocsr()

    _ADJ_CACHE[graph] = norm
    return norm


def _layer_average(adj: sp.csr_matrix, stacked: np.ndarray, layers: int) -> np.ndarray:
    acc = stacked.copy()
    cur = stacked
    for _ in range(layers):
        cur = adj @ cur
        acc += cur
    if layers:
        acc /= (layers + 1)
    return acc


def propagate_lightgcn(
    params: ModelParams,
    graph:  InteractionDataset,
    layers: Optional[int] = None,
) -> PropagatedEmbeddings:
    """Layer-averaged LightGCN embeddings; layers=0 passes the tables through."""
    L = params.layers if layers is None else layers
    if L < 0:
        raise DomainError(f"layers must be ≥ 0, got {L}")
    if L == 0:
        return PropagatedEmbeddings(params.user_emb.copy(), params.item_emb.copy())
    _check_graph(params, graph)

    stacked = np.vstack([params.user_emb, params.item_emb])
    out = _layer_average(normalized_adjacency(graph), stacked, L)
    return PropagatedEmbeddings(out[:params.num_users], out[params.num_users:])


def backpropagate_lightgcn(
    graph:      InteractionDataset,
    layers:     int,
    grad_users: np.ndarray,
    grad_items: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Pull output gradients back onto the base tables (Â symmetric ⇒ same operator)."""
    m = grad_users.shape[0]
    if layers == 0:
        return grad_users, grad_items
    stacked = np.vstack([grad_users, grad_items])
    back = _layer_average(normalized_adjacency(graph), stacked, layers)
    return back[:m], back[m:]


def embeddings(params: ModelParams, graph: Optional[InteractionDataset]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Scoring-space embeddings (user_out, item_out).

    MF returns the live tables.  LightGCN results are cached on the params
    until the next touch(), so several samplers in one step share one pass.
    """
    if params.kind == ModelKind.MF or params.layers == 0:
        return params.user_emb, params.item_emb
    if graph is None:
        raise DomainError("LightGCN scoring needs the training graph")
    key = ("lightgcn", id(graph), params.version)
    hit = params._cache.get(key)
    if hit is None:
        prop = propagate_lightgcn(params, graph)
        hit = (prop.user_out, prop.item_out)
        params._cache.clear()
        params._cache[key] = hit
    return hit


def score(params: ModelParams, graph: Optional[InteractionDataset], u: int, i: int) -> float:
    """S(u, i | W)."""
    if not 0 <= u < params.num_users:
        raise DomainError(f"user id {u} out of range [0, {params.num_users})")
    if not 0 <= i < params.num_items:
        raise DomainError(f"item id {i} out of range [0, {params.num_items})")
    users, items = embeddings(params, graph)
    return float(users[u] @ items[i])


def score_users(params: ModelParams, graph: Optional[InteractionDataset], users: np.ndarray) -> np.ndarray:
    """|users| × N score matrix."""
    u_out, i_out = embeddings(params, graph)
    return u_out[np.asarray(users, dtype=np.int64)] @ i_out.T


def _check_graph(params: ModelParams, graph: Optional[InteractionDataset]):
    if graph is None:
        raise DomainError("LightGCN propagation needs the training graph")
    if (graph.num_users, graph.num_items) != (params.num_users, params.num_items):
        raise DomainError(
            f"graph is {graph.num_users}×{graph.num_items} but params are "
            f"{params.num_users}×{params.num_items}"
        )
