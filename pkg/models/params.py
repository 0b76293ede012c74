"""
Embedding tables W for the two scoring models, plus checkpoint I/O.

Model kinds
-----------
  mf        : S(u, i) = <e_u, e_i>
  lightgcn  : S(u, i) = <ē_u, ē_i>, ē = layer-averaged propagated embeddings

Checkpoint format
-----------------
NumPy .npz container with keys
  format_version | kind | layers | l2 | num_users | num_items | dim
  user_emb (M × d, row-major) | item_emb (N × d, row-major)
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from config.errors import DomainError
from config.logger import get_logger
from config.seeding import rng_for
from config.settings import CHECKPOINT_FORMAT_VERSION, INIT_STD, LIGHTGCN_LAYERS

log = get_logger(__name__)


class ModelKind(str, Enum):
    MF       = "mf"
    LIGHTGCN = "lightgcn"


@dataclass(eq=False)
class ModelParams:
    """
    Parameters W of one scoring model.

    version is bumped by touch() after every in-place update; cached
    propagated embeddings are keyed on it.
    """
    user_emb: np.ndarray
    item_emb: np.ndarray
    kind:     ModelKind = ModelKind.MF
    layers:   int       = 0
    l2:       float     = 0.0
    version:  int       = 0
    _cache:   dict      = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.kind = ModelKind(self.kind)
        self.user_emb = np.ascontiguousarray(self.user_emb, dtype=np.float64)
        self.item_emb = np.ascontiguousarray(self.item_emb, dtype=np.float64)
        if self.user_emb.ndim != 2 or self.item_emb.ndim != 2:
            raise DomainError("embedding tables must be 2-d")
        if self.user_emb.shape[1] != self.item_emb.shape[1] or self.user_emb.shape[1] < 1:
            raise DomainError(
                f"embedding dims disagree or are empty: {self.user_emb.shape} vs {self.item_emb.shape}"
            )
        if self.layers < 0:
            raise DomainError(f"LightGCN layers must be ≥ 0, got {self.layers}")
        if self.l2 < 0:
            raise DomainError(f"l2 must be ≥ 0, got {self.l2}")
        if self.kind == ModelKind.MF:
            self.layers = 0

    @property
    def dim(self) -> int:
        return int(self.user_emb.shape[1])

    @property
    def num_users(self) -> int:
        return int(self.user_emb.shape[0])

    @property
    def num_items(self) -> int:
        return int(self.item_emb.shape[0])

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.user_emb).all() and np.isfinite(self.item_emb).all())

    def touch(self):
        self.version += 1
        self._cache.clear()

    def copy(self) -> "ModelParams":
        return ModelParams(
            user_emb = self.user_emb.copy(),
            item_emb = self.item_emb.copy(),
            kind     = self.kind,
            layers   = self.layers,
            l2       = self.l2,
        )


def init_params(
    num_users: int,
    num_items: int,
    dim:       int,
    kind:      Union[ModelKind, str] = ModelKind.MF,
    seed:      int = 0,
    layers:    int = LIGHTGCN_LAYERS,
    l2:        float = 0.0,
) -> ModelParams:
    """Gaussian N(0, INIT_STD²) tables; deterministic given seed."""
    if num_users < 1 or num_items < 1 or dim < 1:
        raise DomainError(f"need M, N, d ≥ 1, got ({num_users}, {num_items}, {dim})")
    rng = rng_for(seed, "init")
    return ModelParams(
        user_emb = rng.normal(0.0, INIT_STD, size=(num_users, dim)),
        item_emb = rng.normal(0.0, INIT_STD, size=(num_items, dim)),
        kind     = ModelKind(kind),
        layers   = layers,
        l2       = l2,
    )


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def save_checkpoint(params: ModelParams, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "wb") as f:
        np.savez(
            f,
            format_version = np.int64(CHECKPOINT_FORMAT_VERSION),
            kind           = np.array(params.kind.value),
            layers         = np.int64(params.layers),
            l2             = np.float64(params.l2),
            num_users      = np.int64(params.num_users),
            num_items      = np.int64(params.num_items),
            dim            = np.int64(params.dim),
            user_emb       = params.user_emb,
            item_emb       = params.item_emb,
        )
    log.debug("Checkpoint written: %s", path)
    return path


def load_checkpoint(path: str) -> ModelParams:
    if not os.path.exists(path):
        raise DomainError(f"checkpoint not found: {path}")
    with np.load(path, allow_pickle=False) as z:
        version = int(z["format_version"])
        if version != CHECKPOINT_FORMAT_VERSION:
            raise DomainError(f"unsupported checkpoint format_version {version}")
        params = ModelParams(
            user_emb = z["user_emb"],
            item_emb = z["item_emb"],
            kind     = ModelKind(str(z["kind"])),
            layers   = int(z["layers"]),
            l2       = float(z["l2"]),
        )
        if (params.num_users, params.num_items, params.dim) != (
            int(z["num_users"]), int(z["num_items"]), int(z["dim"])
        ):
            raise DomainError(f"checkpoint {path} header disagrees with its tables")
        if not params.is_finite():
            raise DomainError(f"checkpoint {path} holds non-finite embeddings")
    return params
