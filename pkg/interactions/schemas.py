"""
Containers for implicit-feedback interaction data.

Hierarchy
---------
  InteractionDataset        ← positive (user, item) pairs over fixed M × N id spaces
      └─ three of them ─►
  DataSplit                 ← train / valid / test partition sharing M and N

Both are immutable once built: arrays are flagged read-only so that the
same dataset can be shared by samplers, trainers and evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Set, Tuple

import numpy as np
import scipy.sparse as sp

from config.errors import DomainError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class InteractionDataset:
    """
    Positive interaction set D^p over users [0, M) and items [0, N).

    Attributes
    ----------
    num_users, num_items : id-space sizes M and N
    users, items         : aligned pair arrays, sorted by (user, item), no duplicates
    user_ids, item_ids   : original (file) ids of each dense id, when known
    """

    num_users: int
    num_items: int
    users:     np.ndarray
    items:     np.ndarray
    user_ids:  Optional[np.ndarray] = None
    item_ids:  Optional[np.ndarray] = None

    # Derived
    pair_keys:       np.ndarray = field(init=False, repr=False)
    item_popularity: np.ndarray = field(init=False, repr=False)
    _indptr:         np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        users = np.asarray(self.users, dtype=np.int64)
        items = np.asarray(self.items, dtype=np.int64)
        if users.shape != items.shape or users.ndim != 1:
            raise DomainError("users and items must be aligned 1-d arrays")
        if self.num_users < 0 or self.num_items < 0:
            raise DomainError("num_users and num_items must be non-negative")
        if users.size:
            if users.min() < 0 or users.max() >= self.num_users:
                raise DomainError(f"user id out of range [0, {self.num_users})")
            if items.min() < 0 or items.max() >= self.num_items:
                raise DomainError(f"item id out of range [0, {self.num_items})")

        keys = np.unique(users * max(self.num_items, 1) + items)   # sorts + dedups
        users = keys // max(self.num_items, 1)
        items = keys %  max(self.num_items, 1)

        object.__setattr__(self, "users", _frozen(users))
        object.__setattr__(self, "items", _frozen(items))
        object.__setattr__(self, "pair_keys", _frozen(keys))
        object.__setattr__(
            self, "item_popularity",
            _frozen(np.bincount(items, minlength=self.num_items).astype(np.int64)),
        )
        indptr = np.zeros(self.num_users + 1, dtype=np.int64)
        np.cumsum(np.bincount(users, minlength=self.num_users), out=indptr[1:])
        object.__setattr__(self, "_indptr", _frozen(indptr))

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def from_pairs(
        cls,
        pairs:     List[Tuple[int, int]],
        num_users: Optional[int] = None,
        num_items: Optional[int] = None,
    ) -> "InteractionDataset":
        """Build from a list of dense (user, item) tuples; sizes default to max id + 1."""
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        m = num_users if num_users is not None else (int(arr[:, 0].max()) + 1 if len(arr) else 0)
        n = num_items if num_items is not None else (int(arr[:, 1].max()) + 1 if len(arr) else 0)
        return cls(num_users=m, num_items=n, users=arr[:, 0], items=arr[:, 1])

    def subset(self, mask: np.ndarray) -> "InteractionDataset":
        """Same id spaces, only the pairs selected by a boolean mask."""
        return InteractionDataset(
            num_users = self.num_users,
            num_items = self.num_items,
            users     = self.users[mask],
            items     = self.items[mask],
            user_ids  = self.user_ids,
            item_ids  = self.item_ids,
        )

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def __len__(self) -> int:
        return int(self.pair_keys.size)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return zip(self.users.tolist(), self.items.tolist())

    @property
    def positives(self) -> Set[Tuple[int, int]]:
        return set(iter(self))

    def user_items(self, u: int) -> np.ndarray:
        """Sorted I_u."""
        self._check_user(u)
        return self.items[self._indptr[u]:self._indptr[u + 1]]

    def user_degree(self) -> np.ndarray:
        return np.diff(self._indptr)

    def contains(self, users: np.ndarray, items: np.ndarray) -> np.ndarray:
        """Vectorised membership test of (users[b], items[b]) in D^p."""
        keys = np.asarray(users, dtype=np.int64) * max(self.num_items, 1) + np.asarray(items, dtype=np.int64)
        if self.pair_keys.size == 0:
            return np.zeros(keys.shape, dtype=bool)
        pos = np.searchsorted(self.pair_keys, keys)
        pos = np.minimum(pos, self.pair_keys.size - 1)
        return self.pair_keys[pos] == keys

    def candidate_items(self, u: int) -> np.ndarray:
        """I − I_u, sorted."""
        mask = np.ones(self.num_items, dtype=bool)
        mask[self.user_items(u)] = False
        return np.flatnonzero(mask)

    def to_csr(self) -> sp.csr_matrix:
        """M × N binary interaction matrix."""
        data = np.ones(len(self), dtype=np.float64)
        return sp.csr_matrix((data, (self.users, self.items)), shape=(self.num_users, self.num_items))

    def same_interactions(self, other: "InteractionDataset") -> bool:
        return (
            self.num_users == other.num_users
            and self.num_items == other.num_items
            and np.array_equal(self.pair_keys, other.pair_keys)
        )

    def _check_user(self, u: int):
        if not 0 <= u < self.num_users:
            raise DomainError(f"user id {u} out of range [0, {self.num_users})")


@dataclass(frozen=True)
class DataSplit:
    """Train / valid / test partition of one InteractionDataset."""
    train:  InteractionDataset
    valid:  InteractionDataset
    test:   InteractionDataset
    seed:   Optional[int] = None
    ratios: Tuple[int, ...] = (3, 1, 1)

    def __post_init__(self):
        dims = {(d.num_users, d.num_items) for d in (self.train, self.valid, self.test)}
        if len(dims) != 1:
            raise DomainError(f"split parts disagree on (M, N): {sorted(dims)}")

    @property
    def num_users(self) -> int:
        return self.train.num_users

    @property
    def num_items(self) -> int:
        return self.train.num_items

    def sizes(self) -> Tuple[int, int, int]:
        return len(self.train), len(self.valid), len(self.test)

    def exclusion_for(self, part: str) -> List[InteractionDataset]:
        """Datasets whose items are masked when ranking for `part` (valid | test)."""
        if part == "valid":
            return [self.train]
        if part == "test":
            return [self.train, self.valid]
        raise DomainError(f"unknown split part '{part}'")
