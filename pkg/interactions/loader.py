"""
Reading and writing interaction files.

File format
-----------
Two integer columns per line, `user<TAB>item` (any whitespace accepted).
Blank lines and lines starting with `#` are ignored.  Ids in a raw file may
be sparse; load_interactions() re-indexes them densely from 0 and keeps the
original ids on the dataset so they can be persisted next to a split.

Split directory layout (written by write_split)
-----------------------------------------------
  train.tsv | valid.tsv | test.tsv   ← dense ids
  split.json                         ← seed, ratios, sizes, M, N, id maps
"""

from __future__ import annotations

import json
import os
from typing import Optional, Tuple

import numpy as np

from config.errors import DataFormatError, DomainError
from config.logger import get_logger
from interactions.schemas import DataSplit, InteractionDataset

log = get_logger(__name__)

SPLIT_PARTS = ("train", "valid", "test")
SPLIT_MANIFEST = "split.json"


# ---------------------------------------------------------------------------
# Raw parsing
# ---------------------------------------------------------------------------

def read_pairs(path: str) -> Tuple[np.ndarray, np.ndarray]:
    """Parse a two-column integer file; raises DataFormatError with the line number."""
    if not os.path.exists(path):
        raise DomainError(f"interaction file not found: {path}")

    users, items = [], []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = stripped.split()
            if len(tokens) != 2:
                raise DataFormatError(path, line_no, line)
            try:
                u, i = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise DataFormatError(path, line_no, line) from None
            users.append(u)
            items.append(i)

    return np.asarray(users, dtype=np.int64), np.asarray(items, dtype=np.int64)


def _filter_min_count(users: np.ndarray, items: np.ndarray, min_count: int):
    """Drop users/items below min_count until no further removal happens."""
    rounds = 0
    while True:
        _, u_inv, u_cnt = np.unique(users, return_inverse=True, return_counts=True)
        _, i_inv, i_cnt = np.unique(items, return_inverse=True, return_counts=True)
        keep = (u_cnt[u_inv] >= min_count) & (i_cnt[i_inv] >= min_count)
        rounds += 1
        if keep.all():
            break
        users, items = users[keep], items[keep]
        if users.size == 0:
            break
    log.debug("min-count filter reached fixpoint after %d round(s)", rounds)
    return users, items


# ---------------------------------------------------------------------------
# Public interface
# ---------------------------------------------------------------------------

def load_interactions(path: str, min_count: int = 1) -> InteractionDataset:
    """
    Load a raw interaction file into a densely indexed dataset.

    Parameters
    ----------
    path      : two-column integer file
    min_count : users and items with fewer interactions are removed
                iteratively until the filter is stable

    Raises
    ------
    DataFormatError  malformed line
    DomainError      nothing survives the filter
    """
    users, items = read_pairs(path)

    # dedup before counting so repeated lines do not inflate degrees
    if users.size:
        pairs = np.unique(np.stack([users, items], axis=1), axis=0)
        users, items = pairs[:, 0], pairs[:, 1]

    n_raw = users.size
    if min_count > 1:
        users, items = _filter_min_count(users, items, min_count)

    if users.size == 0:
        raise DomainError(
            f"{path}: empty dataset after min_count={min_count} filtering ({n_raw} unique pairs read)"
        )

    user_ids, dense_u = np.unique(users, return_inverse=True)
    item_ids, dense_i = np.unique(items, return_inverse=True)

    ds = InteractionDataset(
        num_users = int(user_ids.size),
        num_items = int(item_ids.size),
        users     = dense_u.reshape(-1),
        items     = dense_i.reshape(-1),
        user_ids  = user_ids,
        item_ids  = item_ids,
    )
    log.info(
        "Loaded %s | users=%d items=%d interactions=%d (dropped %d by min_count=%d)",
        os.path.basename(path), ds.num_users, ds.num_items, len(ds), n_raw - len(ds), min_count,
    )
    return ds


def write_interactions(ds: InteractionDataset, path: str, raw_ids: bool = False) -> str:
    """Write pairs as TSV; dense ids unless raw_ids and an id map is present."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    users, items = ds.users, ds.items
    if raw_ids and ds.user_ids is not None and ds.item_ids is not None:
        users, items = ds.user_ids[users], ds.item_ids[items]
    with open(path, "w", encoding="utf-8") as f:
        for u, i in zip(users.tolist(), items.tolist()):
            f.write(f"{u}\t{i}\n")
    return path


def write_split(split: DataSplit, out_dir: str) -> str:
    """Persist a split as three TSV files plus a JSON sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    for name in SPLIT_PARTS:
        write_interactions(getattr(split, name), os.path.join(out_dir, f"{name}.tsv"))

    train = split.train
    manifest = {
        "seed":      split.seed,
        "ratios":    list(split.ratios),
        "num_users": split.num_users,
        "num_items": split.num_items,
        "sizes":     dict(zip(SPLIT_PARTS, split.sizes())),
        "user_ids":  train.user_ids.tolist() if train.user_ids is not None else None,
        "item_ids":  train.item_ids.tolist() if train.item_ids is not None else None,
    }
    path = os.path.join(out_dir, SPLIT_MANIFEST)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    log.info("Split written to %s | sizes=%s", out_dir, manifest["sizes"])
    return path


def load_split(split_dir: str) -> DataSplit:
    """Inverse of write_split."""
    manifest_path = os.path.join(split_dir, SPLIT_MANIFEST)
    if not os.path.exists(manifest_path):
        raise DomainError(f"no {SPLIT_MANIFEST} in {split_dir}")
    with open(manifest_path, "r", encoding="utf-8") as f:
        manifest = json.load(f)

    m, n = int(manifest["num_users"]), int(manifest["num_items"])
    user_ids = np.asarray(manifest["user_ids"]) if manifest.get("user_ids") is not None else None
    item_ids = np.asarray(manifest["item_ids"]) if manifest.get("item_ids") is not None else None

    parts = {}
    for name in SPLIT_PARTS:
        users, items = read_pairs(os.path.join(split_dir, f"{name}.tsv"))
        parts[name] = InteractionDataset(
            num_users=m, num_items=n, users=users, items=items,
            user_ids=user_ids, item_ids=item_ids,
        )
    return DataSplit(
        train  = parts["train"],
        valid  = parts["valid"],
        test   = parts["test"],
        seed   = manifest.get("seed"),
        ratios = tuple(manifest.get("ratios", (3, 1, 1))),
    )


def is_split_dir(path: Optional[str]) -> bool:
    return bool(path) and os.path.isdir(path) and os.path.exists(os.path.join(path, SPLIT_MANIFEST))
