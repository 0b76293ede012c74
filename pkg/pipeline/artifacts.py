"""
Run directory layout and writers.

Output files
------------
<out_dir>/run.json                 ← resolved config, seed, version (every command)
<out_dir>/metrics.json             ← MetricsReport(s), no wall-clock
<out_dir>/alpha.json               ← α* and α at the best epoch (search / auto)
<out_dir>/history.jsonl            ← one JSON record per epoch
<out_dir>/results.csv              ← sampler,recall@K,ndcg@K,precision@K,hr@K,elapsed_ms
<out_dir>/timing.json              ← wall-clock accounting
<out_dir>/checkpoint.npz           ← final W
<out_dir>/search_checkpoint.npz    ← W′ from the search
<out_dir>/search_space.json        ← ranked grid and the selected candidates (grid)
<out_dir>/tune.csv, tune.json      ← tuning sweeps (tune)
"""

from __future__ import annotations

import json
import os
import subprocess
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Mapping, Optional

import pandas as pd

from config.errors import DomainError
from config.logger import get_logger
from config.settings import BASE_DIR, VERSION
from models.params import ModelParams, load_checkpoint, save_checkpoint

log = get_logger(__name__)

CHECKPOINT        = "checkpoint.npz"
SEARCH_CHECKPOINT = "search_checkpoint.npz"
ALPHA             = "alpha.json"
HISTORY           = "history.jsonl"
METRICS           = "metrics.json"
RESULTS           = "results.csv"
RUN_RECORD        = "run.json"
TIMING            = "timing.json"


def version_string() -> str:
    """`git describe` of the source tree when available, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=BASE_DIR, capture_output=True, text=True, timeout=5, check=True,
        )
        described = out.stdout.strip()
        return f"{VERSION}+{described}" if described else VERSION
    except (OSError, subprocess.SubprocessError):
        return VERSION


class RunArtifacts:
    """Writes every artifact of one command into out_dir."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    # ------------------------------------------------------------------
    # Writers
    # ------------------------------------------------------------------

    def write_json(self, name: str, payload: Any) -> str:
        path = self.path(name)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        log.debug("Wrote %s", path)
        return path

    def write_history(self, records: Iterable[Mapping[str, Any]]) -> str:
        path = self.path(HISTORY)
        with open(path, "w", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, sort_keys=True) + "\n")
        return path

    def write_table(self, name: str, table: pd.DataFrame) -> str:
        path = self.path(name)
        table.to_csv(path, index=False)
        return path

    def write_run_record(self, command: str, resolved: Dict[str, Any], seed: int) -> str:
        return self.write_json(RUN_RECORD, {
            "command":    command,
            "config":     resolved,
            "seed":       seed,
            "version":    version_string(),
            "created_at": datetime.now(timezone.utc).isoformat(),
        })

    def save_params(self, params: ModelParams, name: str = CHECKPOINT) -> str:
        return save_checkpoint(params, self.path(name))


def read_json(path: str) -> Dict[str, Any]:
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def load_search_dir(search_dir: str):
    """(alpha payload, W′) written by a previous search."""
    alpha_path = os.path.join(search_dir, ALPHA)
    if not os.path.exists(alpha_path):
        raise DomainError(f"no {ALPHA} in {search_dir}; run `search` first")
    ckpt: Optional[str] = None
    for name in (SEARCH_CHECKPOINT, CHECKPOINT):
        candidate = os.path.join(search_dir, name)
        if os.path.exists(candidate):
            ckpt = candidate
            break
    if ckpt is None:
        raise DomainError(f"no checkpoint in {search_dir}")
    return read_json(alpha_path), load_checkpoint(ckpt)
