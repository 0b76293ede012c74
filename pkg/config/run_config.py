"""
Flat key=value run configuration.

File format
-----------
    # comment
    data = data/ml.tsv
    lr_w = 1e-3
    samplers = rns;pns:beta=0.75;dns:c=10

Command-line flags mirror the keys one to one and win over the file.
Unknown keys are rejected with a suggestion.

Defaults (dim 64, batch_size 1024, lr_w 1e-3) are sized for real datasets.
On a few hundred interactions, e.g. the `gen` planted fixture, that is one
batch per epoch and the model barely moves in 30 epochs.  Use something like
batch_size 64, lr_w 1e-2, dim 16 there.
"""

from __future__ import annotations

import difflib
import os
from typing import Any, Dict, List, Mapping, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config.errors import ConfigError
from config.settings import (
    DEFAULT_SEED, EMBEDDING_DIM, LIGHTGCN_LAYERS, MIN_COUNT, RUNS_DIR, SPLIT_RATIOS,
    TAU_0, TAU_DECAY, TAU_MIN,
)
from models.params import ModelKind
from samplers.schemas import SamplerSpec, parse_spec_list
from search.gumbel import TauSchedule
from search.schemas import SearchOptions
from trainer.retrain import RetrainInit
from trainer.schemas import TrainingConfig

KEY_ALIASES: Dict[str, str] = {
    "learningrate":   "lr_w",
    "learning_rate":  "lr_w",
    "lr":             "lr_w",
    "theta_lr":       "lr_theta",
    "reg":            "l2",
    "weight_decay":   "l2",
    "negatives":      "k",
    "num_negatives":  "k",
    "batch":          "batch_size",
    "embedding_dim":  "dim",
    "output":         "out_dir",
    "outdir":         "out_dir",
    "sampler_list":   "samplers",
    "temperature":    "tau_0",
}

_TRAINING_KEYS = set(TrainingConfig.model_fields)


class RunConfig(BaseModel):
    """Every tunable of a run in one flat, validated namespace."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    # data
    data:         Optional[str] = None
    min_count:    int           = Field(MIN_COUNT, ge=1)
    split_ratios: str           = ",".join(str(r) for r in SPLIT_RATIOS)
    out_dir:      str           = RUNS_DIR
    seed:         int           = DEFAULT_SEED

    # synthetic generator
    num_users:    int   = Field(60, ge=1)
    num_items:    int   = Field(120, ge=1)
    blocks:       int   = Field(3, ge=1)
    density:      float = Field(0.3, ge=0, le=1)
    noise:        float = Field(0.05, ge=0, lt=1)

    # model
    model:        ModelKind = ModelKind.MF
    layers:       int       = Field(LIGHTGCN_LAYERS, ge=0)
    dim:          int       = Field(EMBEDDING_DIM, ge=1)

    # samplers
    sampler:      str = "rns"
    samplers:     str = "rns;pns;dns"

    # training (mirrors TrainingConfig)
    epochs:            Optional[int]   = None
    batch_size:        Optional[int]   = None
    lr_w:              Optional[float] = None
    lr_theta:          Optional[float] = None
    l2:                Optional[float] = None
    k:                 Optional[int]   = None
    eval_every:        Optional[int]   = None
    top_k:             Optional[int]   = None
    metric_for_best:   Optional[str]   = None
    patience:          Optional[int]   = None
    retrain_epochs:    Optional[int]   = None
    dense_adam:        bool            = False
    stale_propagation: bool            = False

    # search
    tau_0:            float = Field(TAU_0, gt=0)
    tau_min:          float = Field(TAU_MIN, gt=0)
    tau_decay:        float = Field(TAU_DECAY, gt=0, le=1)
    gumbel_per_epoch: bool  = False
    hard_selection:   bool  = False

    # retrain / grid / eval
    retrain_init:     RetrainInit = RetrainInit.WARM
    search_dir:       Optional[str] = None
    checkpoint:       Optional[str] = None
    eval_split:       str  = "test"
    match_negatives:  bool = False
    jobs:             int  = Field(1, ge=1)
    tune_theta:       bool = False

    @field_validator("split_ratios")
    @classmethod
    def three_ratios(cls, v: str) -> str:
        parts = [p for p in v.replace(":", ",").split(",") if p.strip()]
        if len(parts) != 3 or not all(p.strip().isdigit() and int(p) > 0 for p in parts):
            raise ValueError(f"split_ratios needs three positive integers, got {v!r}")
        return v

    @field_validator("eval_split")
    @classmethod
    def known_part(cls, v: str) -> str:
        if v not in ("valid", "test"):
            raise ValueError(f"eval_split must be 'valid' or 'test', got {v!r}")
        return v

    # ------------------------------------------------------------------
    # Projections
    # ------------------------------------------------------------------

    def ratios(self) -> Tuple[int, int, int]:
        parts = [int(p) for p in self.split_ratios.replace(":", ",").split(",") if p.strip()]
        return parts[0], parts[1], parts[2]

    def training(self) -> TrainingConfig:
        values = {k: getattr(self, k) for k in _TRAINING_KEYS if getattr(self, k, None) is not None}
        values["dim"] = self.dim
        values["seed"] = self.seed
        try:
            return TrainingConfig(**values)
        except ValidationError as exc:
            raise _config_error(exc) from exc

    def schedule(self) -> TauSchedule:
        try:
            return TauSchedule(tau_0=self.tau_0, tau_min=self.tau_min, decay=self.tau_decay)
        except ValidationError as exc:
            raise _config_error(exc) from exc

    def search_options(self) -> SearchOptions:
        return SearchOptions(
            schedule         = self.schedule(),
            gumbel_per_epoch = self.gumbel_per_epoch,
            hard_selection   = self.hard_selection,
        )

    def sampler_specs(self) -> List[SamplerSpec]:
        return parse_spec_list(self.samplers)

    def sampler_spec(self) -> SamplerSpec:
        return SamplerSpec.parse(self.sampler)

    def require_data(self) -> str:
        if not self.data:
            raise ConfigError("missing data path: pass --data or set data= in the config file", key="data")
        return self.data

    def resolved(self) -> Dict[str, Any]:
        """Fully resolved view written to run.json."""
        out = self.model_dump(mode="json")
        out["training"] = self.training().model_dump(mode="json")
        return out


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def suggest_key(key: str) -> Optional[str]:
    norm = key.strip().lower().replace("-", "_")
    if norm in KEY_ALIASES:
        return KEY_ALIASES[norm]
    close = difflib.get_close_matches(norm, list(RunConfig.model_fields), n=1, cutoff=0.6)
    return close[0] if close else None


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    values: Dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{line_no}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _check_keys(values: Mapping[str, Any]):
    for key in values:
        if key not in RunConfig.model_fields:
            raise ConfigError(f"unknown config key '{key}'", key=key, suggestion=suggest_key(key))


def _config_error(exc: ValidationError) -> ConfigError:
    first = exc.errors()[0]
    key = ".".join(str(p) for p in first.get("loc", ())) or None
    return ConfigError(f"invalid value for '{key}': {first.get('msg')}", key=key)


def load_config(path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """File values (if any), then non-None overrides, validated as a RunConfig."""
    values: Dict[str, Any] = {}
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}", key="config")
        with open(path, encoding="utf-8") as f:
            values.update(parse_config_text(f.read(), source=path))
    _check_keys(values)

    flags = {k: v for k, v in (overrides or {}).items() if v is not None}
    _check_keys(flags)
    values.update(flags)

    try:
        cfg = RunConfig(**values)
    except ValidationError as exc:
        raise _config_error(exc) from exc
    cfg.training()
    cfg.schedule()
    cfg.sampler_specs()
    return cfg
