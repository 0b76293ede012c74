"""
SamplerSpec: a validated description of one candidate negative sampler.

Config strings
--------------
  rns
  pns:beta=0.75
  dns:c=10            dns:c=10,temp=0.5   (softened local-rank variant)
  aobpr:lambda=64     aobpr               (lambda defaults to N / 100)

Lists of specs are `;`-separated:  "rns;pns:beta=0.75;dns:c=10"
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from config.errors import ConfigError
from config.settings import AOBPR_LAMBDA_FRACTION, DNS_CANDIDATES, PNS_BETA


class SamplerKind(str, Enum):
    RNS   = "rns"
    PNS   = "pns"
    DNS   = "dns"
    AOBPR = "aobpr"


# accepted parameter names per kind → field name
_PARAMS: Dict[SamplerKind, Dict[str, str]] = {
    SamplerKind.RNS:   {},
    SamplerKind.PNS:   {"beta": "beta"},
    SamplerKind.DNS:   {"c": "candidates", "candidates": "candidates",
                        "temp": "temperature", "temperature": "temperature"},
    SamplerKind.AOBPR: {"lambda": "lam", "lam": "lam"},
}


class SamplerSpec(BaseModel):
    """
    One candidate sampler π_t.

    beta        : PNS popularity exponent
    candidates  : DNS candidate count C
    temperature : DNS softened variant (None = hard argmax)
    lam         : AOBPR rank temperature λ (None = N / 100 at draw time)
    """
    model_config = ConfigDict(frozen=True)

    kind:        SamplerKind
    beta:        float           = PNS_BETA
    candidates:  int             = DNS_CANDIDATES
    temperature: Optional[float] = None
    lam:         Optional[float] = None
    name:        str             = ""

    @field_validator("beta")
    @classmethod
    def finite_beta(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("PNS beta must be finite")
        return v

    @field_validator("candidates")
    @classmethod
    def positive_candidates(cls, v: int) -> int:
        if v < 1:
            raise ValueError("DNS candidates must be ≥ 1")
        return v

    @field_validator("lam", "temperature")
    @classmethod
    def positive_or_none(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("must be > 0")
        return v

    # ------------------------------------------------------------------
    # Parsing / formatting
    # ------------------------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "SamplerSpec":
        raw = text.strip()
        head, _, tail = raw.partition(":")
        try:
            kind = SamplerKind(head.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in SamplerKind)
            raise ConfigError(f"unknown sampler kind '{head}' in '{text}' (valid: {valid})", key="samplers")

        fields: Dict[str, object] = {}
        for item in filter(None, (p.strip() for p in tail.split(","))):
            key, eq, value = item.partition("=")
            key = key.strip().lower()
            if not eq or key not in _PARAMS[kind]:
                raise ConfigError(f"bad parameter '{item}' for sampler '{kind.value}'", key="samplers")
            fields[_PARAMS[kind][key]] = value.strip()

        try:
            return cls(kind=kind, name=raw, **fields)
        except ValidationError as exc:
            raise ConfigError(f"invalid sampler '{text}': {exc.errors()[0]['msg']}", key="samplers") from None

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == SamplerKind.PNS:
            return f"pns:beta={self.beta:g}"
        if self.kind == SamplerKind.DNS:
            return f"dns:c={self.candidates}" + (f",temp={self.temperature:g}" if self.temperature else "")
        if self.kind == SamplerKind.AOBPR and self.lam is not None:
            return f"aobpr:lambda={self.lam:g}"
        return self.kind.value

    def resolved_lambda(self, num_items: int) -> float:
        return self.lam if self.lam is not None else max(num_items * AOBPR_LAMBDA_FRACTION, 1e-12)


def parse_spec_list(text: str) -> List[SamplerSpec]:
    specs = [SamplerSpec.parse(part) for part in text.split(";") if part.strip()]
    if not specs:
        raise ConfigError("empty sampler list", key="samplers")
    return specs
