"""
Gumbel-softmax relaxation over candidate samplers.

  g_t  = −log(−log u_t),  u_t ~ U(0, 1)
  p_t  = softmax((θ + g) / τ)_t
  L    = Σ_t p_t · L_t
  ∂L/∂θ_s = (1/τ) · p_s · (L_s − Σ_t p_t L_t)

The per-sampler losses L_t depend on W only, so they are constants for θ.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.settings import GUMBEL_EPS, TAU_0, TAU_DECAY, TAU_MIN


class TauSchedule(BaseModel):
    """τ(e) = max(τ_min, τ_0 · decay^e)."""
    model_config = ConfigDict(frozen=True)

    tau_0:   float = Field(TAU_0, gt=0)
    tau_min: float = Field(TAU_MIN, gt=0)
    decay:   float = Field(TAU_DECAY, gt=0, le=1)

    @model_validator(mode="after")
    def ordered(self) -> "TauSchedule":
        if self.tau_min > self.tau_0:
            raise ValueError(f"tau_min {self.tau_min} exceeds tau_0 {self.tau_0}")
        return self


def anneal_tau(schedule: TauSchedule, epoch: int) -> float:
    return max(schedule.tau_min, schedule.tau_0 * schedule.decay ** epoch)


def gumbel_from_uniform(u, eps: float = GUMBEL_EPS) -> np.ndarray:
    u = np.clip(np.asarray(u, dtype=np.float64), eps, 1.0 - eps)
    return -np.log(-np.log(u))


def gumbel_noise(t: int, rng: np.random.Generator, eps: float = GUMBEL_EPS) -> np.ndarray:
    """t i.i.d. standard Gumbel draws."""
    if t < 1:
        raise ValueError(f"need T ≥ 1, got {t}")
    return gumbel_from_uniform(rng.random(t), eps)


def softmax(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max())
    return e / e.sum()


def selection_probs(theta: np.ndarray, g: np.ndarray, tau: float) -> np.ndarray:
    return softmax((np.asarray(theta, dtype=np.float64) + np.asarray(g, dtype=np.float64)) / tau)


def combined_loss(p: np.ndarray, losses: np.ndarray) -> float:
    return float(np.dot(p, losses))


def theta_grad(theta: np.ndarray, g: np.ndarray, tau: float, losses: np.ndarray) -> np.ndarray:
    p = selection_probs(theta, g, tau)
    losses = np.asarray(losses, dtype=np.float64)
    return p * (losses - np.dot(p, losses)) / tau


def hard_selection(p: np.ndarray) -> np.ndarray:
    """One-hot at argmax p, lowest index on ties."""
    out = np.zeros_like(p)
    out[int(np.argmax(p))] = 1.0
    return out
