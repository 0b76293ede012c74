"""
Instance-level mixture of candidate samplers.

Each negative slot independently picks sampler t with probability α_t and
takes one draw from it.  Its expected BPR loss equals Σ_t α_t · E[L_t]; the
Monte Carlo estimators below compare the two sides with W frozen.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from config.errors import DomainError
from interactions.schemas import InteractionDataset
from models.bpr import triple_losses
from models.params import ModelParams
from samplers.negative import NegativeSampler, make_sampler
from samplers.schemas import SamplerSpec


def _check_alpha(alpha: Sequence[float], t: int) -> np.ndarray:
    a = np.asarray(alpha, dtype=np.float64)
    if a.shape != (t,) or np.any(a < 0) or abs(a.sum() - 1.0) > 1e-9:
        raise DomainError(f"alpha must be a length-{t} probability vector, got {a.tolist()}")
    return a


class MixtureSampler(NegativeSampler):
    """Per-slot mixture over several sampler handles."""

    def __init__(self, specs: Sequence[Union[SamplerSpec, str]], alpha: Sequence[float]):
        self.samplers: List[NegativeSampler] = [make_sampler(s) for s in specs]
        self.alpha = _check_alpha(alpha, len(self.samplers))
        self.spec = self.samplers[0].spec

    @property
    def name(self) -> str:
        parts = [f"{a:.3g}·{s.name}" for a, s in zip(self.alpha, self.samplers)]
        return "mixture(" + " + ".join(parts) + ")"

    def draw(self, ds, params, graph, u, k, rng):
        slots = rng.choice(len(self.samplers), size=k, p=self.alpha)
        out = np.empty(k, dtype=np.int64)
        for t, sampler in enumerate(self.samplers):
            sel = slots == t
            if sel.any():
                out[sel] = sampler.draw(ds, params, graph, u, int(sel.sum()), rng)
        return out

    def draw_batch(self, ds, params, graph, users, k, rng):
        owners = np.repeat(np.asarray(users, dtype=np.int64), k)
        slots = rng.choice(len(self.samplers), size=owners.size, p=self.alpha)
        out = np.empty(owners.size, dtype=np.int64)
        for t, sampler in enumerate(self.samplers):
            sel = slots == t
            if sel.any():
                out[sel] = sampler.draw_batch(ds, params, graph, owners[sel], 1, rng)[:, 0]
        return out.reshape(-1, k)


def make_mixture_sampler(specs: Sequence[Union[SamplerSpec, str]], alpha: Sequence[float]) -> MixtureSampler:
    return MixtureSampler(specs, alpha)


def sample_mixture(ds, params, graph, u, k, alpha, specs, rng) -> np.ndarray:
    return make_mixture_sampler(specs, alpha).draw(ds, params, graph, u, k, rng)


def _positive_draw(ds: InteractionDataset, n: int, rng) -> Tuple[np.ndarray, np.ndarray]:
    idx = rng.integers(len(ds), size=n)
    return ds.users[idx], ds.items[idx]


def mixture_loss_estimates(
    ds:        InteractionDataset,
    params:    ModelParams,
    graph:     Optional[InteractionDataset],
    specs:     Sequence[Union[SamplerSpec, str]],
    alpha:     Sequence[float],
    n_triples: int,
    rng:       np.random.Generator,
) -> Tuple[float, float]:
    """
    (A, B) with W frozen:
      A = mean BPR loss of n_triples triples whose negatives come from the mixture
      B = Σ_t α_t · mean BPR loss of n_triples triples drawn from sampler t alone
    """
    mixture = make_mixture_sampler(specs, alpha)

    users, pos = _positive_draw(ds, n_triples, rng)
    neg = mixture.draw_batch(ds, params, graph, users, 1, rng)[:, 0]
    estimate_a = float(triple_losses(params, graph, users, pos, neg).mean())

    estimate_b = 0.0
    for a_t, sampler in zip(mixture.alpha, mixture.samplers):
        users, pos = _positive_draw(ds, n_triples, rng)
        neg = sampler.draw_batch(ds, params, graph, users, 1, rng)[:, 0]
        estimate_b += a_t * float(triple_losses(params, graph, users, pos, neg).mean())

    return estimate_a, estimate_b
