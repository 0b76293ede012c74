"""

The four candidate negative samplers behind one interface.

Sampler   Distribution over j ∈ I − I_u
-------   -------------------------------------------------------------
RNS       uniform
PNS       ∝ pop_j^β  (global alias table, rejection on known positives)
DNS       C uniform candidates (distinct within one draw), keep the best-scored
AOBPR     ∝ exp(−rank(u, j) / λ), rank over all candidates by S(u, ·) desc

Every sampler exposes
  .draw(ds, params, graph, u, k, rng)            → k item ids
  .draw_batch(ds, params, graph, users, k, rng)  → len(users) × k item ids
Draws are i.i.d. with replacement across the k slots and never return an
item of I_u.  Score ties resolve to the lowest item id.
"""

from __future__ import annotations

import weakref
from abc import ABC, abstractmethod
from typing import Optional, Tuple, Union

import numpy as np

from config.errors import DomainError
from config.logger import get_logger
from config.settings import PNS_MAX_REJECTION_ROUNDS
from interactions.popularity import popularity_distribution
from interactions.schemas import InteractionDataset
from models.params import ModelParams
from models.scoring import score_users
from samplers.alias import AliasTable
from samplers.schemas import SamplerKind, SamplerSpec

log = get_logger(__name__)


def _candidates_or_raise(ds: InteractionDataset, u: int) -> np.ndarray:
    cands = ds.candidate_items(u)
    if cands.size == 0:
        raise DomainError(f"user {u} has interacted with every item; no negative candidates")
    return cands


def _check_users_have_candidates(ds: InteractionDataset, users: np.ndarray):
    deg = ds.user_degree()[users]
    full = users[deg >= ds.num_items]
    if full.size:
        raise DomainError(f"user {int(full[0])} has interacted with every item; no negative candidates")


class NegativeSampler(ABC):
    """Common interface; subclasses implement draw()."""

    def __init__(self, spec: SamplerSpec):
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.label

    @abstractmethod
    def draw(
        self,
        ds:     InteractionDataset,
        params: Optional[ModelParams],
        graph:  Optional[InteractionDataset],
        u:      int,
        k:      int,
        rng:    np.random.Generator,
    ) -> np.ndarray:
        ...

    def draw_batch(
        self,
        ds:     InteractionDataset,
        params: Optional[ModelParams],
        graph:  Optional[InteractionDataset],
        users:  np.ndarray,
        k:      int,
        rng:    np.random.Generator,
    ) -> np.ndarray:
        """Group positions by user (ascending id) and draw each group in one call."""
        users = np.asarray(users, dtype=np.int64)
        out = np.empty((users.size, k), dtype=np.int64)
        for u in np.unique(users):
            rows = np.flatnonzero(users == u)
            out[rows] = self.draw(ds, params, graph, int(u), rows.size * k, rng).reshape(rows.size, k)
        return out

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


# ===========================================================================
# RNS: uniform
# ===========================================================================

class RandomSampler(NegativeSampler):

    def draw(self, ds, params, graph, u, k, rng):
        cands = _candidates_or_raise(ds, u)
        return cands[rng.integers(cands.size, size=k)]

    def draw_batch(self, ds, params, graph, users, k, rng):
        users = np.asarray(users, dtype=np.int64)
        if users.size == 0:
            return np.empty((0, k), dtype=np.int64)
        _check_users_have_candidates(ds, np.unique(users))
        owners = np.repeat(users, k)
        out = rng.integers(ds.num_items, size=owners.size)
        bad = ds.contains(owners, out)
        while bad.any():
            out[bad] = rng.integers(ds.num_items, size=int(bad.sum()))
            bad[bad] = ds.contains(owners[bad], out[bad])
        return out.reshape(users.size, k)


# ===========================================================================
# PNS: popularity^β
# ===========================================================================

class PopularitySampler(NegativeSampler):
    """
    Draws from the global pop^β alias table and redraws any slot that lands
    on a known positive.  Slots still rejected after PNS_MAX_REJECTION_ROUNDS
    are drawn exactly from the renormalised restricted distribution.
    """

    def __init__(self, spec: SamplerSpec):
        super().__init__(spec)
        self._tables: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()
        self._fallback = RandomSampler(SamplerSpec(kind=SamplerKind.RNS))

    def _table(self, ds: InteractionDataset) -> Tuple[AliasTable, np.ndarray, np.ndarray]:
        hit = self._tables.get(ds)
        if hit is None:
            p = popularity_distribution(ds, self.spec.beta)
            blocked = np.bincount(ds.users, weights=p[ds.items], minlength=ds.num_users)
            hit = (AliasTable(p), p, blocked)
            self._tables[ds] = hit
        return hit

    def _has_mass(self, ds, users: np.ndarray) -> np.ndarray:
        _, _, blocked = self._table(ds)
        return (1.0 - blocked[users]) > 1e-12

    def draw(self, ds, params, graph, u, k, rng):
        ds._check_user(u)
        if not self._has_mass(ds, np.array([u]))[0]:
            log.warning("PNS: user %d has no positive-popularity candidate; falling back to RNS", u)
            return self._fallback.draw(ds, params, graph, u, k, rng)
        owners = np.full(k, u, dtype=np.int64)
        return self._rejection(ds, owners, rng)

    def draw_batch(self, ds, params, graph, users, k, rng):
        users = np.asarray(users, dtype=np.int64)
        out = np.empty((users.size, k), dtype=np.int64)
        ok = self._has_mass(ds, users)
        if (~ok).any():
            log.warning("PNS: %d position(s) without positive-popularity candidates; using RNS",
                        int((~ok).sum()))
            out[~ok] = self._fallback.draw_batch(ds, params, graph, users[~ok], k, rng)
        if ok.any():
            owners = np.repeat(users[ok], k)
            out[ok] = self._rejection(ds, owners, rng).reshape(-1, k)
        return out

    def _rejection(self, ds, owners: np.ndarray, rng) -> np.ndarray:
        table, p, _ = self._table(ds)
        out = table.sample(rng, owners.size)
        bad = ds.contains(owners, out)
        rounds = 0
        while bad.any() and rounds < PNS_MAX_REJECTION_ROUNDS:
            out[bad] = table.sample(rng, int(bad.sum()))
            bad[bad] = ds.contains(owners[bad], out[bad])
            rounds += 1
        for pos in np.flatnonzero(bad):
            u = int(owners[pos])
            restricted = p.copy()
            restricted[ds.user_items(u)] = 0.0
            out[pos] = rng.choice(ds.num_items, p=restricted / restricted.sum())
        return out


# ===========================================================================
# DNS: best of C uniform candidates
# ===========================================================================

class DynamicSampler(NegativeSampler):
    """
    Per draw: C distinct uniform candidates from I − I_u, keep the one with
    the highest S(u, ·).  With spec.temperature set, pick among the C
    candidates with probability ∝ exp(−local_rank / temperature) instead.
    """

    def __init__(self, spec: SamplerSpec):
        super().__init__(spec)
        self._warned_small_pool = False

    def draw(self, ds, params, graph, u, k, rng):
        return self.draw_instrumented(ds, params, graph, u, k, rng)[0]

    def draw_instrumented(self, ds, params, graph, u, k, rng) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (items, candidate sets k × C) so callers can audit each draw."""
        if params is None:
            raise DomainError("DNS needs model parameters to score candidates")
        cands = _candidates_or_raise(ds, u)
        n = cands.size
        c = min(self.spec.candidates, n)
        if self.spec.candidates > n and not self._warned_small_pool:
            log.warning("DNS: C=%d exceeds the %d candidates of user %d; using all of them",
                        self.spec.candidates, n, u)
            self._warned_small_pool = True
        scores = score_users(params, graph, [u])[0][cands]

        keys = rng.random((k, n))
        picked = np.argpartition(keys, c - 1, axis=1)[:, :c] if c < n else np.tile(np.arange(n), (k, 1))
        cand_scores = scores[picked]

        if self.spec.temperature is None:
            best = cand_scores.max(axis=1, keepdims=True)
            choice = np.where(cand_scores == best, picked, n).min(axis=1)
        else:
            order = np.lexsort((picked, -cand_scores), axis=-1)       # score desc, id asc
            ranks = np.arange(c, dtype=np.float64)
            w = np.exp(-(ranks - ranks[0]) / self.spec.temperature)
            slot = rng.choice(c, size=k, p=w / w.sum())
            choice = picked[np.arange(k), order[np.arange(k), slot]]

        return cands[choice], cands[picked]


# ===========================================================================
# AOBPR: rank-softmax over all candidates
# ===========================================================================

class AdaptiveOversampler(NegativeSampler):
    """
    Exact ranking of I − I_u by score on every call, then rank r (1-based)
    drawn with probability ∝ exp(−r / λ).
    """

    def rank_distribution(self, n: int, num_items: int) -> np.ndarray:
        lam = self.spec.resolved_lambda(num_items)
        logits = -np.arange(n, dtype=np.float64) / lam
        w = np.exp(logits - logits.max())
        return w / w.sum()

    def ranked_candidates(self, ds, params, graph, u) -> np.ndarray:
        if params is None:
            raise DomainError("AOBPR needs model parameters to rank candidates")
        cands = _candidates_or_raise(ds, u)
        scores = score_users(params, graph, [u])[0][cands]
        return cands[np.lexsort((cands, -scores))]

    def draw(self, ds, params, graph, u, k, rng):
        ranked = self.ranked_candidates(ds, params, graph, u)
        p = self.rank_distribution(ranked.size, ds.num_items)
        return ranked[rng.choice(ranked.size, size=k, p=p)]


# ---------------------------------------------------------------------------
# Factory + functional forms
# ---------------------------------------------------------------------------

_REGISTRY = {
    SamplerKind.RNS:   RandomSampler,
    SamplerKind.PNS:   PopularitySampler,
    SamplerKind.DNS:   DynamicSampler,
    SamplerKind.AOBPR: AdaptiveOversampler,
}


def make_sampler(spec: Union[SamplerSpec, str]) -> NegativeSampler:
    """Sampler handle for a spec or a config string (e.g. 'pns:beta=0.75')."""
    if isinstance(spec, str):
        spec = SamplerSpec.parse(spec)
    return _REGISTRY[spec.kind](spec)


def sample_rns(ds, u, k, rng) -> np.ndarray:
    return RandomSampler(SamplerSpec(kind=SamplerKind.RNS)).draw(ds, None, None, u, k, rng)


def sample_pns(ds, u, k, beta, rng) -> np.ndarray:
    return PopularitySampler(SamplerSpec(kind=SamplerKind.PNS, beta=beta)).draw(ds, None, None, u, k, rng)


def sample_dns(ds, params, graph, u, k, candidates, rng) -> np.ndarray:
    spec = SamplerSpec(kind=SamplerKind.DNS, candidates=candidates)
    return DynamicSampler(spec).draw(ds, params, graph, u, k, rng)


def sample_aobpr(ds, params, graph, u, k, lam, rng) -> np.ndarray:
    spec = SamplerSpec(kind=SamplerKind.AOBPR, lam=lam)
    return AdaptiveOversampler(spec).draw(ds, params, graph, u, k, rng)
