"""
Walker / Vose alias table for O(1) draws from a fixed discrete distribution.

Build once in O(N); each draw is one uniform bucket plus one biased coin.
"""

from __future__ import annotations

import numpy as np


class AliasTable:

    def __init__(self, probs: np.ndarray):
        probs = np.asarray(probs, dtype=np.float64)
        n = probs.size
        if n == 0 or probs.sum() <= 0:
            raise ValueError("alias table needs a non-empty, positive-mass distribution")

        scaled = probs * (n / probs.sum())
        self.num   = n
        self.prob  = np.ones(n, dtype=np.float64)
        self.alias = np.arange(n, dtype=np.int64)

        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            self.prob[s]  = scaled[s]
            self.alias[s] = l
            scaled[l] = scaled[l] - (1.0 - scaled[s])
            if scaled[l] < 1.0:
                small.append(l)
            else:
                large.append(l)
        # leftovers are 1 up to rounding; zero-mass items must stay unreachable
        fallback = int(np.argmax(probs))
        for i in small + large:
            if probs[i] > 0:
                self.prob[i] = 1.0
            else:
                self.prob[i]  = 0.0
                self.alias[i] = fallback

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        bucket = rng.integers(self.num, size=size)
        coin = rng.random(size=size)
        return np.where(coin < self.prob[bucket], bucket, self.alias[bucket])
