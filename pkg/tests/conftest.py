"""Shared fixtures: tiny hand-built datasets and the planted block split."""

import numpy as np
import pytest

from interactions.schemas import InteractionDataset
from interactions.splitting import split_dataset
from interactions.synthetic import generate_synthetic
from models.params import ModelKind, init_params
from trainer.schemas import TrainingConfig


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def tiny_ds():
    # 3 users × 5 items
    pairs = [(0, 0), (0, 1), (1, 1), (1, 2), (1, 3), (2, 4)]
    return InteractionDataset.from_pairs(pairs, num_users=3, num_items=5)


@pytest.fixture
def small_graph():
    pairs = [(0, 0), (0, 2), (1, 1), (1, 2), (2, 3), (2, 4), (3, 0), (3, 5), (3, 4)]
    return InteractionDataset.from_pairs(pairs, num_users=4, num_items=6)


@pytest.fixture(scope="session")
def planted_ds():
    return generate_synthetic(60, 120, 3, density=0.3, noise=0.05, seed=7)


@pytest.fixture(scope="session")
def planted_split(planted_ds):
    return split_dataset(planted_ds, (3, 1, 1), seed=0)


@pytest.fixture
def fast_cfg():
    return TrainingConfig(
        epochs     = 3,
        batch_size = 64,
        lr_w       = 1e-2,
        lr_theta   = 1e-2,
        l2         = 0.0,
        dim        = 16,
        patience   = None,
        seed       = 0,
    )


@pytest.fixture
def planted_params(planted_split):
    return init_params(planted_split.num_users, planted_split.num_items, 16, ModelKind.MF, seed=0)
