"""
Central configuration defaults for the AutoSample training library.
Runtime overrides come from a flat key=value file or CLI flags
(see config/run_config.py); only logging reads the environment.
"""

import os
from pathlib import Path
from typing import List


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------
EMBEDDING_DIM: int = 64
INIT_STD: float = 0.1            # N(0, 0.1) initialisation of both tables
LIGHTGCN_LAYERS: int = 3


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------
BATCH_SIZE: int = 1024
EPOCHS: int = 30
NEGATIVES_PER_POSITIVE: int = 1  # k
LR_W: float = 1e-3
LR_THETA: float = 1e-3
L2: float = 1e-4
PATIENCE: int = 10               # evaluations without improvement before stopping
DEFAULT_SEED: int = 42

ADAM_BETA1: float = 0.9
ADAM_BETA2: float = 0.999
ADAM_EPS: float = 1e-8


# ---------------------------------------------------------------------------
# Search (Gumbel-softmax temperature schedule)
# ---------------------------------------------------------------------------
TAU_0: float = 1.0
TAU_MIN: float = 0.1
TAU_DECAY: float = 0.95
GUMBEL_EPS: float = 1e-12


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------
PNS_BETA: float = 0.75
DNS_CANDIDATES: int = 10
AOBPR_LAMBDA_FRACTION: float = 0.01   # default lambda = N / 100
PNS_MAX_REJECTION_ROUNDS: int = 64


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------
TOP_K: int = 20
EVAL_CHUNK_USERS: int = 2048


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------
SPLIT_RATIOS: tuple = (3, 1, 1)
MIN_COUNT: int = 1


# ---------------------------------------------------------------------------
# Tuning grids
# ---------------------------------------------------------------------------
LR_W_GRID: List[float] = [3e-3, 1e-3, 3e-4, 1e-4]
L2_GRID: List[float] = [1e-2, 1e-3, 1e-4, 0.0]
LR_THETA_GRID: List[float] = [3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5]


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------
BASE_DIR: str = str(Path(__file__).parent.parent.resolve())
RUNS_DIR: str = os.path.join(BASE_DIR, "runs")

CHECKPOINT_FORMAT_VERSION: int = 1
VERSION: str = "0.3.0"


# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
LOG_FORMAT: str = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
