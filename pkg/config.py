import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

from dotenv import load_dotenv

from models.data_models import SearchSpace

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from e


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError as e:
        raise ValueError(f"{name} must be a number, got {raw!r}") from e


@dataclass
class Config:
    """Defaults for the suffix prediction pipeline, overridable from the environment or .env"""

    seed: int = 42
    workers: int = 4
    hpo_iterations: int = 50  # random search trials
    train_fraction: float = 0.8
    max_steps_factor: int = 2  # generation cap = factor x longest training trace
    output_dir: str = "output/reports"

    def __init__(self):
        self.seed = _env_int("SUFFIX_SEED", 42)
        self.workers = _env_int("SUFFIX_WORKERS", 4)
        self.hpo_iterations = _env_int("SUFFIX_HPO_ITERS", 50)
        self.train_fraction = _env_float("SUFFIX_SPLIT", 0.8)
        self.max_steps_factor = _env_int("SUFFIX_MAX_STEPS_FACTOR", 2)
        self.output_dir = os.getenv("SUFFIX_OUTPUT_DIR") or "output/reports"

        if self.workers < 1:
            raise ValueError("SUFFIX_WORKERS must be >= 1")
        if self.hpo_iterations < 1:
            raise ValueError("SUFFIX_HPO_ITERS must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("SUFFIX_SPLIT must be in (0, 1)")
        if self.max_steps_factor < 1:
            raise ValueError("SUFFIX_MAX_STEPS_FACTOR must be >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on; echoed into its report."""

    dataset: str = "log"
    seed: int = 42
    train_fraction: float = 0.8
    # fit part of the training split inside the random search
    fit_fraction: float = 0.8
    hpo_iterations: int = 50
    space: SearchSpace = field(default_factory=SearchSpace)
    max_steps_factor: int = 2
    workers: int = 1
    # (order, alpha) to skip the random search
    fixed: Optional[Tuple[int, float]] = None
