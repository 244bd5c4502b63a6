"""Next-activity selection policies.

Every sampler is a pure function of (distribution, counts, rng). Stochastic
samplers draw one uniform number and invert the cumulative weights in
vocabulary order, so a fixed seed reproduces the same choices.
"""
from typing import Sequence

import numpy as np

from models.data_models import NextStepDistribution, SamplerPolicy


RandomStream = np.random.Generator
DaemonCounts = np.ndarray


def make_rng(seed: int) -> RandomStream:
    return np.random.Generator(np.random.PCG64(seed))


def initial_counts(activities: Sequence[int], size: int) -> DaemonCounts:
    """Occurrences of each vocabulary index in the prefix."""
    return np.bincount(np.asarray(activities, dtype=np.int64), minlength=size).astype(np.int64)


def _draw(weights: np.ndarray, rng: RandomStream) -> int:
    """Inverse-CDF draw over non-negative, not necessarily normalized weights."""
    cdf = np.cumsum(weights)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    # u * total may round up to total; fall back to the last index with mass
    return min(idx, int(np.flatnonzero(weights)[-1]))


def _argmax(weights: np.ndarray) -> int:
    # np.argmax returns the first maximum: ties go to the lower index
    return int(np.argmax(weights))


def _descending(probs: np.ndarray) -> np.ndarray:
    return np.argsort(-probs, kind="stable")


def sample_argmax(dist: NextStepDistribution) -> int:
    return _argmax(dist.probs)


def sample_categorical(dist: NextStepDistribution, rng: RandomStream) -> int:
    return _draw(dist.probs, rng)


def top_k_support(probs: np.ndarray, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError(f"top-k needs k >= 1, got {k}")
    return np.sort(_descending(probs)[: min(k, probs.size)])


def sample_top_k(dist: NextStepDistribution, k: int, rng: RandomStream) -> int:
    support = top_k_support(dist.probs, k)
    weights = np.zeros_like(dist.probs)
    weights[support] = dist.probs[support]
    return _draw(weights, rng)


def nucleus_support(probs: np.ndarray, p: float) -> np.ndarray:
    """Shortest most-probable prefix whose cumulative mass reaches p."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"nucleus needs 0 < p <= 1, got {p}")
    order = _descending(probs)
    cumulative = np.cumsum(probs[order])
    size = int(np.searchsorted(cumulative, p - 1e-12, side="left")) + 1
    return np.sort(order[: min(size, probs.size)])


def sample_nucleus(dist: NextStepDistribution, p: float, rng: RandomStream) -> int:
    support = nucleus_support(dist.probs, p)
    weights = np.zeros_like(dist.probs)
    weights[support] = dist.probs[support]
    return _draw(weights, rng)


def _daemon_raw(dist: NextStepDistribution, counts: DaemonCounts) -> np.ndarray:
    # add-one keeps 1/count defined for activities not seen yet
    return dist.probs / (np.asarray(counts, dtype=float) + 1.0)


def daemon_weights(dist: NextStepDistribution, counts: DaemonCounts) -> np.ndarray:
    """P(a) / (count(a) + 1), renormalized to sum to one.

    The sum over P(i) * count(i) that divides the numerator is the same for
    every a, so exact renormalization selects identically.
    """
    raw = _daemon_raw(dist, counts)
    return raw / raw.sum()


def sample_daemon(dist: NextStepDistribution, counts: DaemonCounts, mode: str, rng: RandomStream) -> int:
    raw = _daemon_raw(dist, counts)
    if mode == "argmax":
        return _argmax(raw)
    if mode == "sample":
        return _draw(raw, rng)
    raise ValueError(f"unknown daemon mode {mode!r}")


def choose_next(policy: SamplerPolicy, dist: NextStepDistribution, counts: DaemonCounts, rng: RandomStream) -> int:
    """Apply `policy` to one step; counts are only read by the daemon sampler."""
    if policy.kind == "argmax":
        return sample_argmax(dist)
    if policy.kind == "random":
        return sample_categorical(dist, rng)
    if policy.kind == "topk":
        return sample_top_k(dist, policy.k, rng)
    if policy.kind == "nucleus":
        return sample_nucleus(dist, policy.p, rng)
    if policy.kind == "daemon":
        return sample_daemon(dist, counts, policy.mode, rng)
    raise ValueError(f"unknown sampler policy {policy.kind!r}")
