from datetime import datetime, timedelta
import hashlib
from typing import Callable, List, Optional, Sequence

import numpy as np

from agents.sampling import RandomStream, choose_next, initial_counts
from models.data_models import Event, EventLog, GeneratedSuffix, GenerationLimits, NextStepDistribution, SamplerPolicy
from models.ngram import Predictor


StepObserver = Callable[[int, np.ndarray, NextStepDistribution, int], None]


def pair_seed(master_seed: int, case_id: str, k: int) -> int:
    """Stable 64-bit seed for one prefix/suffix pair, independent of scheduling."""
    digest = hashlib.blake2b(f"{master_seed}\x1f{case_id}\x1f{k}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def default_limits(train: EventLog, factor: int = 2) -> GenerationLimits:
    if factor < 1:
        raise ValueError(f"max-steps factor must be >= 1, got {factor}")
    longest = max((len(t) for t in train.traces), default=1)
    return GenerationLimits(max_steps=factor * longest)


def generate_suffix(
    model: Predictor,
    policy: SamplerPolicy,
    prefix: Sequence[Event],
    limits: GenerationLimits,
    rng: RandomStream,
    observer: Optional[StepObserver] = None,
) -> GeneratedSuffix:
    """Extend the prefix one activity at a time until EOC or the step cap.

    Daemon counts start from the prefix occurrences and are incremented after
    every selection, EOC included. `observer(step, counts, dist, choice)` sees
    the counts as they were when the choice was made.
    """
    if not prefix:
        raise ValueError("cannot generate a suffix for an empty prefix")
    eoc = model.vocabulary.eoc_index
    sequence: List[int] = [e.activity for e in prefix]
    counts = initial_counts(sequence, model.vocabulary.size)
    now: datetime = prefix[-1].end_time
    activities: List[int] = []
    end_times: List[datetime] = []
    steps = 0

    while len(activities) < limits.max_steps:
        dist = model.predict_next(sequence)
        choice = choose_next(policy, dist, counts, rng)
        if observer is not None:
            observer(steps, counts.copy(), dist, choice)
        counts[choice] += 1
        steps += 1
        if choice == eoc:
            return GeneratedSuffix(tuple(activities), tuple(end_times), True, steps)
        delta = model.predict_delta(sequence, choice)
        now = now + timedelta(seconds=delta)
        activities.append(choice)
        end_times.append(now)
        sequence.append(choice)

    return GeneratedSuffix(tuple(activities), tuple(end_times), False, steps)


def remaining_time(generated: GeneratedSuffix, prefix_end_time: datetime) -> float:
    """Seconds from the last prefix completion to the last generated completion."""
    if not generated.end_times:
        return 0.0
    return max((generated.end_times[-1] - prefix_end_time).total_seconds(), 0.0)
