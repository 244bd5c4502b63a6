from abc import ABC, abstractmethod
from collections import defaultdict
import math
import threading
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from models.data_models import EventLog, NextStepDistribution, Vocabulary


BEGIN = -1

Context = Tuple[int, ...]


class Predictor(ABC):
    """Next-activity model used by suffix generation.

    Implementations return a distribution over the whole vocabulary (EOC
    included) and a non-negative duration in seconds for a chosen activity.
    """

    vocabulary: Vocabulary

    @abstractmethod
    def predict_next(self, prefix: Sequence[int]) -> NextStepDistribution:
        ...

    @abstractmethod
    def predict_delta(self, prefix: Sequence[int], next_activity: int) -> float:
        ...


class NgramModel(Predictor):
    """Add-alpha smoothed n-gram over activity indices with log-space duration tables.

    `transitions` is keyed by every suffix of the begin-padded context (lengths
    0 .. order-1) so that unsmoothed lookups can back off to the longest
    observed suffix. Duration tables hold (sum of log(1 + dt), count).
    """

    def __init__(
        self,
        vocabulary: Vocabulary,
        order: int,
        alpha: float,
        transitions: Optional[Dict[Context, Dict[int, int]]] = None,
        durations: Optional[Dict[Tuple[Context, int], Tuple[float, int]]] = None,
        activity_durations: Optional[Dict[int, Tuple[float, int]]] = None,
        global_duration: Tuple[float, int] = (0.0, 0),
        max_trace_length: int = 0,
    ):
        if order < 1:
            raise ValueError(f"n-gram order must be >= 1, got {order}")
        if alpha < 0:
            raise ValueError(f"smoothing alpha must be >= 0, got {alpha}")
        self.vocabulary = vocabulary
        self.order = order
        self.alpha = float(alpha)
        self.transitions = transitions if transitions is not None else {}
        self.durations = durations if durations is not None else {}
        self.activity_durations = activity_durations if activity_durations is not None else {}
        self.global_duration = global_duration
        self.max_trace_length = max_trace_length
        self._dist_cache: Dict[Context, NextStepDistribution] = {}
        self._delta_cache: Dict[Tuple[Context, int], float] = {}
        # generation threads share one model
        self._cache_lock = threading.Lock()

    def context(self, prefix: Sequence[int]) -> Context:
        """Last order-1 entries of the prefix, left-padded with BEGIN."""
        width = self.order - 1
        if width == 0:
            return ()
        tail = tuple(prefix[-width:])
        return (BEGIN,) * (width - len(tail)) + tail

    def predict_next(self, prefix: Sequence[int]) -> NextStepDistribution:
        ctx = self.context(prefix)
        with self._cache_lock:
            cached = self._dist_cache.get(ctx)
            if cached is None:
                cached = NextStepDistribution(self._probabilities(ctx))
                self._dist_cache[ctx] = cached
        return cached

    def _probabilities(self, ctx: Context) -> np.ndarray:
        size = self.vocabulary.size
        counts = self.transitions.get(ctx)
        if self.alpha == 0:
            # longest suffix of the context with observations, down to the unigram
            for start in range(len(ctx) + 1):
                counts = self.transitions.get(ctx[start:])
                if counts:
                    break
            vec = self._count_vector(counts, size)
            return vec / vec.sum()
        vec = self._count_vector(counts, size)
        return (vec + self.alpha) / (vec.sum() + self.alpha * size)

    @staticmethod
    def _count_vector(counts: Optional[Dict[int, int]], size: int) -> np.ndarray:
        vec = np.zeros(size, dtype=float)
        for activity, c in (counts or {}).items():
            vec[activity] = c
        return vec

    def predict_delta(self, prefix: Sequence[int], next_activity: int) -> float:
        if next_activity == self.vocabulary.eoc_index:
            raise ValueError("EOC has no duration")
        key = (self.context(prefix), next_activity)
        with self._cache_lock:
            cached = self._delta_cache.get(key)
            if cached is None:
                cached = self._geometric_mean(key)
                self._delta_cache[key] = cached
        return cached

    def _geometric_mean(self, key: Tuple[Context, int]) -> float:
        for total, n in (
            self.durations.get(key, (0.0, 0)),
            self.activity_durations.get(key[1], (0.0, 0)),
            self.global_duration,
        ):
            if n > 0:
                return max(math.expm1(total / n), 0.0)
        return 0.0


def train_ngram(log: EventLog, order: int, alpha: float = 0.0) -> NgramModel:
    """Count context transitions (EOC after each final event) and inter-event durations."""
    if order < 1:
        raise ValueError(f"n-gram order must be >= 1, got {order}")
    if not log.traces:
        raise ValueError("cannot train on an empty log")

    transitions: Dict[Context, Dict[int, int]] = defaultdict(lambda: defaultdict(int))
    durations: Dict[Tuple[Context, int], list] = defaultdict(lambda: [0.0, 0])
    per_activity: Dict[int, list] = defaultdict(lambda: [0.0, 0])
    overall = [0.0, 0]
    model = NgramModel(log.vocabulary, order, alpha)
    eoc = log.vocabulary.eoc_index

    for trace in log.traces:
        acts = trace.activities
        for i in range(len(acts) + 1):
            ctx = model.context(acts[:i])
            nxt = acts[i] if i < len(acts) else eoc
            for start in range(len(ctx) + 1):
                transitions[ctx[start:]][nxt] += 1
            if 0 < i < len(acts):
                dt = (trace.events[i].end_time - trace.events[i - 1].end_time).total_seconds()
                value = math.log1p(max(dt, 0.0))
                for slot in (durations[(ctx, nxt)], per_activity[nxt], overall):
                    slot[0] += value
                    slot[1] += 1

    model.transitions = {ctx: dict(counts) for ctx, counts in transitions.items()}
    model.durations = {key: (s, n) for key, (s, n) in durations.items()}
    model.activity_durations = {a: (s, n) for a, (s, n) in per_activity.items()}
    model.global_duration = (overall[0], overall[1])
    model.max_trace_length = max(len(t) for t in log.traces)
    return model
