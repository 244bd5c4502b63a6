from dataclasses import dataclass, field
from datetime import datetime
from typing import Dict, List, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class Vocabulary:
    """Activity labels in first-appearance order; EOC takes the index after the last label."""
    labels: Tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("vocabulary labels must be unique")
        object.__setattr__(self, "_lookup", {label: i for i, label in enumerate(self.labels)})

    @property
    def eoc_index(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        """Number of symbols including EOC."""
        return len(self.labels) + 1

    def index(self, label: str) -> int:
        return self._lookup[label]

    def label(self, index: int) -> str:
        if index == self.eoc_index:
            return "<EOC>"
        return self.labels[index]

    def __contains__(self, label: str) -> bool:
        return label in self._lookup


@dataclass(frozen=True)
class Event:
    case_id: str
    activity: int
    end_time: datetime
    role: Optional[str] = None


@dataclass(frozen=True)
class Trace:
    """One case: events ordered by completion time, file order breaking ties."""
    case_id: str
    events: Tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValueError(f"trace {self.case_id!r} has no events")

    def __len__(self) -> int:
        return len(self.events)

    @property
    def activities(self) -> Tuple[int, ...]:
        return tuple(e.activity for e in self.events)

    @property
    def start_time(self) -> datetime:
        # Only completion times are recorded; the first completion stands in for the start.
        return self.events[0].end_time

    @property
    def end_time(self) -> datetime:
        return self.events[-1].end_time


@dataclass(frozen=True)
class EventLog:
    traces: Tuple[Trace, ...]
    vocabulary: Vocabulary

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def n_events(self) -> int:
        return sum(len(t) for t in self.traces)


@dataclass(frozen=True)
class PrefixSuffixPair:
    case_id: str
    k: int
    prefix: Tuple[Event, ...]
    true_suffix: Tuple[Event, ...]
    prefix_end_time: datetime

    @property
    def actual_remaining_seconds(self) -> float:
        return (self.true_suffix[-1].end_time - self.prefix_end_time).total_seconds()


@dataclass(frozen=True)
class LogStatistics:
    """Dataset characteristics as reported for each event log."""
    n_cases: int
    n_events: int
    n_activities: int
    avg_trace_length: float
    max_trace_length: int
    avg_duration_days: float
    max_duration_days: float


@dataclass(frozen=True, eq=False)
class NextStepDistribution:
    """Probabilities over the vocabulary, EOC included at vocabulary.eoc_index."""
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("distribution must be a non-empty vector")
        if (probs < 0).any() or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("distribution must be non-negative and sum to 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class SamplerPolicy:
    """Decoding rule. kind is one of argmax, random, topk, nucleus, daemon."""
    kind: str
    k: Optional[int] = None
    p: Optional[float] = None
    mode: str = "sample"

    @property
    def name(self) -> str:
        if self.kind == "topk":
            return f"topk:{self.k}"
        if self.kind == "nucleus":
            return f"nucleus:{self.p:g}"
        if self.kind == "daemon":
            return "daemon" if self.mode == "sample" else "daemon-argmax"
        return self.kind


@dataclass(frozen=True)
class GenerationLimits:
    max_steps: int

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class GeneratedSuffix:
    activities: Tuple[int, ...]
    end_times: Tuple[datetime, ...]
    terminated_by_eoc: bool
    steps_taken: int


@dataclass(frozen=True)
class MetricSummary:
    mean_sdl: float
    mean_ras: float
    mae_hours: float
    n_pairs: int


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a synthetic process with one rework loop and an optional branch."""
    base_path: Tuple[str, ...]
    loop_start: int
    loop_end: int
    loop_probability: float
    max_loop_iterations: int
    durations: Dict[str, Tuple[float, float]]
    n_cases: int
    case_spacing_seconds: float
    branch_index: Optional[int] = None
    branch_label: Optional[str] = None
    branch_probability: float = 0.0
    start: datetime = datetime(2024, 1, 1)


@dataclass(frozen=True)
class SearchSpace:
    orders: Tuple[int, ...] = (2, 3, 4, 5)
    alphas: Tuple[float, ...] = (0.0, 0.1, 0.5, 1.0)

    def __post_init__(self):
        if not self.orders or not self.alphas:
            raise ValueError("search space lists must be non-empty")


@dataclass(frozen=True)
class SearchTrial:
    order: int
    alpha: float
    validation_mae: float


@dataclass(frozen=True)
class SearchResult:
    order: int
    alpha: float
    validation_mae: float
    trials: Tuple[SearchTrial, ...]


@dataclass
class PolicyEvaluation:
    """Per-pair scores of one policy over the shared pair manifest."""
    policy: str
    manifest: List[Tuple[str, int]]
    sdl: List[float]
    ras: List[float]
    abs_errors_hours: List[float]
    repetition_profile: Dict[int, int]
    summary: MetricSummary


@dataclass
class EvaluationReport:
    dataset: str
    order: int
    alpha: float
    seed: int
    max_steps: int
    evaluations: List[PolicyEvaluation]
    truth_profile: Dict[int, int] = field(default_factory=dict)
    search: Optional[SearchResult] = None
    wall_clock_seconds: float = 0.0

    @property
    def policies(self) -> List[str]:
        return [e.policy for e in self.evaluations]

    def summary(self, policy: str) -> MetricSummary:
        for e in self.evaluations:
            if e.policy == policy:
                return e.summary
        raise KeyError(policy)
