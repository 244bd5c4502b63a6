"""Synthetic event logs with a rework loop and an optional branch.

Spec files are KEY=VALUE lines (comments with #):

    BASE_PATH=submit,check,assess,rework,validate,approve,archive
    LOOP_START=1                 # index into BASE_PATH
    LOOP_END=4                   # inclusive; loop body is BASE_PATH[LOOP_START:LOOP_END+1]
    LOOP_PROBABILITY=0.7         # chance to run the body again, in [0, 1)
    MAX_LOOP_ITERATIONS=4        # extra passes after the mandatory first one
    BRANCH_INDEX=5               # optional
    BRANCH_LABEL=reject          # replaces BASE_PATH[BRANCH_INDEX] ...
    BRANCH_PROBABILITY=0.2       # ... with this probability, per visit
    DURATION_DEFAULT=8.2,0.5     # log-space mean and deviation of seconds
    DURATION_rework=9.5,0.8      # per-activity override
    N_CASES=1000
    CASE_SPACING_SECONDS=3600
    START=2024-01-01T00:00:00
"""
from datetime import datetime, timedelta, timezone
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values
import numpy as np

from models.data_models import Event, EventLog, SynthSpec, Trace, Vocabulary


class SynthSpecError(ValueError):
    pass


def _pair(raw: str, key: str) -> Tuple[float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise SynthSpecError(f"{key} must be 'mean,deviation', got {raw!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as e:
        raise SynthSpecError(f"{key} must be numeric, got {raw!r}") from e


def _number(values: Mapping[str, Optional[str]], key: str, cast, default=None):
    raw = values.get(key)
    if raw is None or raw.strip() == "":
        if default is None:
            raise SynthSpecError(f"missing required key {key}")
        return default
    try:
        return cast(raw.strip())
    except ValueError as e:
        raise SynthSpecError(f"{key} has invalid value {raw!r}") from e


def spec_from_mapping(values: Mapping[str, Optional[str]]) -> SynthSpec:
    base_raw = values.get("BASE_PATH") or ""
    base_path = tuple(p.strip() for p in base_raw.split(",") if p.strip())
    if not base_path:
        raise SynthSpecError("BASE_PATH must list at least one activity")

    default = _pair(values["DURATION_DEFAULT"], "DURATION_DEFAULT") if values.get("DURATION_DEFAULT") else (0.0, 0.0)
    durations: Dict[str, Tuple[float, float]] = {}
    branch_label = (values.get("BRANCH_LABEL") or "").strip() or None
    for label in base_path + ((branch_label,) if branch_label else ()):
        key = f"DURATION_{label}"
        durations[label] = _pair(values[key], key) if values.get(key) else default

    start_raw = (values.get("START") or "2024-01-01T00:00:00").strip()
    try:
        start = datetime.fromisoformat(start_raw)
    except ValueError as e:
        raise SynthSpecError(f"START must be ISO-8601, got {start_raw!r}") from e

    branch_index = values.get("BRANCH_INDEX")
    spec = SynthSpec(
        base_path=base_path,
        loop_start=_number(values, "LOOP_START", int, 0),
        loop_end=_number(values, "LOOP_END", int, 0),
        loop_probability=_number(values, "LOOP_PROBABILITY", float, 0.0),
        max_loop_iterations=_number(values, "MAX_LOOP_ITERATIONS", int, 0),
        durations=durations,
        n_cases=_number(values, "N_CASES", int),
        case_spacing_seconds=_number(values, "CASE_SPACING_SECONDS", float, 3600.0),
        branch_index=int(branch_index) if branch_index and branch_index.strip() else None,
        branch_label=branch_label,
        branch_probability=_number(values, "BRANCH_PROBABILITY", float, 0.0),
        start=start,
    )
    validate_spec(spec)
    return spec


def load_spec(path: Union[str, Path]) -> SynthSpec:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"synthetic spec not found: {path}")
    return spec_from_mapping(dotenv_values(path))


def validate_spec(spec: SynthSpec) -> None:
    n = len(spec.base_path)
    if len(set(spec.base_path)) != n:
        raise SynthSpecError("BASE_PATH labels must be unique")
    if not 0 <= spec.loop_start <= spec.loop_end < n:
        raise SynthSpecError(f"loop indices must satisfy 0 <= start <= end < {n}")
    if not 0.0 <= spec.loop_probability < 1.0:
        raise SynthSpecError(f"LOOP_PROBABILITY must be in [0, 1), got {spec.loop_probability}")
    if spec.max_loop_iterations < 0:
        raise SynthSpecError("MAX_LOOP_ITERATIONS must be >= 0")
    if spec.n_cases < 1:
        raise SynthSpecError("N_CASES must be >= 1")
    if spec.case_spacing_seconds < 0:
        raise SynthSpecError("CASE_SPACING_SECONDS must be >= 0")
    if not 0.0 <= spec.branch_probability <= 1.0:
        raise SynthSpecError("BRANCH_PROBABILITY must be in [0, 1]")
    if spec.branch_index is not None:
        if not 0 <= spec.branch_index < n:
            raise SynthSpecError(f"BRANCH_INDEX must be in [0, {n})")
        if not spec.branch_label or spec.branch_label in spec.base_path:
            raise SynthSpecError("BRANCH_LABEL must be a new activity label")
    for label, (_, deviation) in spec.durations.items():
        if deviation < 0:
            raise SynthSpecError(f"duration deviation for {label!r} must be >= 0")


def _path_indices(spec: SynthSpec, rng: np.random.Generator) -> List[int]:
    indices = list(range(spec.loop_end + 1))
    body = list(range(spec.loop_start, spec.loop_end + 1))
    passes = 0
    while passes < spec.max_loop_iterations and rng.random() < spec.loop_probability:
        indices.extend(body)
        passes += 1
    indices.extend(range(spec.loop_end + 1, len(spec.base_path)))
    return indices


def _delta_seconds(law: Tuple[float, float], rng: np.random.Generator) -> float:
    mean, deviation = law
    if deviation == 0:
        return float(round(math.exp(mean)))
    return float(round(rng.lognormal(mean, deviation)))


def generate_synthetic_log(spec: SynthSpec, rng: np.random.Generator) -> EventLog:
    """Cases walk BASE_PATH, repeat the loop body with LOOP_PROBABILITY, and draw log-normal durations."""
    validate_spec(spec)
    start = spec.start if spec.start.tzinfo else spec.start.replace(tzinfo=timezone.utc)
    cases: List[Tuple[str, List[Tuple[str, datetime]]]] = []
    for i in range(spec.n_cases):
        case_id = f"case-{i + 1:05d}"
        now = start + timedelta(seconds=i * spec.case_spacing_seconds)
        events: List[Tuple[str, datetime]] = []
        for index in _path_indices(spec, rng):
            label = spec.base_path[index]
            if index == spec.branch_index and rng.random() < spec.branch_probability:
                label = spec.branch_label
            now = now + timedelta(seconds=_delta_seconds(spec.durations[label], rng))
            events.append((label, now))
        cases.append((case_id, events))

    labels: List[str] = []
    for _, events in cases:
        for label, _ in events:
            if label not in labels:
                labels.append(label)
    vocabulary = Vocabulary(tuple(labels))
    traces = tuple(
        Trace(case_id=case_id, events=tuple(Event(case_id, vocabulary.index(label), ts) for label, ts in events))
        for case_id, events in cases
    )
    return EventLog(traces=traces, vocabulary=vocabulary)


def loop_passes(spec: SynthSpec, trace: Trace, vocabulary: Vocabulary) -> int:
    """Extra loop passes in a generated trace (occurrences of the loop-start label minus one)."""
    first = vocabulary.index(spec.base_path[spec.loop_start])
    return sum(1 for a in trace.activities if a == first) - 1
