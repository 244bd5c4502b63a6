from dataclasses import dataclass
import math
import re
from typing import IO, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from models.data_models import Event, EventLog, LogStatistics, PrefixSuffixPair, Trace, Vocabulary
from utils.validators import is_open_fraction, missing_columns


ISO_FORMAT = "ISO8601"
# trailing UTC designator or numeric offset
_OFFSET_RE = re.compile(r"(?:[Zz]|[+-]\d{2}:?\d{2})$")


class LogSchemaError(ValueError):
    def __init__(self, column: str):
        super().__init__(f"missing column {column!r} in event log header")
        self.column = column


class LogParseError(ValueError):
    def __init__(self, row: int, value: str, column: str):
        super().__init__(f"row {row}: cannot parse timestamp {value!r} in column {column!r}")
        self.row = row


class EmptyLogError(ValueError):
    pass


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class ColumnMapping:
    case_id: str = "case_id"
    activity: str = "activity"
    end_time: str = "end_time"
    role: Optional[str] = "role"


def _parse_times(raw: pd.Series, timestamp_format: Optional[str]) -> pd.Series:
    """Timestamps as UTC; unparseable values become NaT.

    ISO-8601 values with and without an offset are parsed as separate groups:
    a naive value is UTC whatever offsets other rows carry.
    """
    if timestamp_format:
        return pd.to_datetime(raw, format=timestamp_format, utc=True, errors="coerce")
    has_offset = raw.str.contains(_OFFSET_RE)
    groups = [
        pd.to_datetime(raw[mask], format=ISO_FORMAT, utc=True, errors="coerce")
        for mask in (has_offset, ~has_offset)
        if mask.any()
    ]
    return pd.concat(groups).reindex(raw.index)


def parse_csv_log(source: Union[str, IO], mapping: ColumnMapping = ColumnMapping(), timestamp_format: Optional[str] = None) -> EventLog:
    """Read a CSV event log into time-ordered traces.

    `source` is a path or a byte/text stream with a header row. Timestamps are
    ISO-8601 unless `timestamp_format` (strftime syntax) is given; everything is
    normalized to UTC.
    """
    try:
        df = pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as e:
        raise EmptyLogError("event log is empty") from e

    missing = missing_columns(df.columns, [mapping.case_id, mapping.activity, mapping.end_time])
    if missing:
        raise LogSchemaError(missing[0])
    if df.empty:
        raise EmptyLogError("event log has a header but no rows")

    raw_times = df[mapping.end_time].str.strip()
    times = _parse_times(raw_times, timestamp_format)
    bad = np.flatnonzero(times.isna().to_numpy())
    if bad.size:
        first = int(bad[0])
        raise LogParseError(first + 1, raw_times.iloc[first], mapping.end_time)

    frame = pd.DataFrame({
        "case_id": df[mapping.case_id].astype(str),
        "label": df[mapping.activity],
        "end_time": times,
        "row": np.arange(len(df)),
    })
    frame["case_rank"] = pd.factorize(frame["case_id"])[0]
    # cases in first-appearance order, events by completion time, file order on ties
    frame = frame.sort_values(["case_rank", "end_time", "row"], kind="stable")

    # vocabulary in first-appearance order over the ordered traces, so that a
    # written-back log re-parses to the same indices
    labels = tuple(pd.unique(frame["label"]))
    vocabulary = Vocabulary(labels)
    frame["activity"] = frame["label"].map({label: i for i, label in enumerate(labels)})
    roles = df[mapping.role] if mapping.role and mapping.role in df.columns else None

    traces: List[Trace] = []
    for _, group in frame.groupby("case_rank", sort=True):
        case_id = group["case_id"].iloc[0]
        events = tuple(
            Event(
                case_id=case_id,
                activity=int(act),
                end_time=ts.to_pydatetime(),
                role=(roles.iloc[row] or None) if roles is not None else None,
            )
            for act, ts, row in zip(group["activity"], group["end_time"], group["row"])
        )
        traces.append(Trace(case_id=case_id, events=events))
    return EventLog(traces=tuple(traces), vocabulary=vocabulary)


def write_csv_log(log: EventLog, sink: Union[str, IO], mapping: ColumnMapping = ColumnMapping()) -> None:
    """Write the log back as CSV, one row per event, traces in log order."""
    rows = [
        {
            mapping.case_id: e.case_id,
            mapping.activity: log.vocabulary.label(e.activity),
            mapping.end_time: e.end_time.isoformat(),
            (mapping.role or "role"): e.role or "",
        }
        for trace in log.traces
        for e in trace.events
    ]
    columns = [mapping.case_id, mapping.activity, mapping.end_time, mapping.role or "role"]
    pd.DataFrame(rows, columns=columns).to_csv(sink, index=False, lineterminator="\n")


def with_traces(log: EventLog, traces: Sequence[Trace]) -> EventLog:
    return EventLog(traces=tuple(traces), vocabulary=log.vocabulary)


def temporal_split(log: EventLog, train_fraction: float = 0.8) -> Tuple[EventLog, EventLog]:
    """Order cases by start time (case id breaks ties) and cut after floor(fraction * n)."""
    if not is_open_fraction(train_fraction):
        raise SplitError(f"train fraction must be in (0, 1), got {train_fraction}")
    n = len(log.traces)
    if n < 2:
        raise SplitError(f"temporal split needs at least 2 traces, got {n}")
    ordered = sorted(log.traces, key=lambda t: (t.start_time, t.case_id))
    n_train = min(max(math.floor(train_fraction * n + 1e-9), 1), n - 1)
    return with_traces(log, ordered[:n_train]), with_traces(log, ordered[n_train:])


def enumerate_prefix_pairs(trace: Trace) -> List[PrefixSuffixPair]:
    """All (prefix, suffix) cuts with a non-empty suffix, k = 1 .. len-1."""
    events = trace.events
    return [
        PrefixSuffixPair(
            case_id=trace.case_id,
            k=k,
            prefix=events[:k],
            true_suffix=events[k:],
            prefix_end_time=events[k - 1].end_time,
        )
        for k in range(1, len(events))
    ]


def log_prefix_pairs(log: EventLog) -> List[PrefixSuffixPair]:
    return [pair for trace in log.traces for pair in enumerate_prefix_pairs(trace)]


def filter_activities(log: EventLog, pattern: str) -> EventLog:
    """Keep only events whose label matches `pattern`; re-index the vocabulary."""
    regex = re.compile(pattern)
    keep = {i for i, label in enumerate(log.vocabulary.labels) if regex.search(label)}
    kept_traces: List[List[Event]] = []
    seen: List[int] = []
    for trace in log.traces:
        kept = [e for e in trace.events if e.activity in keep]
        for e in kept:
            if e.activity not in seen:
                seen.append(e.activity)
        if kept:
            kept_traces.append(kept)
    if not kept_traces:
        raise EmptyLogError(f"no events match activity filter {pattern!r}")
    remap = {old: new for new, old in enumerate(seen)}
    vocabulary = Vocabulary(tuple(log.vocabulary.labels[old] for old in seen))
    return EventLog(
        traces=tuple(
            Trace(
                case_id=events[0].case_id,
                events=tuple(Event(e.case_id, remap[e.activity], e.end_time, e.role) for e in events),
            )
            for events in kept_traces
        ),
        vocabulary=vocabulary,
    )


def max_trace_length(log: EventLog) -> int:
    return max((len(t) for t in log.traces), default=0)


def describe_log(log: EventLog) -> LogStatistics:
    if not log.traces:
        raise EmptyLogError("cannot describe an empty log")
    lengths = np.array([len(t) for t in log.traces])
    durations = np.array([(t.end_time - t.start_time).total_seconds() for t in log.traces]) / 86400.0
    return LogStatistics(
        n_cases=len(log.traces),
        n_events=int(lengths.sum()),
        n_activities=len(log.vocabulary.labels),
        avg_trace_length=float(lengths.mean()),
        max_trace_length=int(lengths.max()),
        avg_duration_days=float(durations.mean()),
        max_duration_days=float(durations.max()),
    )
