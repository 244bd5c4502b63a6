import json
import sys
import time
import uuid
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, TextIO


@dataclass
class LogEvent:
    run_id: str
    step: str
    component: str
    outcome: str
    duration_ms: int
    extra: Optional[Dict[str, Any]] = None


class StepTimer:
    """Times one pipeline step; `result()` records success, an escaping exception records `error:<Type>`."""

    def __init__(self, logger: "EventLogger", step: str, component: str):
        self.logger = logger
        self.step = step
        self.component = component
        self.started = 0.0

    def elapsed_ms(self) -> int:
        return int((time.perf_counter() - self.started) * 1000)

    def __enter__(self) -> "StepTimer":
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        if exc_type is not None:
            self.logger.log(
                self.step,
                self.component,
                outcome=f"error:{exc_type.__name__}",
                duration_ms=self.elapsed_ms(),
                extra={"error": str(exc)},
            )
        return False

    def result(self, outcome: str, extra: Optional[Dict[str, Any]] = None) -> None:
        self.logger.log(self.step, self.component, outcome=outcome, duration_ms=self.elapsed_ms(), extra=extra)


class EventLogger:
    """JSON-lines logger for pipeline steps, written to stderr by default.

    Per-trial and per-batch events go through `trace()` and only appear with debug=True.
    """

    def __init__(self, sink: Optional[TextIO] = None, run_id: Optional[str] = None, debug: bool = False):
        self.sink = sink or sys.stderr
        self.run_id = run_id or str(uuid.uuid4())
        self.debug = debug

    def log(self, step: str, component: str, outcome: str, duration_ms: int = 0, extra: Optional[Dict[str, Any]] = None) -> None:
        event = LogEvent(self.run_id, step, component, outcome, duration_ms, extra)
        self.sink.write(json.dumps(asdict(event), ensure_ascii=False, default=str) + "\n")
        self.sink.flush()

    def trace(self, step: str, component: str, outcome: str = "ok", extra: Optional[Dict[str, Any]] = None) -> None:
        if self.debug:
            self.log(step, component, outcome, extra=extra)

    def timed(self, step: str, component: str) -> StepTimer:
        return StepTimer(self, step, component)


class NullLogger(EventLogger):
    """Swallows everything; the default for library calls."""

    def __init__(self):
        super().__init__(sink=None, run_id="null")

    def log(self, *args, **kwargs) -> None:
        return None
