from typing import Any, Callable, List, Optional, Sequence, TypeVar
import asyncio

from utils.logging import EventLogger, NullLogger


T = TypeVar("T")
R = TypeVar("R")


class PairExecutor:
    """Fans per-pair jobs out to worker threads with logging and a concurrency cap.

    Results come back in input order whatever the worker count.
    """

    def __init__(self, workers: int = 1, logger: Optional[EventLogger] = None, batch_size: int = 64):
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self.logger = logger or NullLogger()
        self.batch_size = batch_size

    async def map(self, step: str, fn: Callable[[T], R], items: Sequence[T], extra: Optional[dict] = None) -> List[R]:
        batches = [items[i:i + self.batch_size] for i in range(0, len(items), self.batch_size)]
        gate = asyncio.Semaphore(self.workers)

        async def run(index: int, batch: Sequence[T]) -> List[R]:
            async with gate:
                with self.logger.timed(step=step, component="executor") as t:
                    out = await asyncio.to_thread(lambda: [fn(item) for item in batch])
                    if self.logger.debug:
                        t.result("ok", extra={**(extra or {}), "batch": index, "size": len(batch)})
                    return out

        results = await asyncio.gather(*(run(i, b) for i, b in enumerate(batches)))
        return [r for batch in results for r in batch]
